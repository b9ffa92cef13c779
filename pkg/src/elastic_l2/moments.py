"""Zeroth and first moments of Gaussian-polynomial data, computed exactly.

Indices are zero-based: ``m[j, k]`` is the zeroth moment of component ``k``
of ``f_j`` and ``p[j, k, l] = -integral x_l f_jk(x) dx``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core_model import AtomSum, GaussianPolyAtom, GaussianPolyData, _gauss_moment_1d


def atom_moment(atom: GaussianPolyAtom, beta: Sequence[int]) -> float:
    """``(1/beta!) * integral (-x)**beta * atom(x) dx`` for ``|beta| <= 1``."""
    beta = tuple(int(b) for b in beta)
    if len(beta) != atom.dim:
        raise ValueError(f"beta has length {len(beta)}, atom dimension is {atom.dim}")
    if any(b < 0 for b in beta) or sum(beta) > 1:
        raise ValueError(f"only moments with |beta| <= 1 are supported, got {beta}")
    val = atom.coeff * (-1.0) ** sum(beta)
    for g, b in zip(atom.gamma, beta):
        val *= _gauss_moment_1d(g + b, atom.width)
    return val


def _sum_moment(atoms: AtomSum, beta: Sequence[int]) -> float:
    return sum(atom_moment(a, beta) for a in atoms)


@dataclass(frozen=True, eq=False)
class MomentSet:
    """All moment functionals of the data with their absolute-value aggregates."""

    m: np.ndarray  # (2, n)
    p: np.ndarray  # (2, n, n)

    @property
    def dim(self) -> int:
        return self.m.shape[1]

    @property
    def M_abs(self) -> np.ndarray:
        """``|M_j| = sum_k |m_jk|`` (l1 aggregate)."""
        return np.abs(self.m).sum(axis=1)

    @property
    def M_euclid(self) -> np.ndarray:
        """Euclidean length of ``M_j``; the quantity appearing in angular integrals."""
        return np.sqrt((self.m**2).sum(axis=1))

    @property
    def P_abs(self) -> np.ndarray:
        """``|P_jk| = sum_l |p_jk,l|``, shape (2, n)."""
        return np.abs(self.p).sum(axis=2)

    @property
    def PP_abs(self) -> np.ndarray:
        """The aggregate ``|PP_{j,N}|`` for each ``j`` and ``N``, shape (2, n)."""
        n = self.dim
        out = np.zeros((2, n))
        for j in range(2):
            p = self.p[j]
            diag = np.abs(np.diag(p)).sum()
            for N in range(n):
                val = self.P_abs[j, N] + np.abs(p[:, N]).sum() + diag
                for k in range(n):
                    for l in range(k + 1, n):
                        if k != N and l != N:
                            val += abs(p[k, l] + p[l, k])
                out[j, N] = val
        return out

    def to_dict(self) -> dict:
        return {
            "m": self.m.tolist(),
            "p": self.p.tolist(),
            "M_abs": self.M_abs.tolist(),
            "P_abs": self.P_abs.tolist(),
            "PP_abs": self.PP_abs.tolist(),
        }


def assemble_moments(data: GaussianPolyData) -> MomentSet:
    n = data.dim
    zero = (0,) * n
    units = [tuple(int(i == l) for i in range(n)) for l in range(n)]
    m = np.zeros((2, n))
    p = np.zeros((2, n, n))
    for j, f in enumerate((data.f0, data.f1)):
        for k in range(n):
            m[j, k] = _sum_moment(f[k], zero)
            for l in range(n):
                p[j, k, l] = _sum_moment(f[k], units[l])
    return MomentSet(m, p)


def scalar_moments(atoms: AtomSum, dim: int) -> tuple[float, np.ndarray]:
    """``(m, P)`` of a single scalar atom sum (used by the wave-equation path)."""
    zero = (0,) * dim
    m = _sum_moment(atoms, zero)
    p = np.array(
        [_sum_moment(atoms, tuple(int(i == l) for i in range(dim))) for l in range(dim)]
    )
    return m, p
