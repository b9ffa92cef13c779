"""Physical parameters, Fourier conventions and the Gaussian-polynomial data family.

Fourier transform convention used everywhere in the package::

    f_hat(xi) = integral exp(-i x.xi) f(x) dx

so that ``f_hat(0)`` is the integral of ``f`` and the physical L2 norm is
``(2 pi)^(-n/2)`` times the L2 norm of ``f_hat``.

Initial data are finite sums of atoms ``c * x**gamma * exp(-a |x|^2)``
centred at the origin, which keeps the transform, the moments and the
angular structure of the spectrum exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import eval_hermite

MAX_ATOM_DEGREE = 2


class ConstraintViolation(ValueError):
    """Raised when Lamé constants or data parameters break a hard constraint."""


def plancherel_factor(n: int) -> float:
    """Factor turning a Fourier-side L2 norm into a physical-space one."""
    return (2.0 * math.pi) ** (-n / 2.0)


@dataclass(frozen=True)
class LameParams:
    """Validated Lamé constants with the derived P- and S-wave speeds.

    Build these with :func:`make_lame`; direct construction skips validation.
    """

    lam: float
    mu: float

    @property
    def alpha1(self) -> float:
        return math.sqrt(self.lam + 2.0 * self.mu)

    @property
    def alpha2(self) -> float:
        return math.sqrt(self.mu)

    @property
    def scalar_reduction(self) -> bool:
        return self.lam + self.mu == 0.0

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "mu": self.mu}


def make_lame(lam: float, mu: float) -> LameParams:
    """Validate ``lambda + 2 mu > 0`` and ``mu > 0`` and return the parameters."""
    lam = float(lam)
    mu = float(mu)
    if not lam + 2.0 * mu > 0.0:
        raise ConstraintViolation(f"λ+2μ ≤ 0 (λ={lam}, μ={mu})")
    if not mu > 0.0:
        raise ConstraintViolation(f"μ ≤ 0 (μ={mu})")
    return LameParams(lam, mu)


@dataclass(frozen=True)
class GaussianPolyAtom:
    """One term ``coeff * x**gamma * exp(-width |x|^2)``."""

    coeff: float
    gamma: tuple[int, ...]
    width: float

    def __post_init__(self):
        object.__setattr__(self, "gamma", tuple(int(g) for g in self.gamma))
        object.__setattr__(self, "coeff", float(self.coeff))
        object.__setattr__(self, "width", float(self.width))
        if not self.width > 0.0:
            raise ConstraintViolation(f"atom width must be positive, got {self.width}")
        if any(g < 0 for g in self.gamma):
            raise ConstraintViolation(f"negative exponent in {self.gamma}")
        if sum(self.gamma) > MAX_ATOM_DEGREE:
            raise ConstraintViolation(
                f"atom degree {sum(self.gamma)} exceeds {MAX_ATOM_DEGREE}"
            )

    @property
    def dim(self) -> int:
        return len(self.gamma)

    @property
    def degree(self) -> int:
        return sum(self.gamma)

    def to_dict(self) -> dict:
        return {"coeff": self.coeff, "gamma": list(self.gamma), "width": self.width}

    @classmethod
    def from_dict(cls, d: dict) -> "GaussianPolyAtom":
        return cls(d["coeff"], tuple(d["gamma"]), d.get("width", 1.0))


AtomSum = tuple[GaussianPolyAtom, ...]


def _as_atom_sum(atoms: Iterable[GaussianPolyAtom], dim: int) -> AtomSum:
    atoms = tuple(atoms)
    for atom in atoms:
        if atom.dim != dim:
            raise ConstraintViolation(
                f"atom dimension {atom.dim} does not match data dimension {dim}"
            )
    return atoms


@dataclass(frozen=True)
class GaussianPolyData:
    """Initial displacement ``f0`` and velocity ``f1``, one atom sum per component."""

    dim: int
    f0: tuple[AtomSum, ...]
    f1: tuple[AtomSum, ...]

    def __post_init__(self):
        if self.dim < 1:
            raise ConstraintViolation(f"dimension must be >= 1, got {self.dim}")
        for name in ("f0", "f1"):
            comps = getattr(self, name)
            if len(comps) != self.dim:
                raise ConstraintViolation(
                    f"{name} has {len(comps)} components, expected {self.dim}"
                )
            object.__setattr__(
                self, name, tuple(_as_atom_sum(c, self.dim) for c in comps)
            )

    @property
    def max_degree(self) -> int:
        return max(
            (a.degree for comp in self.f0 + self.f1 for a in comp), default=0
        )

    @property
    def max_width(self) -> float:
        """Largest atom width ``a``; its spectrum ``exp(-|xi|^2/(4a))`` decays slowest."""
        return max((a.width for comp in self.f0 + self.f1 for a in comp), default=1.0)

    def is_zero(self) -> bool:
        return all(len(c) == 0 for c in self.f0 + self.f1)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "f0": [[a.to_dict() for a in comp] for comp in self.f0],
            "f1": [[a.to_dict() for a in comp] for comp in self.f1],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GaussianPolyData":
        dim = int(d["dim"])
        conv = lambda comps: tuple(
            tuple(GaussianPolyAtom.from_dict(a) for a in comp) for comp in comps
        )
        empty = [[] for _ in range(dim)]
        return cls(dim, conv(d.get("f0", empty)), conv(d.get("f1", empty)))


def gaussian_data(
    dim: int,
    f0: dict[int, Sequence[GaussianPolyAtom]] | None = None,
    f1: dict[int, Sequence[GaussianPolyAtom]] | None = None,
) -> GaussianPolyData:
    """Build data from sparse ``{component: atoms}`` maps (missing components are zero)."""
    f0 = f0 or {}
    f1 = f1 or {}
    return GaussianPolyData(
        dim,
        tuple(tuple(f0.get(k, ())) for k in range(dim)),
        tuple(tuple(f1.get(k, ())) for k in range(dim)),
    )


def atom(coeff: float, gamma: Sequence[int], width: float = 1.0) -> GaussianPolyAtom:
    return GaussianPolyAtom(coeff, tuple(gamma), width)


# --- Fourier side ---------------------------------------------------------


def _hermite_factor(k: int, xi: np.ndarray, a: float) -> np.ndarray:
    # (i d/dxi)^k exp(-xi^2/(4a)) = (-i/(2 sqrt a))^k H_k(xi/(2 sqrt a)) exp(-xi^2/(4a))
    if k == 0:
        return np.ones_like(xi, dtype=complex)
    s = 2.0 * math.sqrt(a)
    return (-1j / s) ** k * eval_hermite(k, xi / s)


def atom_fourier(atom: GaussianPolyAtom, xi) -> np.ndarray | complex:
    """Exact Fourier transform of one atom at ``xi`` (last axis has length n)."""
    xi = np.asarray(xi, dtype=float)
    scalar = xi.ndim == 1
    xi = np.atleast_2d(xi)
    n = atom.dim
    if xi.shape[-1] != n:
        raise ValueError(f"xi has {xi.shape[-1]} coordinates, atom dimension is {n}")
    a = atom.width
    r2 = np.sum(xi * xi, axis=-1)
    val = atom.coeff * (math.pi / a) ** (n / 2.0) * np.exp(-r2 / (4.0 * a)) + 0j
    for i, g in enumerate(atom.gamma):
        if g:
            val = val * _hermite_factor(g, xi[..., i], a)
    return complex(val[0]) if scalar else val


def sum_fourier(atoms: AtomSum, xi, dim: int) -> np.ndarray:
    """Fourier transform of an atom sum on an array of frequencies ``(..., n)``."""
    xi = np.asarray(xi, dtype=float)
    out = np.zeros(xi.shape[:-1], dtype=complex)
    for at in atoms:
        out += atom_fourier(at, xi.reshape(-1, dim)).reshape(xi.shape[:-1])
    return out


def data_fourier(atoms_per_comp: Sequence[AtomSum], xi, dim: int) -> np.ndarray:
    """Stack of component transforms, shape ``(..., n)``."""
    return np.stack([sum_fourier(c, xi, dim) for c in atoms_per_comp], axis=-1)


def radial_spectrum_factors(atom: GaussianPolyAtom, r: np.ndarray, omega: np.ndarray):
    """Transform of ``atom`` on the polar grid ``xi = r * omega``.

    ``r`` has shape (R,), ``omega`` has shape (A, n); returns (R, A) complex.
    Splits into a radial Gaussian and a product of Hermite factors so no
    (R, A, n) temporary is formed.
    """
    n = atom.dim
    a = atom.width
    out = (atom.coeff * (math.pi / a) ** (n / 2.0) * np.exp(-(r * r) / (4.0 * a)))[
        :, None
    ] * np.ones((1, omega.shape[0]), dtype=complex)
    for i, g in enumerate(atom.gamma):
        if g:
            out *= _hermite_factor(g, r[:, None] * omega[None, :, i], a)
    return out


def sum_spectrum_polar(atoms: AtomSum, r: np.ndarray, omega: np.ndarray) -> np.ndarray:
    out = np.zeros((r.size, omega.shape[0]), dtype=complex)
    for at in atoms:
        out += radial_spectrum_factors(at, r, omega)
    return out


# --- physical side --------------------------------------------------------


def atom_value(atom: GaussianPolyAtom, x) -> np.ndarray:
    """Evaluate the atom at physical points ``x`` of shape ``(..., n)``."""
    x = np.asarray(x, dtype=float)
    val = atom.coeff * np.exp(-atom.width * np.sum(x * x, axis=-1))
    for i, g in enumerate(atom.gamma):
        if g:
            val = val * x[..., i] ** g
    return val


def sum_value(atoms: AtomSum, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape[:-1])
    for at in atoms:
        out += atom_value(at, x)
    return out


def _gauss_moment_1d(m: int, b: float) -> float:
    """Integral over R of x**m exp(-b x^2)."""
    if m % 2:
        return 0.0
    return math.gamma((m + 1) / 2.0) / b ** ((m + 1) / 2.0)


def atom_inner(p: GaussianPolyAtom, q: GaussianPolyAtom) -> float:
    """Exact L2 inner product of two atoms."""
    b = p.width + q.width
    val = p.coeff * q.coeff
    for gp, gq in zip(p.gamma, q.gamma):
        val *= _gauss_moment_1d(gp + gq, b)
    return val


def sum_l2_norm(atoms: AtomSum) -> float:
    """Exact physical L2 norm of an atom sum."""
    s = sum(atom_inner(p, q) for p in atoms for q in atoms)
    return math.sqrt(max(s, 0.0))


def support_radius(data: GaussianPolyData, rel: float = 1e-12) -> float:
    """Radius beyond which every atom is below ``rel`` times its own peak."""
    from scipy.optimize import brentq

    radius = 0.0
    for comp in data.f0 + data.f1:
        for at in comp:
            g, a = at.degree, at.width
            peak_r = math.sqrt(g / (2.0 * a)) if g else 0.0
            log_env = lambda s: (g * math.log(s) if g else 0.0) - a * s * s
            target = log_env(peak_r) if g else 0.0
            target += math.log(rel)
            hi = max(peak_r, 1.0)
            while log_env(hi) > target:
                hi *= 2.0
            radius = max(radius, brentq(lambda s: log_env(s) - target, max(peak_r, 1e-12), hi))
    return radius


def weighted_l1_norm(
    atoms: AtomSum, dim: int, power: int = 0, nodes: int = 400, angular_degree: int = 64
) -> float:
    """Numerical ``integral (1 + |x|)**power |f(x)| dx`` of an atom sum.

    Uses a polar product rule.  Sign changes of the data make ``|f|`` only
    Lipschitz in the angle, so expect a few parts in 1e4 in that case; this
    is ample for envelope constants.
    """
    from .spherical import sphere_rule

    if not atoms:
        return 0.0
    a_min = min(at.width for at in atoms)
    r_max = math.sqrt(40.0 / a_min)
    x, w = np.polynomial.legendre.leggauss(nodes)
    r = 0.5 * r_max * (x + 1.0)
    wr = 0.5 * r_max * w
    omega, wo = sphere_rule(dim, angular_degree) if dim > 1 else (np.array([[1.0], [-1.0]]), np.ones(2))
    pts = r[:, None, None] * omega[None, :, :]
    vals = np.abs(sum_value(atoms, pts))
    radial = wr * r ** (dim - 1) * (1.0 + r) ** power
    return float(np.einsum("i,ij,j->", radial, vals, wo))
