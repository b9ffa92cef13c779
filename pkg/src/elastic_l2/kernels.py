"""Gaussian-damped wave kernels and their Fourier-side L2 norms.

The four kernels are ``e^{-beta|xi|^2}`` times one of

* ``cos(t alpha |xi|)``                    (cosine)
* ``sin(t alpha |xi|) / (alpha |xi|)``     (sine)
* either of the above times ``xi_N xi_k / |xi|^2``  (tilde variants)

and an ``x``-derivative of order ``gamma`` multiplies by ``(i xi)^gamma``.
All norms here are Fourier-side, without any ``(2 pi)`` factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core_model import AtomSum, sum_spectrum_polar
from .moments import atom_moment
from .quadrature import QuadratureSpec, radial_quadrature, sinc_t
from .spherical import sphere_monomial_integral, sphere_rule

KINDS = ("cosine", "sine")


class RegimeError(ValueError):
    """Requested closed form does not apply to this (kind, n, |gamma|)."""


@dataclass(frozen=True)
class KernelSpec:
    """Parameters of one damped kernel.

    ``tilde`` holds the zero-based pair ``(N, k)`` for the tilde variants.
    """

    kind: str
    alpha: float
    beta: float
    deriv: tuple[int, ...]
    dim: int
    tilde: tuple[int, int] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.alpha > 0 or not self.beta > 0:
            raise ValueError("alpha and beta must be positive")
        object.__setattr__(self, "deriv", tuple(int(g) for g in self.deriv))
        if len(self.deriv) != self.dim:
            raise ValueError(f"derivative index {self.deriv} does not match n={self.dim}")
        if self.tilde is not None:
            N, k = (int(i) for i in self.tilde)
            if not (0 <= N < self.dim and 0 <= k < self.dim):
                raise ValueError(f"tilde indices {self.tilde} out of range")
            object.__setattr__(self, "tilde", (N, k))

    @property
    def order(self) -> int:
        return sum(self.deriv)

    @property
    def regime(self) -> str:
        """``"growing"`` when the norm diverges as t grows, ``"stable"`` otherwise."""
        if self.kind == "sine" and self.order == 0 and self.dim <= 2:
            return "growing"
        return "stable"

    def angular_exponent(self) -> tuple[int, ...]:
        e = [2 * g for g in self.deriv]
        if self.tilde is not None:
            N, k = self.tilde
            e[N] += 2
            e[k] += 2
        return tuple(e)

    def angular_constant(self) -> float:
        return sphere_monomial_integral(self.dim, self.angular_exponent())


def radial_gaussian_moment(k: float, beta: float) -> float:
    """``int_0^inf exp(-2 beta r^2) r^(k-1) dr`` for ``k > 0``."""
    if k <= 0:
        raise ValueError("k must be positive")
    return 2.0 ** (-k / 2.0 - 1.0) * math.gamma(k / 2.0) * beta ** (-k / 2.0)


def _time_factor(kind: str, t: float, alpha: float, r: np.ndarray) -> np.ndarray:
    if kind == "cosine":
        return np.cos(t * alpha * r)
    return sinc_t(t, alpha * r)


def kernel_l2_norm(spec: KernelSpec, t: float, quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Fourier-side norm ``|| e^{-beta|xi|^2} (i xi)^gamma K(t, xi) ||_2``.

    The angular part is the exact monomial integral; the radial part uses
    oscillation-aware panels.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    n, k = spec.dim, spec.order
    power = n + 2 * k - 1
    rq = radial_quadrature(t, spec.alpha, 2.0 * spec.beta, power, quad)
    r, w = rq.nodes()
    tf = _time_factor(spec.kind, t, spec.alpha, r)
    radial = float(w @ (np.exp(-2.0 * spec.beta * r * r) * tf * tf * r**power))
    return math.sqrt(radial * spec.angular_constant())


def kernel_norm_asymptote(spec: KernelSpec) -> float:
    """Large-time limit of :func:`kernel_l2_norm` in the stable regime.

    Cosine kernels tend to a value independent of ``alpha``.  Sine kernels
    carry the ``1/(alpha|xi|)`` factor, so their limit scales exactly like
    ``1/alpha``; ``alpha`` times the limit is ``alpha``-free.
    """
    n, k, beta = spec.dim, spec.order, spec.beta
    A = spec.angular_constant()
    if spec.kind == "cosine":
        return 2.0 ** (-n / 4.0 - k / 2.0 - 1.0) * math.sqrt(
            A * math.gamma(n / 2.0 + k)
        ) * beta ** (-n / 4.0 - k / 2.0)
    if n + 2 * k - 2 <= 0:
        raise RegimeError(
            f"sine kernel with n={n}, |gamma|={k} grows in t; use growth_reference"
        )
    return (
        2.0 ** (-n / 4.0 - k / 2.0 - 0.5)
        * math.sqrt(A * math.gamma(n / 2.0 + k - 1.0))
        * beta ** (-n / 4.0 - k / 2.0 + 0.5)
        / spec.alpha
    )


def growth_reference(n: int, t: float) -> float:
    """Model growth function: ``sqrt(t)`` for n=1 and ``sqrt(log(t+2))`` for n=2.

    Only the shape is returned; the lemma's constants are left unspecified.
    """
    if n == 1:
        return math.sqrt(t)
    if n == 2:
        return math.sqrt(math.log(t + 2.0))
    raise ValueError(f"growth reference is defined for n in {{1, 2}}, got {n}")


# --- remainders of kernel convolutions -------------------------------------


def _taylor_polar(atoms: AtomSum, dim: int, order: int, r, omega) -> np.ndarray:
    """``sum_{|g| <= order} m_g (i xi)^g`` on the polar grid, shape (R, A)."""
    if order > 1:
        raise ValueError("Taylor orders above 1 are not supported")
    zero = (0,) * dim
    out = np.full((r.size, omega.shape[0]), sum(atom_moment(a, zero) for a in atoms), complex)
    if order == 1:
        for l in range(dim):
            e = tuple(int(i == l) for i in range(dim))
            m = sum(atom_moment(a, e) for a in atoms)
            if m:
                out += m * 1j * r[:, None] * omega[None, :, l]
    return out


def kernel_remainder_norm(
    spec: KernelSpec,
    atoms: AtomSum,
    order: int,
    t: float,
    quad: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Norm of ``K * f - sum_{|g| <= order} m_g d^g K`` on the Fourier side.

    ``spec.deriv`` must be zero; the derivatives come from the Taylor terms.
    """
    if any(spec.deriv):
        raise ValueError("remainder norms use the underived kernel")
    n = spec.dim
    d_a = max((a.degree for a in atoms), default=0)
    degree = 2 * max(d_a, order) + (4 if spec.tilde else 0) + quad.angular_extra
    if n == 1:
        omega, wo = np.array([[1.0], [-1.0]]), np.ones(2)
    else:
        omega, wo = sphere_rule(n, degree)
    power = n + 2 * order + 1
    rq = radial_quadrature(t, spec.alpha, 2.0 * spec.beta, power, quad)
    r, w = rq.nodes()
    tf = _time_factor(spec.kind, t, spec.alpha, r) * np.exp(-spec.beta * r * r)
    total = 0.0
    for sl in _chunks(r.size, max(1, 400_000 // max(1, omega.shape[0]))):
        rr = r[sl]
        diff = sum_spectrum_polar(atoms, rr, omega) - _taylor_polar(atoms, n, order, rr, omega)
        if spec.tilde is not None:
            N, k = spec.tilde
            diff = diff * (omega[:, N] * omega[:, k])[None, :]
        ang = (np.abs(diff) ** 2) @ wo
        total += float(w[sl] @ (tf[sl] ** 2 * rr ** (n - 1) * ang))
    return math.sqrt(total)


def _chunks(size: int, step: int):
    for start in range(0, size, step):
        yield slice(start, min(size, start + step))
