"""Integrals over the unit sphere S^{n-1}: closed forms, product quadrature, Monte Carlo.

Every angular constant in the package comes from :func:`sphere_monomial_integral`,
the Gamma-function formula for even monomials.  The product rule
:func:`sphere_rule` and the sampler :func:`sphere_mc_oracle` exist to check
those closed forms independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammaln, roots_jacobi


def sphere_area(n: int) -> float:
    """Surface measure of S^{n-1} in R^n (``n = 1`` gives the two-point set)."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def sphere_monomial_integral(n: int, beta: Sequence[int]) -> float:
    """Integral of ``omega**beta`` over S^{n-1}.

    Zero unless every exponent is even; otherwise
    ``2 prod Gamma((b_i + 1)/2) / Gamma((n + |b|)/2)``.
    """
    beta = tuple(int(b) for b in beta)
    if len(beta) != n:
        raise ValueError(f"multi-index {beta} does not have length {n}")
    if any(b < 0 for b in beta):
        raise ValueError(f"negative exponent in {beta}")
    if any(b % 2 for b in beta):
        return 0.0
    logv = sum(gammaln((b + 1) / 2.0) for b in beta) - gammaln((n + sum(beta)) / 2.0)
    return 2.0 * math.exp(logv)


@dataclass(frozen=True)
class SphereMonomial:
    dim: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("sphere monomials are defined for n >= 2")
        object.__setattr__(self, "exponents", tuple(int(b) for b in self.exponents))

    @property
    def value(self) -> float:
        return sphere_monomial_integral(self.dim, self.exponents)


def sphere_vector_integrals(n: int, M: Sequence[float], k: int) -> tuple[float, float]:
    """``(int w_k (w.M) dw, int w_k^2 (w.M)^2 dw)`` for a fixed vector ``M``.

    ``k`` is a zero-based component index.
    """
    M = np.asarray(M, dtype=float)
    if M.shape != (n,):
        raise ValueError(f"M must have shape ({n},), got {M.shape}")
    if not 0 <= k < n:
        raise IndexError(f"component index {k} out of range for n={n}")
    area = sphere_area(n)
    linear = area / n * M[k]
    quadratic = area / (n * (n + 2)) * (float(M @ M) + 2.0 * M[k] ** 2)
    return linear, quadratic


# --- K-integrals ----------------------------------------------------------


@dataclass(frozen=True)
class KIntegrals:
    """The three angular integrals of first-moment vectors used by the dipole bounds."""

    K1: float
    K2: float
    K3: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.K1, self.K2, self.K3)

    def to_dict(self) -> dict:
        return {"K1": self.K1, "K2": self.K2, "K3": self.K3}


def _check_P(n: int, N: int, P) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if P.shape != (n, n):
        raise ValueError(f"P must be {n}x{n}, got {P.shape}")
    if not 0 <= N < n:
        raise IndexError(f"component index {N} out of range for n={n}")
    return P


def k_integrals(n: int, N: int, P) -> KIntegrals:
    """Closed forms for the K-integrals.

    ``P[k, l]`` is the first moment ``p_{k,l}`` (row ``k`` is the vector
    ``P_k``); ``N`` is zero-based.
    """
    if n < 2:
        raise ValueError("K-integrals need n >= 2")
    P = _check_P(n, N, P)
    area = sphere_area(n)
    others = [k for k in range(n) if k != N]
    pNN = P[N, N]

    K1 = area / n * float(P[N] @ P[N])

    K2 = 3.0 * pNN**2 + sum(
        pNN * P[k, k] + P[N, k] * P[k, N] + P[N, k] ** 2 for k in others
    )
    K2 *= area / (n * (n + 2))

    if n == 2:
        # with a single off-index the general bracket collapses; both forms agree
        k = others[0]
        bracket = (
            5.0 * pNN**2
            + P[0, 1] ** 2
            + P[1, 0] ** 2
            + 2.0 * (P[0, 0] * P[1, 1] + P[0, 1] * P[1, 0])
            + P[k, k] ** 2
        )
        K3 = math.pi / 8.0 * bracket
    else:
        diag_sum = sum(P[k, k] for k in others)
        bracket = 15.0 * pNN**2
        bracket += sum(3 * P[N, k] ** 2 + 3 * P[k, N] ** 2 + 2 * P[k, k] ** 2 for k in others)
        bracket += diag_sum**2
        bracket += 6.0 * sum(pNN * P[k, k] + P[N, k] * P[k, N] for k in others)
        bracket += sum(
            (P[k, l] + P[l, k]) ** 2 for i, k in enumerate(others) for l in others[i + 1 :]
        )
        K3 = area / (n * (n + 2) * (n + 4)) * bracket
    return KIntegrals(float(K1), float(K2), float(K3))


def _k_integrands(omega: np.ndarray, N: int, P: np.ndarray):
    proj = omega @ P.T  # proj[:, k] = omega . P_k
    i1 = proj[:, N] ** 2
    i2 = omega[:, N] * proj[:, N] * np.sum(omega * proj, axis=1)
    i3 = omega[:, N] ** 2 * np.sum(omega * proj, axis=1) ** 2
    return i1, i2, i3


def k_integrals_quadrature(n: int, N: int, P, degree: int = 8) -> KIntegrals:
    """K-integrals straight from their definitions with an exact product rule."""
    P = _check_P(n, N, P)
    omega, w = sphere_rule(n, degree)
    return KIntegrals(*(float(w @ f) for f in _k_integrands(omega, N, P)))


# --- product quadrature ---------------------------------------------------


@lru_cache(maxsize=64)
def _sphere_rule_cached(n: int, degree: int) -> tuple[np.ndarray, np.ndarray]:
    if n == 2:
        K = degree + 1
        theta = 2.0 * math.pi * np.arange(K) / K
        omega = np.column_stack([np.cos(theta), np.sin(theta)])
        return omega, np.full(K, 2.0 * math.pi / K)
    # omega = (sqrt(1 - x^2) * eta, x) with eta on S^{n-2}; dS = (1-x^2)^((n-3)/2) dx dS'
    q = max(1, math.ceil((degree + 1) / 2))
    a = (n - 3) / 2.0
    x, wx = roots_jacobi(q, a, a)
    eta, weta = _sphere_rule_cached(n - 1, degree)
    s = np.sqrt(1.0 - x * x)
    omega = np.concatenate(
        [np.column_stack([si * eta, np.full(len(eta), xi)]) for xi, si in zip(x, s)]
    )
    w = np.concatenate([wi * weta for wi in wx])
    return omega, w


def sphere_rule(n: int, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``(A, n)`` and weights ``(A,)`` integrating polynomials of degree
    ``<= degree`` on S^{n-1} exactly (up to rounding).

    ``n = 2`` uses the equispaced trapezoid rule; higher ``n`` recurse through a
    Gauss-Jacobi rule in the last coordinate.
    """
    if n < 2:
        raise ValueError(f"sphere_rule needs n >= 2, got {n}")
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    omega, w = _sphere_rule_cached(int(n), int(degree))
    return omega.copy(), w.copy()


# --- Monte Carlo ----------------------------------------------------------


def sphere_mc_oracle(
    n: int,
    integrand: Callable[[np.ndarray], np.ndarray],
    samples: int = 10**6,
    seed: int = 0,
    chunk: int = 2**17,
) -> tuple[float, float]:
    """Uniform Monte Carlo estimate of an integral over S^{n-1} with its standard error.

    ``integrand`` maps an ``(m, n)`` array of unit vectors to ``(m,)`` values.
    Chunks draw from independent Philox streams spawned from ``seed``, so the
    result depends on ``(samples, seed, chunk)`` only.
    """
    if samples < 1000:
        raise ValueError("at least 1000 samples are required")
    n_chunks = -(-samples // chunk)
    streams = np.random.SeedSequence(seed).spawn(n_chunks)
    total = 0.0
    total_sq = 0.0
    remaining = samples
    for ss in streams:
        m = min(chunk, remaining)
        remaining -= m
        rng = np.random.Generator(np.random.Philox(ss))
        z = rng.standard_normal((m, n))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        vals = np.asarray(integrand(z), dtype=float)
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    area = sphere_area(n)
    return area * mean, area * math.sqrt(var / samples)


def monomial_integrand(beta: Sequence[int]) -> Callable[[np.ndarray], np.ndarray]:
    beta = np.asarray(beta, dtype=int)
    return lambda w: np.prod(w**beta, axis=1)
