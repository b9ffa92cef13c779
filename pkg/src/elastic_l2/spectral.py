"""Exact Fourier-space solution of the Lamé system and its L2 functionals.

For data ``(f0, f1)`` the N-th component of the solution is, with
``omega = xi/|xi|`` and ``r = |xi|``,

    u_N = c2 g0_N + (c1 - c2) omega_N (omega . g0)
        + s2 g1_N + (s1 - s2) omega_N (omega . g1)

where ``c_i = cos(t alpha_i r)``, ``s_i = sin(t alpha_i r)/(alpha_i r)`` and
``g_j = f_j hat``.  The leading parts ``U`` replace ``g_j`` by the zeroth
moment vector ``M_j``, the refined parts ``U~`` by ``i xi . P_jk``; the
remainders are the differences.  Every term is therefore the same multiplier
applied to a different "effective spectrum", which is how this module
evaluates all of them.

Decomposition norms are Fourier-side; only :func:`component_l2_norm` and
:func:`wave_scalar_norm` convert to physical space.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .core_model import (
    AtomSum,
    GaussianPolyData,
    LameParams,
    data_fourier,
    plancherel_factor,
    sum_spectrum_polar,
)
from .moments import MomentSet, assemble_moments, scalar_moments
from .quadrature import QuadratureSpec, radial_quadrature, sinc_t
from .spherical import k_integrals, sphere_area, sphere_rule

# tag -> (time part, {effective spectrum: sign})
TAGS: dict[str, tuple[str, dict[str, int]]] = {
    "V_c": ("c", {"V": 1}),
    "V_s": ("s", {"V": 1}),
    "U_c": ("c", {"U": 1}),
    "U_s": ("s", {"U": 1}),
    "Ut_c": ("c", {"Ut": 1}),
    "Ut_s": ("s", {"Ut": 1}),
    "R_c": ("c", {"V": 1, "U": -1}),
    "R_s": ("s", {"V": 1, "U": -1}),
    "Rt_c": ("c", {"V": 1, "U": -1, "Ut": -1}),
    "Rt_s": ("s", {"V": 1, "U": -1, "Ut": -1}),
}

_CHUNK_VALUES = 600_000


@dataclass(frozen=True, eq=False)
class SolutionEvaluator:
    """Immutable bundle of data, Lamé constants and the derived moments."""

    data: GaussianPolyData
    lame: LameParams
    moments: MomentSet = field(init=False, repr=False)

    def __post_init__(self):
        if self.data.dim < 2:
            raise ValueError("the elastic system is evaluated for n >= 2 only")
        object.__setattr__(self, "moments", assemble_moments(self.data))

    @property
    def dim(self) -> int:
        return self.data.dim

    @property
    def alpha_max(self) -> float:
        return max(self.lame.alpha1, self.lame.alpha2)


@dataclass(frozen=True)
class DecompositionTerm:
    """One piece of the solution: ``tag`` in :data:`TAGS`, zero-based ``component``."""

    tag: str
    component: int
    damping: float = 0.0

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown term {self.tag!r}; expected one of {sorted(TAGS)}")
        if self.damping < 0:
            raise ValueError("damping must be nonnegative")

    @property
    def part(self) -> str:
        return TAGS[self.tag][0]

    @property
    def pieces(self) -> dict[str, int]:
        return TAGS[self.tag][1]

    def to_dict(self) -> dict:
        return {"tag": self.tag, "component": self.component, "damping": self.damping}


# --- pointwise evaluation ---------------------------------------------------


def _time_factors(lame: LameParams, t: float, r: np.ndarray, part: str):
    if part == "c":
        return np.cos(t * lame.alpha1 * r), np.cos(t * lame.alpha2 * r)
    return sinc_t(t, lame.alpha1 * r), sinc_t(t, lame.alpha2 * r)


def _apply(g: np.ndarray, omega: np.ndarray, N: int, f1: np.ndarray, f2: np.ndarray):
    """``f2 g_N + (f1 - f2) omega_N (omega . g)`` for ``g`` of shape (R, A, n)."""
    proj = np.einsum("rak,ak->ra", g, omega)
    return f2[:, None] * g[..., N] + ((f1 - f2)[:, None] * omega[None, :, N]) * proj


def _effective(ev: SolutionEvaluator, kind: str, j: int, r, omega) -> np.ndarray:
    n = ev.dim
    if kind == "V":
        comps = ev.data.f0 if j == 0 else ev.data.f1
        return np.stack([sum_spectrum_polar(c, r, omega) for c in comps], axis=-1)
    if kind == "U":
        g = np.empty((r.size, omega.shape[0], n), dtype=complex)
        g[...] = ev.moments.m[j]
        return g
    if kind == "Ut":
        proj = omega @ ev.moments.p[j].T  # (A, n): omega . P_k
        return 1j * r[:, None, None] * proj[None, :, :]
    raise ValueError(kind)


def term_polar(
    ev: SolutionEvaluator, tag: str, N: int, t: float, r: np.ndarray, omega: np.ndarray
) -> np.ndarray:
    """Values of one decomposition term on the polar grid ``r * omega``, shape (R, A)."""
    part, pieces = TAGS[tag]
    j = 0 if part == "c" else 1
    g = sum(sign * _effective(ev, kind, j, r, omega) for kind, sign in pieces.items())
    f1, f2 = _time_factors(ev.lame, t, r, part)
    return _apply(g, omega, N, f1, f2)


def uhat_component(ev: SolutionEvaluator, t: float, xi, N: int) -> complex:
    """``u_N hat(t, xi)`` at a single nonzero frequency."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (ev.dim,):
        raise ValueError(f"xi must have shape ({ev.dim},)")
    r = float(np.linalg.norm(xi))
    if r == 0.0:
        raise ValueError("xi = 0 is excluded; the multiplier is evaluated for xi != 0")
    omega = (xi / r)[None, :]
    rr = np.array([r])
    val = term_polar(ev, "V_c", N, t, rr, omega) + term_polar(ev, "V_s", N, t, rr, omega)
    return complex(val[0, 0])


def uhat_vector(ev: SolutionEvaluator, t: float, xi) -> np.ndarray:
    return np.array([uhat_component(ev, t, xi, N) for N in range(ev.dim)])


# --- quadrature plumbing ----------------------------------------------------


def _angular_rule(n: int, degree: int):
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.ones(2)
    return sphere_rule(n, degree)


def _field_degree(ev: SolutionEvaluator) -> int:
    return max(ev.data.max_degree, 1) + 2


def _polar_norm_sq(
    field_fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
    n: int,
    t: float,
    alpha_max: float,
    beta: float,
    decay: float,
    power: float,
    angular_degree: int,
    quad: QuadratureSpec,
) -> float:
    """``int e^{-2 beta r^2} |field|^2 r^{n-1} dr domega`` with chunked evaluation."""
    omega, wo = _angular_rule(n, angular_degree)
    rq = radial_quadrature(t, alpha_max, decay, power, quad)
    r, w = rq.nodes()
    step = max(1, _CHUNK_VALUES // (omega.shape[0] * n))
    total = 0.0
    for start in range(0, r.size, step):
        rr = r[start : start + step]
        vals = field_fn(rr, omega)
        ang = (vals.real**2 + vals.imag**2) @ wo
        total += float(w[start : start + step] @ (np.exp(-2.0 * beta * rr * rr) * rr ** (n - 1) * ang))
    return total


def component_l2_norm(
    ev: SolutionEvaluator, t: float, N: int, quad: QuadratureSpec = QuadratureSpec()
) -> float:
    """Physical-space ``||u_N(t)||_2`` through Plancherel."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    n = ev.dim
    a = ev.data.max_width

    def fn(r, omega):
        return term_polar(ev, "V_c", N, t, r, omega) + term_polar(ev, "V_s", N, t, r, omega)

    total = _polar_norm_sq(
        fn,
        n,
        t,
        ev.alpha_max,
        0.0,
        1.0 / (2.0 * a),
        n - 1 + 2 * ev.data.max_degree,
        2 * _field_degree(ev) + quad.angular_extra,
        quad,
    )
    return plancherel_factor(n) * math.sqrt(total)


def full_l2_norm(ev: SolutionEvaluator, t: float, quad: QuadratureSpec = QuadratureSpec()) -> float:
    return math.sqrt(sum(component_l2_norm(ev, t, N, quad) ** 2 for N in range(ev.dim)))


# --- closed-form angular parts ------------------------------------------------


def _u_bilinear(n: int, N: int, A: np.ndarray, B: np.ndarray):
    """Angular integrals for products of two U-type fields.

    A U-type field is ``a2 A_N + (a1 - a2) omega_N (omega . A)``.  Returns the
    coefficients ``(k22, kx, kdd)`` of ``a2 b2``, ``a2 (b1-b2) + (a1-a2) b2`` and
    ``(a1-a2)(b1-b2)`` in the sphere integral of the product.
    """
    area = sphere_area(n)
    k22 = area * A[N] * B[N]
    kx = area / n * A[N] * B[N]
    kdd = area / (n * (n + 2)) * (float(A @ B) + 2.0 * A[N] * B[N])
    return k22, kx, kdd


def _combine(coefs, a1, a2, b1, b2):
    k22, kx, kdd = coefs
    return k22 * a2 * b2 + kx * (a2 * (b1 - b2) + (a1 - a2) * b2) + kdd * (a1 - a2) * (b1 - b2)


def _closed_form_sq(ev: SolutionEvaluator, term: DecompositionTerm, t: float, quad: QuadratureSpec) -> float:
    n, N, beta = ev.dim, term.component, term.damping
    part = term.part
    j = 0 if part == "c" else 1
    if term.tag.startswith("Ut"):
        K = k_integrals(n, N, ev.moments.p[j])
        coefs = (K.K1, K.K2, K.K3)  # a2^2 K1 + 2 a2 (a1-a2) K2 + (a1-a2)^2 K3
        power = n + 1
    else:
        M = ev.moments.m[j]
        coefs = _u_bilinear(n, N, M, M)
        power = n - 1
    rq = radial_quadrature(t, ev.alpha_max, 2.0 * beta, power, quad)
    r, w = rq.nodes()
    a1, a2 = _time_factors(ev.lame, t, r, part)
    ang = _combine(coefs, a1, a2, a1, a2)
    return float(w @ (np.exp(-2.0 * beta * r * r) * r**power * ang))


def decomposition_norm(
    ev: SolutionEvaluator,
    term: DecompositionTerm,
    t: float,
    quad: QuadratureSpec = QuadratureSpec(),
    method: str = "auto",
) -> float:
    """Fourier-side ``|| e^{-beta |xi|^2} term(t) ||_2``.

    ``method="auto"`` integrates U and U~ terms in angle by closed forms and
    everything else by the product rule; ``"quadrature"`` forces the product rule.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if not 0 <= term.component < ev.dim:
        raise IndexError(f"component {term.component} out of range")
    beta = term.damping
    has_spectrum = "V" in term.pieces
    pure_spectrum = set(term.pieces) == {"V"}
    if beta <= 0.0 and not pure_spectrum:
        raise ValueError(f"term {term.tag} needs damping beta > 0 to be square integrable")
    if method not in ("auto", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto" and not has_spectrum:
        return math.sqrt(max(_closed_form_sq(ev, term, t, quad), 0.0))

    n = ev.dim
    decay = 2.0 * beta + (1.0 / (2.0 * ev.data.max_width) if pure_spectrum else 0.0)
    power = n - 1 + 2 * max(ev.data.max_degree, 1)

    def fn(r, omega):
        return term_polar(ev, term.tag, term.component, t, r, omega)

    total = _polar_norm_sq(
        fn, n, t, ev.alpha_max, beta, decay, power, 2 * _field_degree(ev) + quad.angular_extra, quad
    )
    return math.sqrt(total)


def u_cross_term(
    ev: SolutionEvaluator, N: int, beta: float, t: float, quad: QuadratureSpec = QuadratureSpec()
) -> float:
    """``int e^{-2 beta |xi|^2} U_{N,c} U_{N,s} dxi`` (both factors are real)."""
    n = ev.dim
    coefs = _u_bilinear(n, N, ev.moments.m[0], ev.moments.m[1])
    rq = radial_quadrature(t, ev.alpha_max, 2.0 * beta, n - 1, quad)
    r, w = rq.nodes()
    c1, c2 = _time_factors(ev.lame, t, r, "c")
    s1, s2 = _time_factors(ev.lame, t, r, "s")
    return float(w @ (np.exp(-2.0 * beta * r * r) * r ** (n - 1) * _combine(coefs, c1, c2, s1, s2)))


# --- large-time constants -----------------------------------------------------


def _pair_average(alpha_a: float, alpha_b: float) -> float:
    """Time average of ``cos(t a r) cos(t b r)`` (or of the sines): 1/2 iff equal speeds."""
    return 0.5 if alpha_a == alpha_b else 0.0


def _averaged(coefs, lame: LameParams, part: str) -> float:
    """Large-time average of ``_combine(coefs, a1, a2, a1, a2)``.

    For the sine part the factor ``1/r^2`` is pulled out: the result is the
    coefficient multiplying ``r^{-2}``.
    """
    k22, kx, kdd = coefs
    al1, al2 = lame.alpha1, lame.alpha2
    sc = (lambda a, b: 1.0 / (a * b)) if part == "s" else (lambda a, b: 1.0)
    avg11 = _pair_average(al1, al1) * sc(al1, al1)
    avg22 = _pair_average(al2, al2) * sc(al2, al2)
    avg12 = _pair_average(al1, al2) * sc(al1, al2)
    # a2^2 (k22 - 2kx + kdd) + 2 a1 a2 (kx - kdd) + a1^2 kdd
    return (k22 - 2.0 * kx + kdd) * avg22 + 2.0 * (kx - kdd) * avg12 + kdd * avg11


def _radial(k: float, beta: float) -> float:
    return 2.0 ** (-k / 2.0 - 1.0) * math.gamma(k / 2.0) * beta ** (-k / 2.0)


def u_limit_sq(ev: SolutionEvaluator, part: str, N: int, beta: float) -> float:
    """Large-time limit of ``||e^{-beta|xi|^2} U_{N,part}||^2`` (sine part needs n >= 3)."""
    n = ev.dim
    j = 0 if part == "c" else 1
    M = ev.moments.m[j]
    avg = _averaged(_u_bilinear(n, N, M, M), ev.lame, part)
    if part == "c":
        return avg * _radial(n, beta)
    if n < 3:
        raise ValueError("the damped sine part grows like log t for n = 2; see log_slope_2d")
    return avg * _radial(n - 2, beta)


def ut_limit_sq(ev: SolutionEvaluator, part: str, N: int, beta: float) -> float:
    """Large-time limit of ``||e^{-beta|xi|^2} U~_{N,part}||^2``."""
    n = ev.dim
    j = 0 if part == "c" else 1
    K = k_integrals(n, N, ev.moments.p[j])
    # rewrite K1 a2^2 + 2K2 a2(a1-a2) + K3 (a1-a2)^2 in the _u_bilinear basis
    coefs = (K.K1, K.K2, K.K3)
    avg = _averaged(coefs, ev.lame, part)
    return avg * (_radial(n + 2, beta) if part == "c" else _radial(n, beta))


def lower_bound_u_c(ev: SolutionEvaluator, beta: float) -> float:
    """Large-time lower bound for ``||e^{-beta|xi|^2} U_{N,c}||`` valid for every N."""
    n = ev.dim
    Mabs = float(ev.moments.M_euclid[0])
    return Mabs * math.sqrt(
        sphere_area(n) / (n * (n + 2)) * 2.0 ** (-n / 2.0 - 1.0) * math.gamma(n / 2.0)
    ) * beta ** (-n / 4.0)


def lower_bound_u_s(ev: SolutionEvaluator, beta: float) -> float:
    """Large-time lower bound for ``||e^{-beta|xi|^2} U_{N,s}||`` (n >= 3)."""
    n = ev.dim
    if n < 3:
        raise ValueError("n >= 3 required")
    a1, a2 = ev.lame.alpha1, ev.lame.alpha2
    Mabs = float(ev.moments.M_euclid[1])
    speed = 1.0 / (2.0 * a1 * a1) + 1.0 / (2.0 * a2 * a2)
    return Mabs * math.sqrt(
        sphere_area(n) / (n * (n + 2)) * 2.0 ** (-n / 2.0) * math.gamma(n / 2.0 - 1.0) * speed
    ) * beta ** (-(n - 2) / 4.0)


def log_slope_2d(ev: SolutionEvaluator, N: int, physical: bool = True) -> float:
    """Coefficient of ``log t`` in ``||u_N(t)||^2`` for n = 2.

    Only the zeroth moment of ``f1`` contributes.  With ``physical=False`` the
    Fourier-side coefficient (no ``(2 pi)^-2``) is returned, which is also the
    slope of the damped ``U_{N,s}`` norm for any ``beta``.
    """
    if ev.dim != 2:
        raise ValueError("log growth occurs for n = 2 only")
    M = ev.moments.m[1]
    coefs = _u_bilinear(2, N, M, M)
    # int_0 e^{-2 beta r^2} sin(t a r) sin(t b r) r^{-1} dr = [a == b] log(t)/2 + O(1)
    slope = _averaged(coefs, ev.lame, "s")
    return slope * (plancherel_factor(2) ** 2 if physical else 1.0)


# --- scalar wave equation ------------------------------------------------------


def wave_scalar_norm(
    w0: AtomSum,
    w1: AtomSum,
    alpha: float,
    t: float,
    n: int,
    quad: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Physical L2 norm of the solution of ``w_tt = alpha^2 Laplace w``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    atoms = tuple(w0) + tuple(w1)
    if not atoms:
        return 0.0
    d_a = max(a.degree for a in atoms)
    a_max = max(a.width for a in atoms)

    def fn(r, omega):
        g0 = sum_spectrum_polar(tuple(w0), r, omega)
        g1 = sum_spectrum_polar(tuple(w1), r, omega)
        return np.cos(t * alpha * r)[:, None] * g0 + sinc_t(t, alpha * r)[:, None] * g1

    total = _polar_norm_sq(
        fn, n, t, alpha, 0.0, 1.0 / (2.0 * a_max), n - 1 + 2 * d_a, 2 * d_a + quad.angular_extra, quad
    )
    return plancherel_factor(n) * math.sqrt(total)


def wave_growth_slope(w1: AtomSum, alpha: float, n: int) -> float:
    """Leading coefficient of ``||w(t)||^2``: against ``t`` (n=1) or ``log t`` (n=2)."""
    m, _ = scalar_moments(tuple(w1), n)
    if n == 1:
        return m * m / (2.0 * alpha)
    if n == 2:
        return m * m / (4.0 * math.pi * alpha * alpha)
    raise ValueError("the scalar norm stays bounded for n >= 3")


# --- series helpers --------------------------------------------------------------


def log_time_grid(t_min: float, t_max: float, per_decade: int = 16) -> np.ndarray:
    """Log-spaced times including both end points."""
    if not 0 < t_min < t_max:
        raise ValueError("need 0 < t_min < t_max")
    count = max(2, int(round(per_decade * math.log10(t_max / t_min))) + 1)
    return np.logspace(math.log10(t_min), math.log10(t_max), count)


def evaluate_series(fn: Callable[[float], float], ts: Iterable[float], threads: int = 1) -> list[float]:
    """Map ``fn`` over ``ts``; results keep the input order whatever the thread count."""
    ts = list(ts)
    if threads <= 1:
        return [fn(t) for t in ts]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, ts))
