"""Execution of the verification experiments E1-E8 and report writing."""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .. import fdtd, spectral
from ..core_model import (
    ConstraintViolation,
    GaussianPolyData,
    atom,
    gaussian_data,
    make_lame,
)
from ..kernels import (
    KernelSpec,
    RegimeError,
    growth_reference,
    kernel_l2_norm,
    kernel_norm_asymptote,
    kernel_remainder_norm,
)
from ..moments import assemble_moments, scalar_moments
from ..spherical import (
    k_integrals,
    k_integrals_quadrature,
    monomial_integrand,
    sphere_area,
    sphere_mc_oracle,
    sphere_monomial_integral,
    sphere_rule,
    sphere_vector_integrals,
)
from .config import ExperimentConfig, check_hypotheses
from .fitting import GrowthFit, block_maxima, fit_growth

REPORT_VERSION = "elastic-l2-report/1"


@dataclass
class Check:
    """One verdict-bearing (or purely informational) comparison."""

    name: str
    value: Any
    target: Any
    tolerance: Any
    passed: bool
    informational: bool = False
    note: str = ""

    def __post_init__(self):
        self.value, self.target, self.tolerance = (_clean(x) for x in (self.value, self.target, self.tolerance))
        self.passed = bool(self.passed)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": _clean(self.value),
            "target": _clean(self.target),
            "tolerance": _clean(self.tolerance),
            "passed": bool(self.passed),
            "informational": self.informational,
            "note": self.note,
        }


@dataclass
class ExperimentReport:
    experiment: str
    config: dict
    hypotheses: list[str]
    moments: dict | None
    checks: list[Check]
    fits: dict[str, GrowthFit] = field(default_factory=dict)
    columns: list[str] = field(default_factory=list)
    rows: list[list[Any]] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def verdict(self) -> bool:
        return all(c.passed for c in self.checks if not c.informational)

    def to_dict(self) -> dict:
        return {
            "report_version": REPORT_VERSION,
            "experiment": self.experiment,
            "verdict": "pass" if self.verdict else "fail",
            "config": self.config,
            "hypotheses_checked": self.hypotheses,
            "moments": self.moments,
            "checks": [c.to_dict() for c in self.checks],
            "fits": {k: v.to_dict() for k, v in sorted(self.fits.items())},
            "extra": _clean(self.extra),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def summary_line(self) -> str:
        failed = [c.name for c in self.checks if not c.informational and not c.passed]
        status = "PASS" if self.verdict else "FAIL"
        tail = f" (failed: {', '.join(failed)})" if failed else ""
        return f"{self.experiment}: {status}{tail}"


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def _multi_indices(n: int, max_order: int):
    for order in range(max_order + 1):
        for combo in itertools.combinations_with_replacement(range(n), order):
            g = [0] * n
            for i in combo:
                g[i] += 1
            yield tuple(g)


# --- E1 -------------------------------------------------------------------------


def _run_e1(cfg: ExperimentConfig, threads: int):
    p = cfg.params
    quad = cfg.quadrature()
    t_eval = float(cfg.times()[-1])
    tol = float(p["tol"])
    alphas = [float(a) for a in p["alphas"]]
    cases = []
    for n in cfg.dims:
        for kind in ("cosine", "sine"):
            for gamma in _multi_indices(n, int(p["max_order"])):
                for beta in cfg.betas:
                    try:
                        kernel_norm_asymptote(KernelSpec(kind, 1.0, beta, gamma, n))
                    except RegimeError:
                        continue
                    cases.append((kind, n, gamma, beta))

    def work(case):
        kind, n, gamma, beta = case
        out = []
        for a in alphas:
            spec = KernelSpec(kind, a, beta, gamma, n)
            out.append((a, kernel_l2_norm(spec, t_eval, quad), kernel_norm_asymptote(spec)))
        return out

    results = spectral.evaluate_series(work, cases, threads)
    rows, max_err, max_spread, max_spread_raw_sine, max_asym_spread = [], 0.0, 0.0, 0.0, 0.0
    for (kind, n, gamma, beta), res in zip(cases, results):
        scaled = []
        asym_scaled = []
        raw = []
        for a, v, asym in res:
            err = _rel(v, asym)
            max_err = max(max_err, err)
            s = v * (a if kind == "sine" else 1.0)
            scaled.append(s)
            raw.append(v)
            asym_scaled.append(asym * (a if kind == "sine" else 1.0))
            rows.append([kind, n, "".join(map(str, gamma)), beta, a, t_eval, v, asym, err, s])
        max_spread = max(max_spread, (max(scaled) - min(scaled)) / min(scaled))
        max_asym_spread = max(max_asym_spread, (max(asym_scaled) - min(asym_scaled)) / min(asym_scaled))
        if kind == "sine":
            max_spread_raw_sine = max(max_spread_raw_sine, (max(raw) - min(raw)) / min(raw))

    checks = [
        Check("max relative error to closed-form limit", max_err, 0.0, tol, max_err <= tol),
        Check(
            "alpha-independence (cosine norms, alpha-scaled sine norms)",
            max_spread, 0.0, tol, max_spread <= tol,
        ),
        Check(
            "alpha-independence of the closed forms (same scaling)",
            max_asym_spread, 0.0, 1e-12, max_asym_spread <= 1e-12,
        ),
        Check(
            "raw sine norms across alpha (scale like 1/alpha, not constant)",
            max_spread_raw_sine, 0.0, tol, max_spread_raw_sine <= tol, informational=True,
            note="the sine kernel carries 1/(alpha|xi|), so only alpha*norm is alpha-free",
        ),
    ]

    # growth regime: ratio to the model function stays in a fixed positive band
    bt = cfg.times(p["bracket_times"])
    extra: dict[str, Any] = {"cases": len(cases), "t_eval": t_eval}
    for n in (1, 2):
        spec = KernelSpec("sine", 1.0, 1.0, (0,) * n, n)
        ratios = spectral.evaluate_series(
            lambda t: kernel_l2_norm(spec, t, quad) / growth_reference(n, t), bt, threads
        )
        lo, hi = min(ratios), max(ratios)
        extra[f"growth_ratio_n{n}"] = {"t": bt, "ratio": ratios}
        checks.append(
            Check(f"n={n} sine norm / growth model bracketed", [lo, hi], "0 < c <= C < inf", None,
                  lo > 0 and math.isfinite(hi))
        )

    # tilde kernels are dominated by the plain ones
    worst = -math.inf
    for n in cfg.dims:
        for kind in ("cosine", "sine"):
            plain = kernel_l2_norm(KernelSpec(kind, 1.0, 1.0, (0,) * n, n), t_eval, quad)
            for N in range(n):
                for k in range(n):
                    tl = kernel_l2_norm(KernelSpec(kind, 1.0, 1.0, (0,) * n, n, (N, k)), t_eval, quad)
                    worst = max(worst, tl / plain)
    checks.append(Check("tilde/plain norm ratio", worst, 1.0, None, worst <= 1.0))
    cols = ["kind", "n", "gamma", "beta", "alpha", "t", "norm", "limit", "rel_err", "alpha_scaled_norm"]
    return checks, {}, cols, rows, extra, None


# --- E2 -------------------------------------------------------------------------


def _run_e2(cfg: ExperimentConfig, threads: int):
    p = cfg.params
    samples = int(p["samples"])
    z_max = float(p["z_max"])
    qtol = float(p["quad_tol"])
    dims = cfg.dims
    rng = np.random.default_rng(cfg.seed)
    cases = []
    kinds = ("monomial", "monomial", "monomial", "vector", "k")
    for i in range(int(p["cases"])):
        n = int(rng.choice(dims))
        kind = kinds[i % len(kinds)]
        if kind == "monomial":
            while True:
                beta = rng.integers(0, int(p["max_degree"]) + 1, size=n)
                if beta.sum() <= int(p["max_degree"]):
                    break
            cases.append((i, "monomial", n, tuple(int(b) for b in beta)))
        elif kind == "vector":
            cases.append((i, "vector", n, (rng.normal(size=n), int(rng.integers(0, n)))))
        else:
            cases.append((i, "k", n, (rng.normal(size=(n, n)), int(rng.integers(0, n)))))

    def integrands(case):
        """(label, closed form, integrand, quadrature value) triples for one case."""
        _, kind, n, arg = case
        omega, w = sphere_rule(n, 8)
        if kind == "monomial":
            f = monomial_integrand(arg)
            return [(f"w^{arg}", sphere_monomial_integral(n, arg), f, float(w @ f(omega)))]
        if kind == "vector":
            M, k = arg
            lin, quadv = sphere_vector_integrals(n, M, k)
            fl = lambda x, M=M, k=k: x[:, k] * (x @ M)
            fq = lambda x, M=M, k=k: x[:, k] ** 2 * (x @ M) ** 2
            return [
                ("linear", lin, fl, float(w @ fl(omega))),
                ("quadratic", quadv, fq, float(w @ fq(omega))),
            ]
        P, N = arg
        K = k_integrals(n, N, P)
        Kq = k_integrals_quadrature(n, N, P)

        def mk(idx, P=P, N=N):
            def f(x):
                proj = x @ P.T
                s = np.sum(x * proj, axis=1)
                return (proj[:, N] ** 2, x[:, N] * proj[:, N] * s, x[:, N] ** 2 * s * s)[idx]

            return f

        return [(f"K{j + 1}", K.as_tuple()[j], mk(j), Kq.as_tuple()[j]) for j in range(3)]

    def work(case):
        out = []
        for j, (label, exact, f, qv) in enumerate(integrands(case)):
            seed = int(np.random.SeedSequence([cfg.seed, case[0], j]).generate_state(1)[0])
            est, se = sphere_mc_oracle(case[2], f, samples, seed)
            z = abs(est - exact) / se if se > 0 else (0.0 if abs(est - exact) < 1e-12 else math.inf)
            out.append((label, exact, est, se, z, qv, abs(qv - exact) / max(1.0, abs(exact))))
        return out

    results = spectral.evaluate_series(work, cases, threads)
    rows = []
    z_all, q_all = [], []
    for case, res in zip(cases, results):
        for label, exact, est, se, z, qv, qerr in res:
            rows.append([case[0], case[1], case[2], label, exact, est, se, z, qv, qerr])
            z_all.append(z)
            q_all.append(qerr)
    checks = [
        Check("max |closed - MC| / stderr", max(z_all), 0.0, z_max, max(z_all) <= z_max),
        Check("max |closed - product rule| (relative)", max(q_all), 0.0, qtol, max(q_all) <= qtol),
    ]

    pi = math.pi
    printed = [
        ("area n=2", sphere_monomial_integral(2, (0, 0)), 2 * pi),
        ("area n=3", sphere_area(3), 4 * pi),
        ("w1^2 n=3", sphere_monomial_integral(3, (2, 0, 0)), 4 * pi / 3),
        ("odd monomial n=3", sphere_monomial_integral(3, (1, 0, 0)), 0.0),
        ("w1^2 w2^2 n=3", sphere_monomial_integral(3, (2, 2, 0)), 4 * pi / 15),
        ("w1^4 n=3", sphere_monomial_integral(3, (4, 0, 0)), 3 * 4 * pi / 15),
        ("w1^2 w2^2 w3^2 n=3", sphere_monomial_integral(3, (2, 2, 2)), 4 * pi / 105),
        ("linear n=2", sphere_vector_integrals(2, [1.0, 0.0], 0)[0], pi),
        ("quadratic n=2", sphere_vector_integrals(2, [1.0, 0.0], 0)[1], 3 * pi / 4),
    ]
    K = k_integrals(2, 0, [[1.0, 0.0], [0.0, 0.0]])
    printed += [("K1 example", K.K1, pi), ("K2 example", K.K2, 3 * pi / 4), ("K3 example", K.K3, 5 * pi / 8)]
    worst = max(abs(v - e) / max(abs(e), 1.0) for _, v, e in printed)
    checks.append(Check("printed special cases", worst, 0.0, 1e-14, worst <= 1e-14))

    # sign properties of the combinations entering the dipole limits
    prng = np.random.default_rng(cfg.seed + 1)
    worst_c = math.inf
    for _ in range(1000):
        n = int(prng.choice(dims))
        P = prng.normal(size=(n, n))
        N = int(prng.integers(0, n))
        Kr = k_integrals(n, N, P)
        scale = max(1.0, Kr.K1 + abs(Kr.K2) + Kr.K3)
        worst_c = min(worst_c, (Kr.K1 - 2 * Kr.K2 + 2 * Kr.K3) / scale, (Kr.K1 - 2 * Kr.K2 + Kr.K3) / scale)
    checks.append(Check("K1-2K2+2K3 and K1-2K2+K3 nonnegative", worst_c, ">= 0", 1e-12, worst_c >= -1e-12))
    cols = ["case", "kind", "n", "label", "closed", "mc", "stderr", "z", "product_rule", "product_rel_err"]
    return checks, {}, cols, rows, {"printed": {k: [v, e] for k, v, e in printed}}, None


# --- time-series helpers ---------------------------------------------------------


def _component_series(ev, ts, quad, threads):
    n = ev.dim
    fn = lambda t: [spectral.component_l2_norm(ev, t, N, quad) for N in range(n)]
    return np.array(spectral.evaluate_series(fn, ts, threads))


def _term_series(ev, tag, beta, ts, quad, threads):
    n = ev.dim
    fn = lambda t: [
        spectral.decomposition_norm(ev, spectral.DecompositionTerm(tag, N, beta), t, quad) for N in range(n)
    ]
    return np.array(spectral.evaluate_series(fn, ts, threads))


def _bounded_checks(label, ts, series, max_ratio, min_fraction):
    lo, hi = float(series.min()), float(series.max())
    return [
        Check(f"{label} max/min", hi / lo if lo > 0 else math.inf, "<=", max_ratio, lo > 0 and hi / lo <= max_ratio),
        Check(
            f"{label} min vs {min_fraction} x value at t={ts[0]:g}",
            lo, min_fraction * float(series[0]), None, lo > min_fraction * float(series[0]),
        ),
    ]


# --- E3 / E4 / E5 ------------------------------------------------------------------


def _run_e3(cfg: ExperimentConfig, threads: int):
    p = cfg.params
    ev = spectral.SolutionEvaluator(cfg.data(), cfg.lame())
    ts = cfg.times()
    quad = cfg.quadrature()
    beta = cfg.beta
    u = _component_series(ev, ts, quad, threads)
    Us = _term_series(ev, "U_s", beta, ts, quad, threads)
    Rs = _term_series(ev, "R_s", beta, ts, quad, threads)
    checks, fits = [], {}
    for N in range(ev.dim):
        fit = fit_growth(ts, u[:, N], "sqrt_log")
        fits[f"u{N}"] = fit
        target = spectral.log_slope_2d(ev, N)
        err = _rel(fit.coefficient, target)
        checks.append(Check(f"u{N} log slope vs derived target", fit.coefficient, target, p["slope_tol"],
                            err <= p["slope_tol"]))
        checks.append(Check(f"u{N} fit R^2", fit.r2, ">=", p["r2_min"], fit.r2 >= p["r2_min"]))
    # the single value pi/8 holds for the component carrying the data only
    if ev.dim == 2:
        fit = fits["u1"]
        checks.append(Check(
            "u1 log slope vs pi/8", fit.coefficient, math.pi / 8, p["slope_tol"],
            _rel(fit.coefficient, math.pi / 8) <= p["slope_tol"], informational=True,
            note="off-diagonal component: the angular weight w_N^2 w_k^2 gives pi/24 here",
        ))
    cols = ["t"] + [f"u{N}" for N in range(ev.dim)] + [f"U_s{N}" for N in range(ev.dim)] + [f"R_s{N}" for N in range(ev.dim)]
    rows = [[t, *u[i], *Us[i], *Rs[i]] for i, t in enumerate(ts)]
    extra = {"targets": [spectral.log_slope_2d(ev, N) for N in range(ev.dim)], "beta": beta}
    return checks, fits, cols, rows, extra, ev


def _run_e4(cfg: ExperimentConfig, threads: int):
    p = cfg.params
    ev = spectral.SolutionEvaluator(cfg.data(), cfg.lame())
    ts = cfg.times()
    quad = cfg.quadrature()
    beta = cfg.beta
    u = _component_series(ev, ts, quad, threads)
    Us = _term_series(ev, "U_s", beta, ts, quad, threads)
    checks = []
    for N in range(ev.dim):
        checks += _bounded_checks(f"u{N}", ts, u[:, N], p["max_ratio"], p["min_fraction"])
    extra = {"beta": beta}
    if ev.moments.M_euclid[1] > 0:
        lb = spectral.lower_bound_u_s(ev, beta)
        lim = [spectral.u_limit_sq(ev, "s", N, beta) ** 0.5 for N in range(ev.dim)]
        extra["U_s_lower_bound"] = lb
        extra["U_s_limits"] = lim
        checks.append(Check("damped U_s at t_max above the lower-bound constant", float(Us[-1].min()), lb, None,
                            float(Us[-1].min()) >= lb * (1 - 1e-6), informational=True,
                            note="the bound is attained by components with M_N = 0"))
    cols = ["t"] + [f"u{N}" for N in range(ev.dim)] + [f"U_s{N}" for N in range(ev.dim)]
    rows = [[t, *u[i], *Us[i]] for i, t in enumerate(ts)]
    return checks, {}, cols, rows, extra, ev


def _run_e5(cfg: ExperimentConfig, threads: int):
    p = cfg.params
    lame = cfg.lame()
    ev = spectral.SolutionEvaluator(cfg.data(), lame)
    ref = spectral.SolutionEvaluator(cfg.data("reference_data"), lame)
    ts = cfg.times()
    quad = cfg.quadrature()
    u = _component_series(ev, ts, quad, threads)
    checks, fits = [], {}
    for N in range(ev.dim):
        fit = fit_growth(ts, u[:, N], "sqrt_log")
        fits[f"u{N}"] = fit
        ref_slope = spectral.log_slope_2d(ref, N)
        frac = abs(fit.coefficient) / ref_slope
        checks.append(Check(f"u{N} |log slope| / monopole slope", frac, "<=", p["slope_fraction"],
                            frac <= p["slope_fraction"]))
        lo, hi = float(u[:, N].min()), float(u[:, N].max())
        checks.append(Check(f"u{N} min > 0", lo, "> 0", None, lo > 0))
        checks.append(Check(f"u{N} max/min", hi / lo if lo > 0 else math.inf, "<=", p["max_ratio"],
                            lo > 0 and hi / lo <= p["max_ratio"]))
    cols = ["t"] + [f"u{N}" for N in range(ev.dim)]
    rows = [[t, *u[i]] for i, t in enumerate(ts)]
    extra = {"reference_slopes": [spectral.log_slope_2d(ref, N) for N in range(ev.dim)]}
    return checks, fits, cols, rows, extra, ev


# --- E6 ----------------------------------------------------------------------------


def _run_e6(cfg: ExperimentConfig, threads: int):
    p = cfg.params
    lame = cfg.lame()
    data = cfg.data()
    ev = spectral.SolutionEvaluator(data, lame)
    quad = cfg.quadrature()
    ts = [float(t) for t in cfg.times()]
    L, G = float(p["L"]), int(p["G"])
    h = 2 * L / G
    checks: list[Check] = []
    extra: dict[str, Any] = {}

    # times the nominal box can represent without wrap-around
    ok = []
    for t in ts:
        try:
            fdtd.make_grid(2, L, G, lame, data, t)
            ok.append(t)
        except ConstraintViolation as exc:
            extra[f"nominal_grid_rejects_t{t:g}"] = str(exc)
    late = [t for t in ts if t not in ok]
    exact = {t: [spectral.component_l2_norm(ev, t, N, quad) for N in range(ev.dim)] for t in ts}
    rows = []

    def run(L_, G_, times):
        grid = fdtd.make_grid(2, L_, G_, lame, data, max(times))
        return fdtd.simulate(data, lame, grid, times)

    fine = run(L, G, ok) if ok else None
    ext = None
    if late:
        # the larger box also samples the early times, so its energy drift is measured
        ext = run(float(p["extended_L"]), int(p["extended_G"]), ts)
        if abs(ext.grid.h - h) > 1e-12:
            extra["extended_grid_note"] = "extended grid spacing differs from the nominal grid"
    coarse = run(L, int(p["coarse_G"]), ok) if ok else None

    worst = 0.0
    for series, label in ((fine, f"G={G},L={L:g}"), (ext, f"G={p['extended_G']},L={p['extended_L']:g}")):
        if series is None:
            continue
        e0 = series.energy[np.isfinite(series.energy)]
        drift = float(np.max(np.abs(e0 - e0[0])) / e0[0]) if e0.size else 0.0
        checks.append(Check(f"energy drift {label}", drift, 0.0, p["energy_drift"], drift <= p["energy_drift"]))
        for i, t in enumerate(series.times):
            for N in range(ev.dim):
                d = _rel(series.norms[i, N], exact[t][N])
                worst = max(worst, d)
                rows.append([t, label, N, series.norms[i, N], exact[t][N], d])
    checks.append(Check("max relative FDTD-spectral difference", worst, 0.0, p["rel_tol"], worst <= p["rel_tol"]))
    if coarse is not None and fine is not None:
        for i, t in enumerate(coarse.times):
            dc = max(_rel(coarse.norms[i, N], exact[t][N]) for N in range(ev.dim))
            df = max(_rel(fine.norms[i, N], exact[t][N]) for N in range(ev.dim))
            for N in range(ev.dim):
                rows.append([t, f"G={p['coarse_G']},L={L:g}", N, coarse.norms[i, N], exact[t][N],
                             _rel(coarse.norms[i, N], exact[t][N])])
            checks.append(Check(f"refinement gain at t={t:g}", dc / df, ">=", p["min_improvement"],
                                dc / df >= p["min_improvement"]))
    if late:
        checks.append(Check("nominal box rejects times beyond its horizon", late, "rejected", None, True,
                            informational=True))
    extra["grids"] = {
        k: s.grid.to_dict() for k, s in (("nominal", fine), ("extended", ext), ("coarse", coarse)) if s is not None
    }
    cols = ["t", "grid", "component", "fdtd_norm", "spectral_norm", "rel_diff"]
    return checks, {}, cols, rows, extra, ev


# --- E7 ----------------------------------------------------------------------------


def _run_e7(cfg: ExperimentConfig, threads: int):
    p = cfg.params
    lame = cfg.lame()
    quad = cfg.quadrature()
    tol = float(p["decoupling_tol"])
    checks: list[Check] = []
    rows: list[list] = []
    extra: dict[str, Any] = {}

    data2 = cfg.data()
    n2 = data2.dim
    g3 = (atom(1.0, (0, 0, 0)),)
    data3 = gaussian_data(3, f1={0: list(g3)})
    worst_cross, worst_scalar = 0.0, 0.0
    rng = np.random.default_rng(cfg.seed)
    for data in (data2, data3):
        ev = spectral.SolutionEvaluator(data, lame)
        n = data.dim
        for t in p["decoupling_times"]:
            norms = [spectral.component_l2_norm(ev, t, N, quad) for N in range(n)]
            w = spectral.wave_scalar_norm(data.f0[0], data.f1[0], lame.alpha2, t, n, quad)
            worst_cross = max(worst_cross, max(norms[1:]) / norms[0])
            worst_scalar = max(worst_scalar, _rel(norms[0], w))
            for _ in range(4):
                xi = rng.normal(size=n)
                uh = spectral.uhat_vector(ev, t, xi)
                worst_cross = max(worst_cross, float(np.max(np.abs(uh[1:]))) / max(abs(uh[0]), 1e-300))
    checks.append(Check("cross-component leakage with lambda+mu=0", worst_cross, 0.0, tol, worst_cross <= tol))
    checks.append(Check("coupled component vs scalar wave norm", worst_scalar, 0.0, tol, worst_scalar <= tol))

    alpha = float(p["scalar_alpha"])
    width = float(p["scalar_width"])
    ts = cfg.times()
    fits = {}
    for n, model in ((1, "sqrt_t"), (2, "sqrt_log")):
        w1 = (atom(1.0, (0,) * n, width),)
        vals = spectral.evaluate_series(lambda t: spectral.wave_scalar_norm((), w1, alpha, t, n, quad), ts, threads)
        fit = fit_growth(ts, vals, model)
        fits[f"scalar_n{n}"] = fit
        target = spectral.wave_growth_slope(w1, alpha, n)
        tol_n = p["sqrt_t_tol"] if n == 1 else p["slope_tol"]
        checks.append(Check(f"n={n} scalar {model} slope", fit.coefficient, target, tol_n,
                            _rel(fit.coefficient, target) <= tol_n))
        if n == 2:
            checks.append(Check("n=2 scalar fit R^2", fit.r2, ">=", p["r2_min"], fit.r2 >= p["r2_min"]))
        rows += [[f"scalar_n{n}", t, v] for t, v in zip(ts, vals)]
    tb = cfg.times(p["bounded_times"])
    w1 = (atom(1.0, (0, 0, 0), width),)
    vals3 = np.array(spectral.evaluate_series(lambda t: spectral.wave_scalar_norm((), w1, alpha, t, 3, quad), tb, threads))
    checks += _bounded_checks("n=3 scalar", tb, vals3, p["max_ratio"], p["min_fraction"])
    rows += [["scalar_n3", t, v] for t, v in zip(tb, vals3)]
    return checks, fits, ["series", "t", "norm"], rows, extra, spectral.SolutionEvaluator(data2, lame)


# --- E8 ----------------------------------------------------------------------------


def _run_e8(cfg: ExperimentConfig, threads: int):
    p = cfg.params
    ev = spectral.SolutionEvaluator(cfg.data(), cfg.lame())
    ts = cfg.times()
    quad = cfg.quadrature()
    beta = cfg.beta
    Rs = _term_series(ev, "R_s", beta, ts, quad, threads)
    Us = _term_series(ev, "U_s", beta, ts, quad, threads)
    ref = np.array([growth_reference(2, t) for t in ts])
    checks: list[Check] = []
    extra: dict[str, Any] = {"beta": beta}
    for N in range(ev.dim):
        ratio = Rs[:, N] / ref
        env = block_maxima(ts, ratio)
        mono = all(b <= a * (1 + 1e-12) for a, b in zip(env, env[1:]))
        slope = spectral.log_slope_2d(ev, N, physical=False)
        bound = p["final_fraction"] * math.sqrt(slope)
        checks.append(Check(f"R_s{N}/sqrt(log(t+2)) envelope nonincreasing", env, "nonincreasing", None, mono))
        checks.append(Check(f"R_s{N}/sqrt(log(t+2)) at t_max", float(ratio[-1]), bound, None,
                            float(ratio[-1]) < bound,
                            note="threshold is the stated fraction of sqrt(log-slope of the damped U_s norm)"))
        extra[f"envelope_{N}"] = env

    # 3-D damping exponents of kernel-convolution remainders
    n3 = 3
    f = (atom(1.0, (0, 0, 0)), atom(1.0, (1, 0, 0)))
    betas = [float(b) for b in p["betas_3d"]]
    t3 = float(p["t_3d"])
    a3 = float(p["alpha_3d"])
    exps = {}
    for kind in ("cosine", "sine"):
        for k in (0, 1):
            vals = []
            for b in betas:
                plain = kernel_remainder_norm(KernelSpec(kind, a3, b, (0,) * n3, n3), f, k, t3, quad)
                tilde = kernel_remainder_norm(KernelSpec(kind, a3, b, (0,) * n3, n3, (0, 0)), f, k, t3, quad)
                vals.append(plain + tilde)
            measured = math.log(vals[1] / vals[0]) / math.log(betas[1] / betas[0])
            shift = 0 if kind == "cosine" else 2
            stated = -(n3 - shift - 1) / 4.0 - (k + 1) / 2.0
            smooth = -(n3 - shift) / 4.0 - (k + 1) / 2.0
            exps[f"{kind}_k{k}"] = {"measured": measured, "stated": stated, "smooth_data": smooth, "norms": vals}
            checks.append(Check(f"3-D {kind} remainder exponent, k={k}", measured, stated, p["exponent_tol"],
                                abs(measured - stated) <= p["exponent_tol"]))
            checks.append(Check(f"3-D {kind} remainder exponent, k={k}, vs smooth-data rate", measured, smooth,
                                p["exponent_tol"], abs(measured - smooth) <= p["exponent_tol"], informational=True,
                                note="for data with all moments finite the remainder is O(|xi|^(k+1))"))
    extra["exponents_3d"] = exps
    cols = ["t"] + [f"R_s{N}" for N in range(ev.dim)] + [f"U_s{N}" for N in range(ev.dim)] + [
        f"ratio{N}" for N in range(ev.dim)
    ]
    rows = [[t, *Rs[i], *Us[i], *(Rs[i] / ref[i])] for i, t in enumerate(ts)]
    return checks, {}, cols, rows, extra, ev


_RUNNERS: dict[str, Callable] = {
    "E1": _run_e1,
    "E2": _run_e2,
    "E3": _run_e3,
    "E4": _run_e4,
    "E5": _run_e5,
    "E6": _run_e6,
    "E7": _run_e7,
    "E8": _run_e8,
}


def run_experiment(config: ExperimentConfig | dict, threads: int = 1) -> ExperimentReport:
    """Validate, check hypotheses, run, and return the report (nothing is written)."""
    cfg = config if isinstance(config, ExperimentConfig) else ExperimentConfig.from_dict(config)
    hyps = check_hypotheses(cfg)
    checks, fits, cols, rows, extra, ev = _RUNNERS[cfg.experiment](cfg, max(1, int(threads)))
    moments = ev.moments.to_dict() if ev is not None else None
    return ExperimentReport(cfg.experiment, cfg.raw, hyps, moments, checks, fits, cols, rows, extra)


def write_report(report: ExperimentReport, out_dir: str | Path, stem: str | None = None) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = stem or report.experiment
    jpath = out / f"{stem}.json"
    cpath = out / f"{stem}.csv"
    jpath.write_text(report.to_json())
    with open(cpath, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(report.columns)
        for row in report.rows:
            wr.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
        if report.fits:
            wr.writerow([])
            wr.writerow(["fit", "model", "coefficient", "intercept", "r2", "t_min", "t_max"])
            for name, fit in sorted(report.fits.items()):
                wr.writerow([name, fit.model, repr(fit.coefficient), repr(fit.intercept), repr(fit.r2), *fit.window])
    return jpath, cpath
