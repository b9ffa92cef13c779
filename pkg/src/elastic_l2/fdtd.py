"""Finite-difference time-domain solver for the Lamé system on a periodic box.

Discretisation
--------------
* collocated grid ``x_i = -L + i h`` with ``h = 2L/G`` on every axis, periodic;
* ``d_k d_k`` is the 3-point second difference and ``d_k d_l`` (k != l) the
  centred 4-corner cross difference ``/(4 h^2)``;
* leapfrog in time, ``u^{m+1} = 2 u^m - u^{m-1} + dt^2 A u^m`` with
  ``A u = mu Lap u + (lambda + mu) grad div u``;
* first step ``u^1 = f0 + dt f1 + dt^2/2 A f0``.

The discrete operator ``-A`` is symmetric positive semidefinite for every
admissible ``(lambda, mu)``, and with ``lambda + mu = 0`` the components
decouple exactly.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .core_model import ConstraintViolation, GaussianPolyData, LameParams, support_radius, sum_value

SNAPSHOT_HEADER = struct.Struct("<qqdd")


@dataclass(frozen=True)
class FdtdGrid:
    """Validated grid; build with :func:`make_grid`."""

    dim: int
    L: float
    G: int
    dt: float
    t_max: float
    alpha_max: float
    r_support: float

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.G

    @property
    def courant(self) -> float:
        return self.alpha_max * self.dt / self.h

    def coords(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.G)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "L": self.L,
            "G": self.G,
            "h": self.h,
            "dt": self.dt,
            "t_max": self.t_max,
            "courant": self.courant,
            "r_support": self.r_support,
        }


def make_grid(
    dim: int,
    L: float,
    G: int,
    lame: LameParams,
    data: GaussianPolyData,
    t_max: float,
    dt: float | None = None,
    courant: float | None = None,
) -> FdtdGrid:
    """Check stability and the no-wrap horizon, then return the grid.

    ``dt`` defaults to the largest step allowed by the Courant limit
    ``alpha dt / h <= 0.5 / sqrt(n)``.
    """
    if dim not in (2, 3):
        raise ConstraintViolation(f"FDTD supports n in {{2, 3}}, got {dim}")
    if data.dim != dim:
        raise ConstraintViolation("data dimension does not match the grid")
    if G < 4 or L <= 0:
        raise ConstraintViolation("need G >= 4 and L > 0")
    h = 2.0 * L / G
    alpha = max(lame.alpha1, lame.alpha2)
    limit = 0.5 / math.sqrt(dim)
    if dt is None:
        dt = (courant if courant is not None else limit) * h / alpha
    if alpha * dt / h > limit * (1.0 + 1e-12):
        raise ConstraintViolation(
            f"CFL violated: alpha*dt/h = {alpha * dt / h:.4f} > {limit:.4f}"
        )
    r_sup = support_radius(data)
    reach = alpha * t_max + r_sup
    if not reach < L:
        raise ConstraintViolation(
            f"no-wrap horizon violated: alpha*T + r_support = {reach:.3f} >= L = {L}"
        )
    return FdtdGrid(dim, float(L), int(G), float(dt), float(t_max), alpha, r_sup)


def commensurate_step(times: Sequence[float], dt_max: float, max_den: int = 1000) -> float:
    """Largest ``dt <= dt_max`` such that every sample time is a whole number of steps."""
    nz = sorted({float(t) for t in times if t > 0})
    if not nz:
        return dt_max
    base = nz[0]
    den = 1
    for t in nz[1:]:
        frac = Fraction(t / base).limit_denominator(max_den)
        if abs(float(frac) * base - t) > 1e-9 * t:
            raise ValueError(f"sample times {nz} are not commensurate")
        den = den * frac.denominator // math.gcd(den, frac.denominator)
    g = base / den
    return g / math.ceil(g / dt_max - 1e-12)


# --- discrete operator -------------------------------------------------------


class _Stencil:
    """Applies ``A`` with a one-cell periodic halo, reusing its buffers."""

    def __init__(self, dim: int, G: int, h: float, lame: LameParams):
        self.dim = dim
        self.inv_h2 = 1.0 / (h * h)
        self.lam_mu = lame.lam + lame.mu
        self.mu = lame.mu
        self.pad = np.empty((dim,) + (G + 2,) * dim)
        self.tmp = np.empty((G,) * dim)

    def _fill(self, u: np.ndarray):
        d = self.dim
        inner = (slice(None),) + (slice(1, -1),) * d
        self.pad[inner] = u
        for ax in range(d):
            a = ax + 1
            lo = [slice(None)] * (d + 1)
            hi = [slice(None)] * (d + 1)
            src_lo = [slice(None)] * (d + 1)
            src_hi = [slice(None)] * (d + 1)
            lo[a], src_lo[a] = 0, -2
            hi[a], src_hi[a] = -1, 1
            self.pad[tuple(lo)] = self.pad[tuple(src_lo)]
            self.pad[tuple(hi)] = self.pad[tuple(src_hi)]

    def _shift(self, c: int, offsets: dict[int, int]) -> np.ndarray:
        idx = [c]
        for ax in range(self.dim):
            o = offsets.get(ax, 0)
            idx.append(slice(1 + o, self.pad.shape[ax + 1] - 1 + o))
        return self.pad[tuple(idx)]

    def apply(self, u: np.ndarray, out: np.ndarray) -> np.ndarray:
        self._fill(u)
        d, tmp = self.dim, self.tmp
        for k in range(d):
            o = out[k]
            o.fill(0.0)
            for l in range(d):
                coef = self.mu + (self.lam_mu if l == k else 0.0)
                if coef == 0.0:
                    continue
                np.add(self._shift(k, {l: 1}), self._shift(k, {l: -1}), out=tmp)
                tmp -= 2.0 * u[k]
                tmp *= coef
                o += tmp
            if self.lam_mu != 0.0:
                for l in range(d):
                    if l == k:
                        continue
                    np.subtract(self._shift(l, {k: 1, l: 1}), self._shift(l, {k: 1, l: -1}), out=tmp)
                    tmp -= self._shift(l, {k: -1, l: 1})
                    tmp += self._shift(l, {k: -1, l: -1})
                    tmp *= 0.25 * self.lam_mu
                    o += tmp
            o *= self.inv_h2
        return out


def apply_operator(u: np.ndarray, h: float, lame: LameParams) -> np.ndarray:
    """``A u`` for a field of shape ``(n, G, ..., G)``."""
    st = _Stencil(u.shape[0], u.shape[1], h, lame)
    return st.apply(u, np.empty_like(u))


def sample_data(data: GaussianPolyData, grid: FdtdGrid) -> tuple[np.ndarray, np.ndarray]:
    x = grid.coords()
    mesh = np.stack(np.meshgrid(*([x] * grid.dim), indexing="ij"), axis=-1)
    f0 = np.stack([sum_value(c, mesh) for c in data.f0])
    f1 = np.stack([sum_value(c, mesh) for c in data.f1])
    return f0, f1


def discrete_norms(u: np.ndarray, h: float) -> np.ndarray:
    n = u.shape[0]
    flat = u.reshape(n, -1)
    return h ** (n / 2.0) * np.sqrt(np.einsum("ki,ki->k", flat, flat))


# --- simulation ------------------------------------------------------------------


@dataclass
class NormSeries:
    """Per-component discrete L2 norms at the requested times."""

    times: np.ndarray
    norms: np.ndarray  # (len(times), n)
    energy: np.ndarray  # discrete energy at each sampled step (nan at t=0)
    grid: FdtdGrid
    steps: int = 0
    snapshots: list[Path] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "times": self.times.tolist(),
            "norms": self.norms.tolist(),
            "energy": self.energy.tolist(),
            "grid": self.grid.to_dict(),
            "steps": self.steps,
        }


def discrete_energy(u_new: np.ndarray, u_old: np.ndarray, Au_old: np.ndarray, dt: float, h: float) -> float:
    """Quantity conserved exactly by leapfrog, evaluated between two levels.

    ``||(u_new - u_old)/dt||^2 - <u_new, A u_old>``, both ``h^n``-weighted.
    """
    n = u_new.shape[0]
    v = (u_new - u_old) / dt
    return float(h**n * (np.vdot(v, v) - np.vdot(u_new, Au_old)))


def simulate(
    data: GaussianPolyData,
    lame: LameParams,
    grid: FdtdGrid,
    t_samples: Sequence[float],
    snapshot_dir: str | Path | None = None,
) -> NormSeries:
    """Leapfrog integration with component norms recorded at ``t_samples``."""
    ts = np.asarray(sorted(float(t) for t in t_samples))
    if ts.size == 0:
        raise ValueError("no sample times")
    if ts[0] < 0 or ts[-1] > grid.t_max * (1 + 1e-12):
        raise ConstraintViolation(f"sample times must lie in [0, {grid.t_max}]")
    dt = commensurate_step(ts, grid.dt)
    h = grid.h
    stencil = _Stencil(grid.dim, grid.G, h, lame)
    targets = {int(round(t / dt)): i for i, t in enumerate(ts)}
    last = max(targets)
    norms = np.zeros((ts.size, grid.dim))
    energy = np.full(ts.size, np.nan)
    snaps: list[Path] = []

    def record(i, u, t):
        norms[i] = discrete_norms(u, h)
        if snapshot_dir is not None:
            p = Path(snapshot_dir) / f"snapshot_t{t:.6g}.bin"
            dump_snapshot(p, u, grid, t)
            snaps.append(p)

    u_prev, f1 = sample_data(data, grid)
    Au = np.empty_like(u_prev)
    if 0 in targets:
        record(targets[0], u_prev, 0.0)
    if last == 0:
        return NormSeries(ts, norms, energy, grid, 0, snaps)

    stencil.apply(u_prev, Au)
    u = u_prev + dt * f1 + 0.5 * dt * dt * Au
    del f1
    for step in range(1, last + 1):
        if step in targets:
            i = targets[step]
            record(i, u, step * dt)
            energy[i] = discrete_energy(u, u_prev, Au, dt, h)
        if step == last:
            break
        stencil.apply(u, Au)
        # u_prev <- 2u - u_prev + dt^2 A u, then swap roles
        np.negative(u_prev, out=u_prev)
        u_prev += 2.0 * u
        Au *= dt * dt
        u_prev += Au
        Au /= dt * dt
        u, u_prev = u_prev, u
    return NormSeries(ts, norms, energy, grid, last, snaps)


# --- snapshots -----------------------------------------------------------------


def dump_snapshot(path: str | Path, u: np.ndarray, grid: FdtdGrid, t: float) -> None:
    """Header ``<int64 n, int64 G, float64 L, float64 t>`` then row-major float64 data."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_HEADER.pack(grid.dim, grid.G, grid.L, float(t)))
        fh.write(np.ascontiguousarray(u, dtype="<f8").tobytes())


def read_snapshot(path: str | Path) -> tuple[dict, np.ndarray]:
    raw = Path(path).read_bytes()
    n, G, L, t = SNAPSHOT_HEADER.unpack_from(raw)
    arr = np.frombuffer(raw, dtype="<f8", offset=SNAPSHOT_HEADER.size)
    return {"n": n, "G": G, "L": L, "t": t}, arr.reshape((n,) + (G,) * n).copy()
