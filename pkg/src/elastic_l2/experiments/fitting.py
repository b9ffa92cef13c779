"""Least-squares growth-law fits of squared norms."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

MODELS = ("constant", "sqrt_t", "sqrt_log")
_ALIASES = {"const": "constant"}


def canonical_model(name: str) -> str:
    name = _ALIASES.get(name, name)
    if name not in MODELS:
        raise ValueError(f"unknown growth model {name!r}; choose from {MODELS}")
    return name


def regressor(model: str, t: np.ndarray) -> np.ndarray:
    model = canonical_model(model)
    if model == "sqrt_t":
        return np.asarray(t, dtype=float)
    if model == "sqrt_log":
        return np.log(np.asarray(t, dtype=float) + 2.0)
    return np.ones_like(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class GrowthFit:
    """``value^2 ~ coefficient * x + intercept`` on ``window``.

    For the constant model the coefficient is the mean of ``value^2`` and
    the intercept is zero.
    """

    model: str
    coefficient: float
    intercept: float
    r2: float
    window: tuple[float, float]
    points: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["window"] = list(self.window)
        return d


def fit_growth(
    t: Sequence[float],
    values: Sequence[float],
    model: str,
    window: tuple[float, float] | None = None,
) -> GrowthFit:
    """Fit ``values**2`` against the model regressor (``t``, ``log(t+2)`` or 1)."""
    model = canonical_model(model)
    t = np.asarray(t, dtype=float)
    y = np.asarray(values, dtype=float) ** 2
    if t.shape != y.shape or t.ndim != 1:
        raise ValueError("t and values must be 1-D arrays of equal length")
    if window is not None:
        keep = (t >= window[0]) & (t <= window[1])
        t, y = t[keep], y[keep]
    if t.size < 8:
        raise ValueError(f"at least 8 points are required, got {t.size}")
    if np.any(np.diff(t) <= 0):
        raise ValueError("t must be strictly increasing")
    win = (float(t[0]), float(t[-1]))
    ss_tot = float(np.sum((y - y.mean()) ** 2))

    if model == "constant":
        c = float(y.mean())
        return GrowthFit(model, c, 0.0, _r2(ss_tot, ss_tot), win, int(t.size))

    x = regressor(model, t)
    if np.ptp(x) == 0.0:
        raise ValueError("degenerate regressor: all abscissae coincide")
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ np.array([slope, intercept])
    return GrowthFit(model, float(slope), float(intercept), _r2(float(resid @ resid), ss_tot), win, int(t.size))


def _r2(ss_res: float, ss_tot: float) -> float:
    if ss_tot == 0.0:
        return 1.0 if ss_res <= 1e-300 else 0.0
    return 1.0 - ss_res / ss_tot


def block_maxima(t: Sequence[float], values: Sequence[float], per_block: float = 10.0) -> list[float]:
    """Maxima of ``values`` over consecutive blocks ``[t0 b^k, t0 b^(k+1))`` of the time axis."""
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    idx = np.floor(np.log(t / t[0]) / math.log(per_block) + 1e-9).astype(int)
    # a final point sitting exactly on a block edge belongs to the last full block
    if idx.size > 1 and idx[-1] > idx[-2]:
        idx[-1] = idx[-2]
    return [float(v[idx == k].max()) for k in np.unique(idx)]
