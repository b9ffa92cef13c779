"""Oscillation-aware radial quadrature for Gaussian-damped integrands on [0, inf).

Integrands have the shape ``exp(-c r^2) r^p * (bounded oscillation of
frequency <= t * alpha_max)``.  The interval ``[0, r_max]`` is cut into panels
no longer than a fraction of the half-period ``pi / (t alpha_max)`` and no
longer than a fraction of the Gaussian length scale ``1/sqrt(c)``.  Each panel
carries a fixed Gauss-Legendre rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.special import gammaincc, gammainccinv


class QuadratureError(RuntimeError):
    """The requested tail tolerance cannot be met with the given settings."""

    def __init__(self, message: str, tail_estimate: float):
        super().__init__(f"{message} (achieved tail estimate {tail_estimate:.3e})")
        self.tail_estimate = tail_estimate


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy knobs shared by every radial and angular integration.

    Attributes
    ----------
    nodes_per_panel:
        Gauss-Legendre points on each panel.
    tail_tol:
        Relative size allowed for the neglected Gaussian tail beyond ``r_max``.
    panel_fraction:
        Panel width as a fraction of the half oscillation period.
    gauss_fraction:
        Panel width cap as a fraction of the Gaussian length ``1/sqrt(c)``.
    angular_extra:
        Degree margin added on top of the exact polynomial degree in ``omega``.
    r_max:
        Optional forced cut-off; a :class:`QuadratureError` is raised when it
        leaves a tail larger than ``tail_tol``.
    max_nodes:
        Safety cap on the number of radial nodes.
    """

    nodes_per_panel: int = 8
    tail_tol: float = 1e-14
    panel_fraction: float = 1.0
    gauss_fraction: float = 0.25
    angular_extra: int = 2
    r_max: float | None = None
    max_nodes: int = 5_000_000

    def refined(self, factor: int = 2) -> "QuadratureSpec":
        """Same spec with panels ``factor`` times shorter and extra angular degree."""
        return replace(
            self,
            panel_fraction=self.panel_fraction / factor,
            gauss_fraction=self.gauss_fraction / factor,
            angular_extra=self.angular_extra + 2 * factor,
        )

    def to_dict(self) -> dict:
        return {
            "nodes_per_panel": self.nodes_per_panel,
            "tail_tol": self.tail_tol,
            "panel_fraction": self.panel_fraction,
            "gauss_fraction": self.gauss_fraction,
            "angular_extra": self.angular_extra,
            "r_max": self.r_max,
        }


@lru_cache(maxsize=16)
def _gauss_legendre(m: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(m)
    return (x + 1.0) / 2.0, w / 2.0


def gaussian_tail_fraction(decay: float, power: float, r: float) -> float:
    """``int_r^inf e^{-c s^2} s^p ds / int_0^inf e^{-c s^2} s^p ds`` for ``p > -1``."""
    return float(gammaincc((power + 1.0) / 2.0, decay * r * r))


@dataclass(frozen=True)
class RadialQuadrature:
    """A concrete panel partition of ``[0, r_max]`` with its Gauss nodes."""

    r_max: float
    edges: np.ndarray
    nodes_per_panel: int
    oscillation_freq: float
    tail_estimate: float

    @property
    def panels(self) -> list[tuple[float, float]]:
        return list(zip(self.edges[:-1].tolist(), self.edges[1:].tolist()))

    @property
    def n_panels(self) -> int:
        return len(self.edges) - 1

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        x, w = _gauss_legendre(self.nodes_per_panel)
        a = self.edges[:-1, None]
        h = np.diff(self.edges)[:, None]
        return (a + h * x).ravel(), (h * w).ravel()

    def integrate(self, f) -> float:
        r, w = self.nodes()
        return float(w @ f(r))


def radial_quadrature(
    t: float,
    alpha_max: float,
    decay: float,
    power: float,
    spec: QuadratureSpec = QuadratureSpec(),
) -> RadialQuadrature:
    """Build panels for ``int_0^inf e^{-decay r^2} r^power (oscillating) dr``.

    Parameters
    ----------
    t, alpha_max:
        The oscillation frequency in ``r`` is at most ``t * alpha_max``.
    decay:
        Gaussian rate ``c`` of the envelope (``2 beta`` for damped norms).
    power:
        Envelope power ``p > -1`` (typically ``n + 2|gamma| - 1``).
    """
    if decay <= 0.0:
        raise ValueError(f"decay rate must be positive, got {decay}")
    p = max(power, 0.0)
    r_need = math.sqrt(float(gammainccinv((p + 1.0) / 2.0, spec.tail_tol)) / decay)
    if spec.r_max is not None:
        r_max = float(spec.r_max)
        tail = gaussian_tail_fraction(decay, p, r_max)
        if tail > spec.tail_tol:
            raise QuadratureError(
                f"r_max={r_max} is below the required cut-off {r_need:.4g}", tail
            )
    else:
        r_max = r_need
        tail = gaussian_tail_fraction(decay, p, r_max)
    freq = float(t) * float(alpha_max)
    width = spec.gauss_fraction / math.sqrt(decay)
    if freq > 0.0:
        width = min(width, spec.panel_fraction * math.pi / freq)
    n_panels = max(1, math.ceil(r_max / width))
    if n_panels * spec.nodes_per_panel > spec.max_nodes:
        raise QuadratureError(
            f"{n_panels} panels exceed the node budget {spec.max_nodes}", tail
        )
    edges = np.linspace(0.0, r_max, n_panels + 1)
    return RadialQuadrature(r_max, edges, spec.nodes_per_panel, freq, tail)


def sinc_t(t: float, a: np.ndarray) -> np.ndarray:
    """``sin(t a)/a`` evaluated without cancellation near ``a = 0``.

    Equals ``t * sinc(t a)``; below ``|t a| < 1e-4`` a three-term series is used.
    """
    a = np.asarray(a, dtype=float)
    x = t * a
    small = np.abs(x) < 1e-4
    out = np.empty_like(x)
    xs = x[small]
    out[small] = t * (1.0 - xs * xs / 6.0 + xs**4 / 120.0)
    xb = x[~small]
    out[~small] = np.sin(xb) / a[~small]
    return out
