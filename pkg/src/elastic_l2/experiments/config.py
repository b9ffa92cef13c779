"""Experiment configuration: JSON schema, defaults and hypothesis checks."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from ..core_model import GaussianPolyData, LameParams, make_lame
from ..moments import assemble_moments
from ..quadrature import QuadratureSpec

SCHEMA_VERSION = "elastic-l2-config/1"
EXPERIMENTS = ("E1", "E2", "E3", "E4", "E5", "E6", "E7", "E8")

DESCRIPTIONS = {
    "E1": "damped kernel norms against their large-time closed forms",
    "E2": "sphere integrals: closed forms against Monte Carlo and product quadrature",
    "E3": "2-D monopole: logarithmic growth of each component with derived slope",
    "E4": "3-D monopole: bounded and nonvanishing component norms",
    "E5": "2-D zero-mean dipole: no logarithmic growth, bounded below",
    "E6": "finite-difference cross-check of the spectral norms",
    "E7": "scalar wave reduction and dimension-dependent scalar growth",
    "E8": "remainder terms: 2-D decay relative to log growth, 3-D damping exponents",
}

_atom = {
    "type": "object",
    "required": ["coeff", "gamma"],
    "properties": {
        "coeff": {"type": "number"},
        "gamma": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "width": {"type": "number", "exclusiveMinimum": 0},
    },
    "additionalProperties": False,
}
_comps = {"type": "array", "items": {"type": "array", "items": _atom}}
_num_or_list = {
    "oneOf": [
        {"type": "number", "exclusiveMinimum": 0},
        {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
    ]
}

CONFIG_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["experiment", "dim", "lame", "data", "beta", "t_grid", "seed"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "experiment": {"enum": list(EXPERIMENTS)},
        "dim": {
            "oneOf": [
                {"type": "integer", "minimum": 1, "maximum": 4},
                {"type": "array", "items": {"type": "integer", "minimum": 1, "maximum": 4}},
            ]
        },
        "lame": {
            "type": "object",
            "required": ["lambda", "mu"],
            "properties": {"lambda": {"type": "number"}, "mu": {"type": "number"}},
            "additionalProperties": False,
        },
        "data": {
            "type": "object",
            "properties": {"f0": _comps, "f1": _comps},
            "additionalProperties": False,
        },
        "beta": _num_or_list,
        "t_grid": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["t_min", "t_max"],
                    "properties": {
                        "t_min": {"type": "number", "exclusiveMinimum": 0},
                        "t_max": {"type": "number", "exclusiveMinimum": 0},
                        "per_decade": {"type": "integer", "minimum": 1},
                    },
                    "additionalProperties": False,
                },
                {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1},
            ]
        },
        "seed": {"type": "integer", "minimum": 0},
        "quadrature": {
            "type": "object",
            "properties": {
                "nodes_per_panel": {"type": "integer", "minimum": 2},
                "tail_tol": {"type": "number", "exclusiveMinimum": 0},
                "panel_fraction": {"type": "number", "exclusiveMinimum": 0},
                "gauss_fraction": {"type": "number", "exclusiveMinimum": 0},
                "angular_extra": {"type": "integer", "minimum": 0},
            },
            "additionalProperties": False,
        },
        "output": {
            "type": "object",
            "properties": {"dir": {"type": "string"}, "stem": {"type": "string"}},
            "additionalProperties": False,
        },
        "params": {"type": "object"},
    },
    "additionalProperties": False,
}


class ConfigError(ValueError):
    """Schema violation; the message names the offending field."""


class HypothesisError(ValueError):
    """The configured data does not satisfy the hypothesis the experiment tests."""


def _g(width=1.0, *gamma):
    return {"coeff": 1.0, "gamma": list(gamma), "width": width}


def _empty(n):
    return [[] for _ in range(n)]


def _first_comp(n, atoms):
    out = _empty(n)
    out[0] = atoms
    return out


_DEFAULTS: dict[str, dict[str, Any]] = {
    "E1": {
        "dim": [2, 3],
        "lame": {"lambda": 1.0, "mu": 1.0},
        "data": {"f0": [], "f1": []},
        "beta": [1.0, 4.0],
        "t_grid": [1000.0],
        "params": {
            "alphas": [0.5, 1.0, 2.0],
            "max_order": 2,
            "tol": 1e-3,
            "bracket_times": {"t_min": 10.0, "t_max": 10000.0, "per_decade": 4},
        },
    },
    "E2": {
        "dim": [2, 3, 4],
        "lame": {"lambda": 1.0, "mu": 1.0},
        "data": {"f0": [], "f1": []},
        "beta": 1.0,
        "t_grid": [0.0],
        "params": {"cases": 200, "samples": 1000000, "max_degree": 6, "z_max": 4.0, "quad_tol": 1e-10},
    },
    "E3": {
        "dim": 2,
        "lame": {"lambda": 1.0, "mu": 1.0},
        "data": {"f0": _empty(2), "f1": _first_comp(2, [_g(1.0, 0, 0)])},
        "beta": 1.0,
        "t_grid": {"t_min": 100.0, "t_max": 10000.0, "per_decade": 16},
        "params": {"slope_tol": 0.05, "r2_min": 0.99},
    },
    "E4": {
        "dim": 3,
        "lame": {"lambda": 1.0, "mu": 1.0},
        "data": {"f0": _empty(3), "f1": _first_comp(3, [_g(1.0, 0, 0, 0)])},
        "beta": 1.0,
        "t_grid": {"t_min": 10.0, "t_max": 1000.0, "per_decade": 16},
        "params": {"max_ratio": 3.0, "min_fraction": 0.1},
    },
    "E5": {
        "dim": 2,
        "lame": {"lambda": 1.0, "mu": 1.0},
        "data": {"f0": _empty(2), "f1": _first_comp(2, [_g(1.0, 1, 0)])},
        "beta": 1.0,
        "t_grid": {"t_min": 100.0, "t_max": 10000.0, "per_decade": 16},
        "params": {
            "slope_fraction": 0.02,
            "max_ratio": 3.0,
            "reference_data": {"f0": _empty(2), "f1": _first_comp(2, [_g(1.0, 0, 0)])},
        },
    },
    "E6": {
        "dim": 2,
        "lame": {"lambda": 1.0, "mu": 1.0},
        "data": {"f0": _empty(2), "f1": _first_comp(2, [_g(1.0, 0, 0)])},
        "beta": 1.0,
        "t_grid": [10.0, 20.0, 40.0],
        "params": {
            "L": 60.0,
            "G": 1024,
            "extended_L": 75.0,
            "extended_G": 1280,
            "coarse_G": 512,
            "rel_tol": 0.01,
            "min_improvement": 3.0,
            "energy_drift": 1e-3,
        },
    },
    "E7": {
        "dim": 2,
        "lame": {"lambda": -1.0, "mu": 1.0},
        "data": {
            "f0": _first_comp(2, [{"coeff": 0.5, "gamma": [1, 0], "width": 1.5}]),
            "f1": _first_comp(2, [_g(1.0, 0, 0)]),
        },
        "beta": 1.0,
        "t_grid": {"t_min": 100.0, "t_max": 10000.0, "per_decade": 16},
        "params": {
            "decoupling_tol": 1e-10,
            "scalar_alpha": 1.0,
            "scalar_width": 1.0,
            "decoupling_times": [0.5, 3.0, 25.0],
            "sqrt_t_tol": 0.03,
            "slope_tol": 0.05,
            "r2_min": 0.99,
            "bounded_times": {"t_min": 10.0, "t_max": 1000.0, "per_decade": 16},
            "max_ratio": 3.0,
            "min_fraction": 0.1,
        },
    },
    "E8": {
        "dim": 2,
        "lame": {"lambda": 1.0, "mu": 1.0},
        "data": {"f0": _empty(2), "f1": _first_comp(2, [_g(1.0, 0, 0)])},
        "beta": 1.0,
        "t_grid": {"t_min": 100.0, "t_max": 10000.0, "per_decade": 16},
        "params": {
            "final_fraction": 0.05,
            "betas_3d": [16.0, 256.0],
            "t_3d": 1000.0,
            "exponent_tol": 0.15,
            "alpha_3d": 1.0,
        },
    },
}


def default_config(experiment: str) -> dict[str, Any]:
    if experiment not in _DEFAULTS:
        raise ConfigError(f"unknown experiment {experiment!r}; expected one of {EXPERIMENTS}")
    cfg = {"schema": SCHEMA_VERSION, "experiment": experiment, "seed": 7}
    cfg.update(copy.deepcopy(_DEFAULTS[experiment]))
    return cfg


def validate_config(cfg: dict[str, Any]) -> dict[str, Any]:
    """Validate against :data:`CONFIG_SCHEMA`; the error names the failing field."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.path))
    if errors:
        err = errors[0]
        if err.validator == "required":
            missing = [f for f in err.validator_value if f not in err.instance]
            where = "/".join(str(p) for p in err.path)
            prefix = f"{where}/" if where else ""
            raise ConfigError(f"missing required field: {prefix}{missing[0]}")
        where = "/".join(str(p) for p in err.path) or "<root>"
        raise ConfigError(f"invalid field {where}: {err.message}")
    return cfg


def load_config(path: str | Path) -> dict[str, Any]:
    with open(path) as fh:
        return validate_config(json.load(fh))


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated configuration with typed accessors."""

    raw: dict[str, Any]

    @classmethod
    def from_dict(cls, cfg: dict[str, Any]) -> "ExperimentConfig":
        return cls(validate_config(copy.deepcopy(cfg)))

    @property
    def experiment(self) -> str:
        return self.raw["experiment"]

    @property
    def seed(self) -> int:
        return int(self.raw["seed"])

    @property
    def params(self) -> dict[str, Any]:
        merged = copy.deepcopy(_DEFAULTS[self.experiment].get("params", {}))
        merged.update(self.raw.get("params", {}))
        return merged

    @property
    def dims(self) -> list[int]:
        d = self.raw["dim"]
        return list(d) if isinstance(d, list) else [int(d)]

    @property
    def dim(self) -> int:
        dims = self.dims
        if len(dims) != 1:
            raise ConfigError(f"experiment {self.experiment} needs a single dimension")
        return dims[0]

    @property
    def betas(self) -> list[float]:
        b = self.raw["beta"]
        return [float(x) for x in b] if isinstance(b, list) else [float(b)]

    @property
    def beta(self) -> float:
        return self.betas[0]

    def lame(self) -> LameParams:
        return make_lame(self.raw["lame"]["lambda"], self.raw["lame"]["mu"])

    def data(self, key: str = "data") -> GaussianPolyData:
        src = self.raw["data"] if key == "data" else self.params[key]
        n = self.dim
        d = {"dim": n, "f0": src.get("f0") or _empty(n), "f1": src.get("f1") or _empty(n)}
        return GaussianPolyData.from_dict(d)

    def times(self, spec=None) -> np.ndarray:
        from ..spectral import log_time_grid

        spec = self.raw["t_grid"] if spec is None else spec
        if isinstance(spec, list):
            return np.asarray(spec, dtype=float)
        return log_time_grid(spec["t_min"], spec["t_max"], spec.get("per_decade", 16))

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(**self.raw.get("quadrature", {}))

    def output_dir(self, override: str | Path | None = None) -> Path:
        if override is not None:
            return Path(override)
        return Path(self.raw.get("output", {}).get("dir", "reports"))


# --- hypotheses ---------------------------------------------------------------------


def check_hypotheses(cfg: ExperimentConfig) -> list[str]:
    """Raise :class:`HypothesisError` naming the first violated hypothesis.

    Returns the list of hypotheses that were checked, for the report.
    """
    exp = cfg.experiment
    checked: list[str] = []

    def need(cond: bool, text: str):
        checked.append(text)
        if not cond:
            raise HypothesisError(f"{exp}: hypothesis violated: {text}")

    if exp in ("E1", "E2"):
        need(all(2 <= n <= 4 for n in cfg.dims), "dimensions lie in {2, 3, 4}")
        return checked
    lame = cfg.lame()
    n = cfg.dim
    mom = assemble_moments(cfg.data())
    M0, M1 = mom.M_abs
    P_any = bool(np.any(mom.P_abs > 0))
    if exp == "E3":
        need(n == 2, "n = 2")
        need(M1 > 0, "|M_1| != 0 (initial velocity with nonzero mean)")
    elif exp == "E4":
        need(n >= 3, "n >= 3")
        need(M0 > 0 or M1 > 0, "|M_0| + |M_1| != 0")
    elif exp == "E5":
        need(n == 2, "n = 2")
        need(M0 == 0 and M1 == 0, "|M_0| = |M_1| = 0 (zero-mean data)")
        need(P_any, "some |P_jk| != 0 (nonzero dipole moment)")
    elif exp == "E6":
        need(n == 2, "n = 2 for the finite-difference comparison")
    elif exp == "E7":
        need(lame.scalar_reduction, "lambda + mu = 0 (scalar reduction)")
        need(M1 > 0, "|M_1| != 0 for the scalar growth runs")
    elif exp == "E8":
        need(n == 2, "n = 2")
        need(M1 > 0, "|M_1| != 0 (initial velocity with nonzero mean)")
    return checked
