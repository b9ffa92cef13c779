import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from elastic_l2.experiments.fitting import block_maxima, canonical_model, fit_growth


def test_exact_sqrt_log_series():
    t = np.logspace(1, 4, 20)
    fit = fit_growth(t, np.sqrt(3 * np.log(t + 2) + 1), "sqrt_log")
    assert fit.coefficient == pytest.approx(3) and fit.intercept == pytest.approx(1)
    assert fit.r2 == pytest.approx(1.0)


def test_constant_series():
    t = np.linspace(1, 10, 10)
    v = np.full(10, math.sqrt(5))
    assert fit_growth(t, v, "const").coefficient == pytest.approx(5)
    assert fit_growth(t, v, "sqrt_log").coefficient == pytest.approx(0, abs=1e-12)


@given(st.floats(0.01, 100), st.floats(0, 10))
def test_sqrt_t_recovers_slope(a, b):
    t = np.linspace(1, 50, 12)
    fit = fit_growth(t, np.sqrt(a * t + b), "sqrt_t")
    assert fit.coefficient == pytest.approx(a, rel=1e-8)


def test_window_and_errors():
    t = np.arange(1.0, 21.0)
    fit = fit_growth(t, np.sqrt(t), "sqrt_t", window=(5, 15))
    assert fit.window == (5.0, 15.0) and fit.points == 11
    with pytest.raises(ValueError, match="8 points"):
        fit_growth(t[:5], t[:5], "sqrt_t")
    with pytest.raises(ValueError, match="increasing"):
        fit_growth(t[::-1], t, "sqrt_t")
    with pytest.raises(ValueError):
        canonical_model("cubic")


def test_deterministic():
    t = np.logspace(0, 3, 30)
    v = np.sqrt(np.log(t + 2)) * (1 + 0.01 * np.sin(t))
    assert fit_growth(t, v, "sqrt_log") == fit_growth(t, v, "sqrt_log")


def test_block_maxima():
    t = np.logspace(2, 4, 33)
    v = 1.0 / t
    env = block_maxima(t, v)
    assert len(env) == 2
    assert env[0] == pytest.approx(1e-2) and env[1] < env[0]
