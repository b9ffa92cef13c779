import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from elastic_l2.spherical import (
    SphereMonomial,
    k_integrals,
    k_integrals_quadrature,
    monomial_integrand,
    sphere_area,
    sphere_mc_oracle,
    sphere_monomial_integral,
    sphere_rule,
    sphere_vector_integrals,
)

PI = math.pi


@pytest.mark.parametrize(
    "n, beta, expected",
    [
        (2, (0, 0), 2 * PI),
        (3, (2, 0, 0), 4 * PI / 3),
        (3, (1, 0, 0), 0.0),
        (3, (2, 2, 0), 4 * PI / 15),
        (3, (2, 2, 2), 4 * PI / 105),
        (2, (2, 2), PI / 4),
        (4, (0, 0, 0, 0), 2 * PI**2),
    ],
)
def test_monomial_special_cases(n, beta, expected):
    assert sphere_monomial_integral(n, beta) == pytest.approx(expected, rel=1e-15, abs=1e-15)
    assert SphereMonomial(n, beta).value == pytest.approx(expected, rel=1e-15, abs=1e-15)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_product_rule_is_exact_to_degree_8(n, rng):
    omega, w = sphere_rule(n, 8)
    assert np.allclose(np.linalg.norm(omega, axis=1), 1.0)
    for _ in range(20):
        while True:
            beta = rng.integers(0, 9, size=n)
            if beta.sum() <= 8:
                break
        exact = sphere_monomial_integral(n, beta)
        got = float(w @ monomial_integrand(beta)(omega))
        assert got == pytest.approx(exact, rel=1e-12, abs=1e-13)


def test_vector_integrals_examples():
    lin, quad = sphere_vector_integrals(2, [1.0, 0.0], 0)
    assert lin == pytest.approx(PI) and quad == pytest.approx(3 * PI / 4)
    assert sphere_vector_integrals(3, [0.0, 0.0, 0.0], 1) == (0.0, 0.0)
    with pytest.raises(IndexError):
        sphere_vector_integrals(2, [1.0, 0.0], 2)


@given(st.integers(2, 5), st.data())
def test_vector_integrals_against_quadrature(n, data):
    M = data.draw(arrays(float, n, elements=st.floats(-3, 3)))
    k = data.draw(st.integers(0, n - 1))
    omega, w = sphere_rule(n, 6)
    lin, quad = sphere_vector_integrals(n, M, k)
    assert lin == pytest.approx(float(w @ (omega[:, k] * (omega @ M))), abs=1e-11)
    assert quad == pytest.approx(float(w @ (omega[:, k] ** 2 * (omega @ M) ** 2)), abs=1e-10)


def test_k_examples():
    K = k_integrals(2, 0, [[1.0, 0.0], [0.0, 0.0]])
    assert K.as_tuple() == pytest.approx((PI, 3 * PI / 4, 5 * PI / 8), rel=1e-15)
    assert k_integrals(4, 2, np.zeros((4, 4))).as_tuple() == (0.0, 0.0, 0.0)


@given(st.integers(2, 5), st.data())
def test_k_closed_forms_against_product_rule(n, data):
    P = data.draw(arrays(float, (n, n), elements=st.floats(-2, 2)))
    N = data.draw(st.integers(0, n - 1))
    K = k_integrals(n, N, P)
    Kq = k_integrals_quadrature(n, N, P)
    scale = max(1.0, float(np.abs(P).max()) ** 2)
    for a, b in zip(K.as_tuple(), Kq.as_tuple()):
        assert a == pytest.approx(b, abs=1e-10 * scale)
    assert K.K1 >= 0 and K.K3 >= 0


@pytest.mark.parametrize(
    "n, f, exact",
    [
        (3, lambda x: np.ones(len(x)), 4 * PI),
        (2, lambda x: x[:, 0] ** 2 * x[:, 1] ** 2, PI / 4),
        (3, lambda x: (x @ np.array([1.0, 2.0, 3.0])) ** 2, 4 * PI / 3 * 14),
    ],
)
def test_mc_oracle_examples(n, f, exact):
    est, se = sphere_mc_oracle(n, f, 10**6, seed=7)
    if se == 0:
        assert est == pytest.approx(exact, rel=1e-14)
    else:
        assert abs(est - exact) <= 4 * se


def test_mc_oracle_is_deterministic():
    f = monomial_integrand((2, 0, 2))
    assert sphere_mc_oracle(3, f, 5000, seed=3) == sphere_mc_oracle(3, f, 5000, seed=3)
    assert sphere_mc_oracle(3, f, 5000, seed=3) != sphere_mc_oracle(3, f, 5000, seed=4)


@pytest.mark.parametrize("n", [2, 3, 4, 7])
def test_area_matches_gamma_formula(n):
    assert sphere_area(n) == pytest.approx(2 * PI ** (n / 2) / math.gamma(n / 2))
