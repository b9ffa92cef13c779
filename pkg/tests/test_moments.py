import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from elastic_l2 import assemble_moments, atom, gaussian_data
from elastic_l2.core_model import atom_value
from elastic_l2.moments import atom_moment, scalar_moments
from elastic_l2.spherical import k_integrals

from conftest import atom_strategy, random_atoms


@pytest.mark.parametrize(
    "gamma, beta, expected",
    [
        ((0, 0), (0, 0), math.pi),
        ((1, 0), (1, 0), -math.pi / 2),
        ((1, 0), (0, 0), 0.0),
        ((1, 0), (0, 1), 0.0),
        ((2, 0), (0, 0), math.pi / 2),
    ],
)
def test_atom_moment_examples(gamma, beta, expected):
    assert atom_moment(atom(1.0, gamma), beta) == pytest.approx(expected, abs=1e-15)


def test_higher_moments_rejected():
    with pytest.raises(ValueError):
        atom_moment(atom(1.0, (0, 0)), (1, 1))


def test_monopole_and_dipole_data():
    mono = assemble_moments(gaussian_data(2, f1={0: [atom(1.0, (0, 0))]}))
    assert mono.m[1].tolist() == [pytest.approx(math.pi), 0.0]
    assert mono.M_abs[1] == pytest.approx(math.pi)
    assert not np.any(mono.p)
    dip = assemble_moments(gaussian_data(2, f1={0: [atom(1.0, (1, 0))]}))
    assert dip.M_abs[1] == 0.0
    assert dip.p[1, 0, 0] == pytest.approx(-math.pi / 2)
    assert dip.P_abs[1, 0] == pytest.approx(math.pi / 2)
    zero = assemble_moments(gaussian_data(3))
    assert not np.any(zero.m) and not np.any(zero.p) and not np.any(zero.PP_abs)


def _grid_moments(atoms, dim=2, half=9.0, pts=361):
    x = np.linspace(-half, half, pts)
    h = x[1] - x[0]
    X = np.stack(np.meshgrid(*([x] * dim), indexing="ij"), axis=-1)
    v = sum(atom_value(a, X) for a in atoms)
    m = h**dim * v.sum()
    p = np.array([h**dim * np.sum(-X[..., l] * v) for l in range(dim)])
    return m, p


def test_moments_against_grid_quadrature(rng):
    for _ in range(5):
        atoms = random_atoms(rng, 2, count=4)
        m, p = scalar_moments(atoms, 2)
        mg, pg = _grid_moments(atoms)
        assert m == pytest.approx(mg, abs=1e-8)
        np.testing.assert_allclose(p, pg, atol=1e-8)


def test_pp_aggregate_literal_definition():
    p = np.zeros((2, 3, 3))
    p[1] = [[1.0, -2.0, 0.5], [0.25, 3.0, -1.0], [4.0, 0.0, -0.5]]
    ms = assemble_moments(gaussian_data(3))
    ms = type(ms)(ms.m, p)
    for N in range(3):
        P = p[1]
        expected = np.abs(P[N]).sum() + np.abs(P[:, N]).sum() + np.abs(np.diag(P)).sum()
        others = [k for k in range(3) if k != N]
        expected += sum(abs(P[k, l] + P[l, k]) for i, k in enumerate(others) for l in others[i + 1 :])
        assert ms.PP_abs[1, N] == pytest.approx(expected)


@given(st.lists(atom_strategy(3), min_size=1, max_size=4), st.integers(0, 2))
def test_vanishing_aggregate_forces_vanishing_k(atoms, N):
    data = gaussian_data(3, f1={0: atoms})
    ms = assemble_moments(data)
    assert np.all(ms.PP_abs >= 0)
    if not np.any(ms.p[1]):
        assert k_integrals(3, N, ms.p[1]).as_tuple() == (0.0, 0.0, 0.0)


@given(atom_strategy(2), st.floats(-2, 2))
def test_moments_are_linear(a, s):
    b = atom(a.coeff * s, a.gamma, a.width)
    for beta in [(0, 0), (1, 0), (0, 1)]:
        assert atom_moment(b, beta) == pytest.approx(s * atom_moment(a, beta), abs=1e-14)
