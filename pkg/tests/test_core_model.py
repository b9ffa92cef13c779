import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from elastic_l2 import ConstraintViolation, GaussianPolyData, atom, gaussian_data, make_lame
from elastic_l2.core_model import (
    atom_fourier,
    atom_inner,
    atom_value,
    plancherel_factor,
    sum_l2_norm,
    sum_spectrum_polar,
    support_radius,
    weighted_l1_norm,
)

from conftest import atom_strategy


@pytest.mark.parametrize(
    "lam, mu",
    [(1.0, 1.0), (-1.0, 1.0), (0.0, 2.0), (-0.5, 0.5)],
)
def test_lame_speeds(lam, mu):
    p = make_lame(lam, mu)
    assert p.alpha1 == pytest.approx(math.sqrt(lam + 2 * mu))
    assert p.alpha2 == pytest.approx(math.sqrt(mu))
    assert p.scalar_reduction == (lam + mu == 0)


@pytest.mark.parametrize("lam, mu", [(1.0, 0.0), (1.0, -1.0), (-3.0, 1.0), (float("nan"), 1.0)])
def test_lame_rejects_inadmissible(lam, mu):
    with pytest.raises(ConstraintViolation):
        make_lame(lam, mu)


def test_atom_degree_limit():
    with pytest.raises(ConstraintViolation):
        atom(1.0, (2, 1))
    with pytest.raises(ConstraintViolation):
        atom(1.0, (0, 0), width=0.0)


@pytest.mark.parametrize("gamma", [(0,), (1,), (2,)])
@pytest.mark.parametrize("xi", [0.0, 0.7, -2.3])
def test_fourier_1d_against_direct_integral(gamma, xi):
    a = atom(1.3, gamma, 0.8)
    re = integrate.quad(lambda x: math.cos(x * xi) * atom_value(a, np.array([[x]]))[0], -np.inf, np.inf)[0]
    im = integrate.quad(lambda x: -math.sin(x * xi) * atom_value(a, np.array([[x]]))[0], -np.inf, np.inf)[0]
    got = complex(atom_fourier(a, np.array([[xi]]))[0])
    assert got == pytest.approx(complex(re, im), abs=1e-10)


def test_fourier_2d_against_grid_sum():
    a = atom(0.7, (1, 1), 1.2)
    x = np.linspace(-8, 8, 401)
    h = x[1] - x[0]
    X = np.stack(np.meshgrid(x, x, indexing="ij"), axis=-1)
    vals = atom_value(a, X)
    for xi in ([0.3, -0.4], [1.1, 0.5]):
        direct = h * h * np.sum(vals * np.exp(-1j * (X @ np.array(xi))))
        assert complex(atom_fourier(a, np.array([xi]))[0]) == pytest.approx(direct, abs=1e-10)


@given(atom_strategy(2), atom_strategy(2))
def test_inner_product_is_plancherel_consistent(p, q):
    # physical inner product of real atoms equals the Fourier-side integral / (2 pi)^n
    r = np.linspace(1e-6, 12.0, 1500)
    th = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    om = np.stack([np.cos(th), np.sin(th)], axis=1)
    P = sum_spectrum_polar((p,), r, om)
    Q = sum_spectrum_polar((q,), r, om)
    ang = (P * np.conj(Q)).real.mean(axis=1) * 2 * np.pi
    fourier = integrate.simpson(ang * r, x=r)
    assert atom_inner(p, q) == pytest.approx(plancherel_factor(2) ** 2 * fourier, rel=1e-7, abs=1e-10)


def test_l2_norm_matches_grid():
    atoms = (atom(1.0, (0, 0)), atom(-0.4, (2, 0), 1.5), atom(0.9, (0, 1), 0.7))
    x = np.linspace(-9, 9, 601)
    h = x[1] - x[0]
    X = np.stack(np.meshgrid(x, x, indexing="ij"), axis=-1)
    v = sum(atom_value(a, X) for a in atoms)
    assert sum_l2_norm(atoms) == pytest.approx(math.sqrt(h * h * np.sum(v * v)), rel=1e-10)


def test_data_roundtrip_and_validation():
    d = gaussian_data(2, f1={0: [atom(1.0, (1, 0), 2.0)]})
    back = GaussianPolyData.from_dict(d.to_dict())
    assert back.to_dict() == d.to_dict()
    with pytest.raises(ConstraintViolation):
        gaussian_data(2, f1={0: [atom(1.0, (0, 0, 0))]})


def test_support_radius_bounds_values():
    d = gaussian_data(2, f1={0: [atom(1.0, (0, 0))]})
    R = support_radius(d)
    assert math.exp(-R * R) <= 1e-12 * 1.0001
    assert R < 6.0


@given(st.floats(0.5, 2.0))
def test_weighted_l1_norm_of_gaussian(a):
    # int |e^{-a|x|^2}| dx = pi / a in two dimensions
    g = atom(1.0, (0, 0), a)
    assert weighted_l1_norm((g,), 2) == pytest.approx(math.pi / a, rel=1e-8)
