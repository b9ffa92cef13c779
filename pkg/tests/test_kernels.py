import itertools
import math

import numpy as np
import pytest
from scipy import integrate

from elastic_l2 import atom
from elastic_l2.kernels import (
    KernelSpec,
    RegimeError,
    growth_reference,
    kernel_l2_norm,
    kernel_norm_asymptote,
    kernel_remainder_norm,
    radial_gaussian_moment,
)
from elastic_l2.quadrature import QuadratureSpec

# sine kernel, n=2, gamma=0, alpha=beta=1, t=1000.  Reference from the closed
# form pi * x * 2F2(1,1;3/2,2;-x), x = t^2/2, evaluated in 30-digit arithmetic.
SINE_N2_T1000 = 4.867939292739312


def _gammas(n, max_order=2):
    for order in range(max_order + 1):
        for combo in itertools.combinations_with_replacement(range(n), order):
            g = [0] * n
            for i in combo:
                g[i] += 1
            yield tuple(g)


def test_t_zero_cosine_example():
    spec = KernelSpec("cosine", 1.7, 0.5, (0, 0, 0), 3)
    assert kernel_l2_norm(spec, 0.0) == pytest.approx(math.sqrt(math.pi**1.5), rel=1e-13)


def test_radial_weight():
    assert radial_gaussian_moment(2, 0.5) == pytest.approx(0.5)


def test_asymptote_examples():
    assert kernel_norm_asymptote(KernelSpec("cosine", 1.0, 1.0, (0, 0), 2)) == pytest.approx(
        2**-1.5 * math.sqrt(2 * math.pi)
    )
    s3 = kernel_norm_asymptote(KernelSpec("sine", 1.0, 1.0, (0, 0, 0), 3))
    assert s3 == pytest.approx(2**-1.25 * math.sqrt(4 * math.pi * math.sqrt(math.pi)))
    assert s3 == pytest.approx(1.984, abs=1e-3)
    with pytest.raises(RegimeError):
        kernel_norm_asymptote(KernelSpec("sine", 1.0, 1.0, (0, 0), 2))


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("kind", ["cosine", "sine"])
@pytest.mark.parametrize("beta", [1.0, 4.0])
def test_large_time_limit(n, kind, beta):
    for gamma in _gammas(n):
        spec = KernelSpec(kind, 1.0, beta, gamma, n)
        if kind == "sine" and n == 2 and sum(gamma) == 0:
            assert spec.regime == "growing"
            continue
        v = kernel_l2_norm(spec, 1000.0)
        assert v == pytest.approx(kernel_norm_asymptote(spec), rel=1e-3)


@pytest.mark.parametrize("alpha", [0.5, 2.0])
def test_sine_norm_scales_inversely_with_alpha(alpha):
    spec1 = KernelSpec("sine", 1.0, 1.0, (1, 0, 0), 3)
    spec = KernelSpec("sine", alpha, 1.0, (1, 0, 0), 3)
    assert alpha * kernel_norm_asymptote(spec) == pytest.approx(kernel_norm_asymptote(spec1), rel=1e-14)
    assert alpha * kernel_l2_norm(spec, 1000.0) == pytest.approx(kernel_l2_norm(spec1, 1000.0), rel=1e-3)


@pytest.mark.parametrize("alpha", [0.5, 2.0])
def test_cosine_limit_independent_of_alpha(alpha):
    a = KernelSpec("cosine", alpha, 4.0, (0, 2, 0), 3)
    b = KernelSpec("cosine", 1.0, 4.0, (0, 2, 0), 3)
    assert kernel_l2_norm(a, 1000.0) == pytest.approx(kernel_l2_norm(b, 1000.0), rel=1e-3)


def test_golden_growing_sine():
    spec = KernelSpec("sine", 1.0, 1.0, (0, 0), 2)
    assert kernel_l2_norm(spec, 1000.0) == pytest.approx(SINE_N2_T1000, rel=1e-9)
    assert kernel_l2_norm(spec, 1000.0, QuadratureSpec().refined(10)) == pytest.approx(SINE_N2_T1000, rel=1e-12)


@pytest.mark.parametrize("n", [1, 2])
def test_growth_ratio_bracketed(n):
    spec = KernelSpec("sine", 1.0, 1.0, (0,) * n, n)
    ratios = [kernel_l2_norm(spec, t) / growth_reference(n, t) for t in np.logspace(1, 4, 13)]
    assert min(ratios) > 0.5 and max(ratios) < 2 * min(ratios)


def test_growth_reference_values():
    assert growth_reference(2, math.e**2 - 2) == pytest.approx(math.sqrt(2))
    assert growth_reference(1, 4.0) == 2.0
    assert growth_reference(2, 2.0) == pytest.approx(math.sqrt(math.log(4)))
    with pytest.raises(ValueError):
        growth_reference(3, 1.0)


@pytest.mark.parametrize("kind", ["cosine", "sine"])
def test_tilde_dominated(kind):
    for n in (2, 3):
        plain = kernel_l2_norm(KernelSpec(kind, 1.0, 1.0, (0,) * n, n), 500.0)
        for N, k in itertools.product(range(n), repeat=2):
            tl = kernel_l2_norm(KernelSpec(kind, 1.0, 1.0, (0,) * n, n, (N, k)), 500.0)
            assert tl <= plain


def test_remainder_against_direct_radial_integral():
    # f = e^{-|x|^2} in 2-D: f hat = pi e^{-r^2/4}; order-0 remainder is pi (e^{-r^2/4} - 1)
    t, beta = 5.0, 1.0
    spec = KernelSpec("cosine", 1.0, beta, (0, 0), 2)
    got = kernel_remainder_norm(spec, (atom(1.0, (0, 0)),), 0, t)
    f = lambda r: np.exp(-2 * beta * r * r) * np.cos(t * r) ** 2 * (math.pi * (np.exp(-r * r / 4) - 1)) ** 2 * r
    ref = math.sqrt(2 * math.pi * integrate.quad(f, 0, 10, limit=500)[0])
    assert got == pytest.approx(ref, rel=1e-10)


def test_remainder_requires_plain_kernel():
    with pytest.raises(ValueError):
        kernel_remainder_norm(KernelSpec("cosine", 1.0, 1.0, (1, 0), 2), (atom(1.0, (0, 0)),), 0, 1.0)
