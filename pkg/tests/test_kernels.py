import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from jitterkde.kernels import (
    KERNEL_FAMILIES,
    KernelSpec,
    as_kernel,
    bias_constant,
    kernel_cdf,
    kernel_eval,
    kernel_moment,
    kernel_roughness,
    product_kernel,
)

families = st.sampled_from(KERNEL_FAMILIES)


def quad(f, a=-1.0, b=1.0):
    return integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-13, limit=200)[0]


@pytest.mark.parametrize("family", KERNEL_FAMILIES)
def test_unit_mass_and_vanishing_first_moment(family):
    k = KernelSpec(family)
    assert abs(quad(k) - 1.0) < 1e-12
    assert abs(quad(lambda t: t * k(t))) < 1e-10
    assert quad(lambda t: t**2 * k(t)) > 0


@pytest.mark.parametrize("family", KERNEL_FAMILIES)
@pytest.mark.parametrize("power", range(7))
def test_moments_match_quadrature(family, power):
    k = KernelSpec(family)
    assert kernel_moment(k, power) == pytest.approx(quad(lambda t: t**power * k(t)), abs=1e-10)


@pytest.mark.parametrize("family", KERNEL_FAMILIES)
def test_roughness_matches_quadrature(family):
    k = KernelSpec(family)
    assert kernel_roughness(k) == pytest.approx(quad(lambda t: k(t) ** 2), abs=1e-10)


@pytest.mark.parametrize(
    "family, kappa, sigma",
    [("uniform", 0.5, 1 / 3), ("epanechnikov", 0.6, 0.2), ("biweight", 5 / 7, 1 / 7)],
)
def test_known_constants(family, kappa, sigma):
    k = KernelSpec(family)
    assert k.roughness == pytest.approx(kappa, abs=1e-14)
    assert k.sigma == pytest.approx(sigma, abs=1e-14)
    assert bias_constant(k) == pytest.approx(sigma / 2, abs=1e-14)


def test_epanechnikov_values():
    k = KernelSpec("epanechnikov")
    assert kernel_eval(k, 0.0) == 0.75
    assert kernel_eval(k, 1.0) == 0.0
    assert kernel_eval(k, 1.5) == 0.0
    np.testing.assert_array_equal(kernel_eval(k, np.array([-2.0, 0.5])), [0.0, 0.5625])


def test_uniform_is_half_on_closed_support():
    k = KernelSpec("uniform")
    assert kernel_eval(k, -1.0) == 0.5 and kernel_eval(k, 1.0) == 0.5
    assert kernel_eval(k, 1.0 + 1e-12) == 0.0


def test_invalid_specs():
    with pytest.raises(ValueError):
        KernelSpec("gaussian")
    with pytest.raises(ValueError):
        KernelSpec("epanechnikov", order=4)
    with pytest.raises(ValueError):
        kernel_moment(KernelSpec(), -1)


def test_roundtrip_dict():
    k = KernelSpec("biweight")
    assert KernelSpec.from_dict(k.to_dict()) == k
    assert as_kernel("biweight") == k
    assert as_kernel(k) is k


def test_product_kernel():
    k = KernelSpec("epanechnikov")
    assert product_kernel(k, []) == 1.0
    assert product_kernel(k, [0.0, 0.5]) == pytest.approx(0.75 * 0.5625)
    assert product_kernel(k, [0.0, 1.2]) == 0.0


@given(families, st.floats(-1.5, 1.5))
def test_cdf_matches_quadrature(family, t):
    k = KernelSpec(family)
    expected = quad(k, -1.0, min(max(t, -1.0), 1.0))
    assert kernel_cdf(k, t) == pytest.approx(expected, abs=1e-12)


@given(families, st.floats(-1, 1), st.floats(-1, 1))
def test_symmetry_and_monotone_cdf(family, s, t):
    k = KernelSpec(family)
    assert kernel_eval(k, t) == pytest.approx(kernel_eval(k, -t), abs=1e-15)
    lo, hi = sorted((s, t))
    assert kernel_cdf(k, lo) <= kernel_cdf(k, hi) + 1e-15


@given(families, st.lists(st.floats(-3, 3), max_size=4))
def test_product_kernel_nonnegative(family, w):
    val = product_kernel(KernelSpec(family), w)
    assert val >= 0
    if any(abs(v) > 1 for v in w):
        assert val == 0.0
    assert math.isfinite(val)
