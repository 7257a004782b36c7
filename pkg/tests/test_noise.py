import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from jitterkde._rng import derive_stream
from jitterkde.noise import (
    NoiseSpec,
    as_noise,
    noise_cdf,
    noise_pdf,
    noise_ppf,
    noise_sample,
    validate_noise_class,
)

SHIPPED = [NoiseSpec.uniform(), NoiseSpec.trapezoid()]
trapezoid_g1 = st.floats(0.05, 0.5)


@pytest.mark.parametrize("noise", SHIPPED, ids=lambda n: n.shape)
def test_shipped_noises_validate(noise):
    report = validate_noise_class(noise)
    assert report.passed, str(report)


@pytest.mark.parametrize(
    "shape, g1, g2, failing",
    [
        ("trapezoid", 0.2, 0.6, "unit mass"),
        ("trapezoid", 0.6, 0.7, "parameter range"),
        ("trapezoid", 0.3, 0.4, "parameter range"),
        ("uniform", 0.5, 0.6, "plateau equals one"),
        ("uniform", 0.4, 0.4, "zero outside (-gamma2, gamma2)"),
        ("uniform", 0.25, 0.25, "unit mass"),
    ],
)
def test_counterexamples_fail_validation(shape, g1, g2, failing):
    report = validate_noise_class(NoiseSpec.unchecked(shape, g1, g2))
    assert not report.passed
    assert failing in [c.name for c in report.checks if not c.passed]


def test_constructor_rejects_invalid():
    with pytest.raises(ValueError):
        NoiseSpec("uniform", 0.4, 0.6)
    with pytest.raises(ValueError):
        NoiseSpec("trapezoid", 0.2, 0.6)
    with pytest.raises(ValueError):
        NoiseSpec("gaussian", 0.5, 0.5)
    with pytest.raises(ValueError):
        NoiseSpec("trapezoid", 0.0, 1.0)


def test_plateau_bandwidths():
    assert NoiseSpec.uniform().max_plateau_bandwidth == 0.5
    assert NoiseSpec.trapezoid().max_plateau_bandwidth == 0.375


def test_pdf_values():
    u, t = NoiseSpec.uniform(), NoiseSpec.trapezoid()
    assert noise_pdf(u, 0.0) == 1.0 and noise_pdf(u, 0.5) == 0.0 and noise_pdf(u, 0.4999) == 1.0
    assert noise_pdf(t, 0.375) == 1.0 and noise_pdf(t, 0.5) == pytest.approx(0.5)
    assert noise_pdf(t, 0.625) == 0.0 and noise_pdf(t, -0.7) == 0.0


def test_dict_roundtrip_and_coercion():
    t = NoiseSpec.trapezoid()
    assert NoiseSpec.from_dict(t.to_dict()) == t
    assert as_noise("trapezoid") == t
    with pytest.raises(ValueError):
        as_noise("laplace")


@given(trapezoid_g1, st.floats(-1, 1))
def test_cdf_is_integral_of_pdf(g1, x):
    noise = NoiseSpec.trapezoid(g1, 1 - g1)
    pts = [p for p in (-noise.gamma2, -g1, g1, noise.gamma2) if -1 < p < min(x, 1)]
    expected = integrate.quad(lambda t: noise_pdf(noise, t), -1, x, points=pts or None, epsabs=1e-13)[0]
    assert noise_cdf(noise, x) == pytest.approx(expected, abs=1e-10)


@given(st.one_of(st.just(None), trapezoid_g1), st.floats(1e-9, 1 - 1e-9))
def test_ppf_inverts_cdf(g1, u):
    noise = NoiseSpec.uniform() if g1 is None else NoiseSpec.trapezoid(g1, 1 - g1)
    assert noise_cdf(noise, noise_ppf(noise, u)) == pytest.approx(u, abs=1e-9)


@pytest.mark.parametrize("noise", SHIPPED, ids=lambda n: n.shape)
def test_sampler_matches_cdf(noise):
    draws = noise_sample(noise, derive_stream(3), 20000)
    assert np.all(np.abs(draws) < noise.gamma2)
    res = stats.kstest(draws, lambda x: noise_cdf(noise, x))
    assert res.pvalue > 1e-3


def test_sampler_is_seeded_and_rejects_negative_count():
    a = noise_sample(NoiseSpec.trapezoid(), derive_stream(9, 1), 10)
    b = noise_sample(NoiseSpec.trapezoid(), derive_stream(9, 1), 10)
    np.testing.assert_array_equal(a, b)
    assert noise_sample(NoiseSpec.uniform(), derive_stream(0), 0).shape == (0,)
    with pytest.raises(ValueError):
        noise_sample(NoiseSpec.uniform(), derive_stream(0), -1)
