"""Closed-form moments of the jittering estimator and independent quadrature checks.

Purely discrete results (p = 1, q = 0) are exact finite-sample statements.
Everything in the mixed setting is a leading-order asymptotic expression.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .kernels import KernelSpec, as_kernel, kernel_cdf, kernel_eval, kernel_roughness
from .noise import NoiseSpec, as_noise, noise_pdf

_QUAD_TOL = 1e-13


@dataclass(frozen=True)
class DiscretePmf:
    """Probability mass function on the integers ``z_min, z_min + 1, ...``."""

    z_min: int
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float).ravel()
        if probs.size == 0 or np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("pmf entries must be nonnegative and sum to one")
        object.__setattr__(self, "z_min", int(self.z_min))
        object.__setattr__(self, "probs", probs)

    @property
    def z_max(self) -> int:
        return self.z_min + self.probs.size - 1

    def __call__(self, z) -> float:
        z = int(z)
        if z < self.z_min or z > self.z_max:
            return 0.0
        return float(self.probs[z - self.z_min])

    def sample(self, stream: np.random.Generator, size: int) -> np.ndarray:
        return self.z_min + stream.choice(self.probs.size, size=size, p=self.probs)


@dataclass(frozen=True)
class TheoryPoint:
    """Density value at (z, x) and its order-th partial derivatives in each continuous direction."""

    f: float
    partials: Sequence[float] = ()

    def __post_init__(self):
        if self.f < 0:
            raise ValueError("density value must be nonnegative")
        object.__setattr__(self, "partials", tuple(float(v) for v in self.partials))


def _per_dim(b, q: int) -> np.ndarray:
    return np.broadcast_to(np.asarray(b, dtype=float), (q,))


def theorem1_bias(point: TheoryPoint, b, kernel="epanechnikov") -> float:
    """Leading bias term b**l * sigma_l / l! * sum_j d^l f / dx_j^l.

    There is no discrete contribution: once h <= min(gamma1, 1 - gamma2) the
    estimator is exactly unbiased in the discrete direction.
    """
    kernel = as_kernel(kernel)
    q = len(point.partials)
    if q == 0:
        return 0.0
    ell = kernel.order
    bq = _per_dim(b, q)
    return float(kernel.sigma / math.factorial(ell) * np.sum(bq**ell * np.asarray(point.partials)))


def theorem1_variance(f_value: float, n: int, h=(), b=(), kernel="epanechnikov") -> float:
    """Leading variance f / (n prod b) * (kappa**(p+q) / prod h - prod b * f)."""
    kernel = as_kernel(kernel)
    h = np.atleast_1d(np.asarray(h, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if n < 1 or np.any(h <= 0) or np.any(b <= 0):
        raise ValueError("n and bandwidths must be positive")
    kappa = kernel_roughness(kernel)
    pb = float(np.prod(b))
    return f_value / (n * pb) * (kappa ** (h.size + b.size) / float(np.prod(h)) - pb * f_value)


def amse(point: TheoryPoint, n: int, h=(), b=(), kernel="epanechnikov") -> float:
    """Squared leading bias plus leading variance."""
    bias = theorem1_bias(point, b, kernel) if len(point.partials) else 0.0
    return bias**2 + theorem1_variance(point.f, n, h, b, kernel)


def are(f_z: float, noise="uniform", kernel="epanechnikov") -> float:
    """Asymptotic efficiency of the jittering estimator relative to the sample frequency.

    Uses the largest unbiased bandwidth h = min(gamma1, 1 - gamma2). Returns
    0 at ``f_z == 1``, where both variances vanish and the ratio degenerates.
    """
    noise, kernel = as_noise(noise), as_kernel(kernel)
    if not 0.0 <= f_z <= 1.0:
        raise ValueError(f"f_z must lie in [0, 1], got {f_z}")
    if f_z == 1.0:
        return 0.0
    return (1.0 - f_z) / (kernel_roughness(kernel) / noise.max_plateau_bandwidth - f_z)


def central_difference(pmf: DiscretePmf, z: int, k: int) -> float:
    """(f(z + k) - 2 f(z) + f(z - k)) / k**2."""
    if k < 1:
        raise ValueError("step must be at least 1")
    return (pmf(z + k) - 2.0 * pmf(z) + pmf(z - k)) / k**2


def _max_step(h: float, gamma2: float) -> int:
    # largest k with (k - gamma2) / h < 1, i.e. k < h + gamma2
    return max(math.ceil(h + gamma2) - 1, 0)


def corollary_weight(h: float, k: int, kernel: KernelSpec) -> float:
    """Kernel mass on [(k - 1/2) / h, (k + 1/2) / h], the weight of f(z + k) under uniform noise."""
    lo, hi = (k - 0.5) / h, (k + 0.5) / h
    return float(kernel_cdf(kernel, hi) - kernel_cdf(kernel, lo))


def bias_corollary1(pmf: DiscretePmf, z: int, h: float, kernel="epanechnikov") -> float:
    """Exact bias under uniform noise and a symmetric kernel.

    sum_{k=1}^{ceil(h - 1/2)} rho_k(h) * Delta_k^2 f(z), with rho_k(h) the
    kernel mass on [(-1/2 - k) / h, (1/2 - k) / h] times k**2.
    """
    kernel = as_kernel(kernel)
    if h <= 0:
        raise ValueError("h must be positive")
    total = 0.0
    for k in range(1, math.ceil(h - 0.5) + 1):
        lo, hi = (-0.5 - k) / h, (0.5 - k) / h
        rho = k**2 * float(kernel_cdf(kernel, hi) - kernel_cdf(kernel, lo))
        total += rho * central_difference(pmf, z, k)
    return total


def _piecewise_quad(func: Callable[[float], float], a: float, b: float, knots) -> float:
    pts = sorted({a, b, *[t for t in knots if a < t < b]})
    return sum(
        integrate.quad(func, lo, hi, epsabs=_QUAD_TOL, epsrel=_QUAD_TOL, limit=200)[0]
        for lo, hi in zip(pts[:-1], pts[1:])
        if hi > lo
    )


def lemma2_rho(h: float, k: int, kernel: KernelSpec, noise: NoiseSpec) -> float:
    """k**2 times the integral of K(t) eta(k - h t) over its support in [-1, 1].

    The support is ((k - gamma2) / h, (k + gamma2) / h); ``k`` may be negative.
    """
    lo, hi = max((k - noise.gamma2) / h, -1.0), min((k + noise.gamma2) / h, 1.0)
    if hi <= lo:
        return 0.0
    knots = [(k - e) / h for e in noise.knots] + [0.0]
    val = _piecewise_quad(lambda t: kernel_eval(kernel, t) * noise_pdf(noise, k - h * t), lo, hi, knots)
    return k**2 * val


def bias_lemma2(pmf: DiscretePmf, z: int, h: float, kernel="epanechnikov", noise="uniform") -> float:
    """Exact bias for general noise as weighted forward and backward differences.

    sum_k [rho_k (f(z+k) - f(z)) + rho_{-k} (f(z-k) - f(z))] / k**2 over
    the steps k whose weight can be nonzero.
    """
    kernel, noise = as_kernel(kernel), as_noise(noise)
    if h <= 0:
        raise ValueError("h must be positive")
    total = 0.0
    fz = pmf(z)
    for k in range(1, _max_step(h, noise.gamma2) + 1):
        rp = lemma2_rho(h, k, kernel, noise)
        rm = lemma2_rho(h, -k, kernel, noise)
        total += (rp * pmf(z + k) - (rp + rm) * fz + rm * pmf(z - k)) / k**2
    return total


def jitter_weight(h: float, d: int, kernel="epanechnikov", noise="uniform") -> float:
    """Integral over [-1, 1] of K(t) eta(h t - d): the expected weight of a cell d steps away."""
    kernel, noise = as_kernel(kernel), as_noise(noise)
    knots = [(d + e) / h for e in noise.knots] + [0.0]
    return integrate.quad(
        lambda t: kernel_eval(kernel, t) * noise_pdf(noise, h * t - d),
        -1.0, 1.0, points=[t for t in knots if -1.0 < t < 1.0] or None,
        epsabs=_QUAD_TOL, epsrel=_QUAD_TOL, limit=200,
    )[0]


def bias_oracle_quadrature(pmf: DiscretePmf, z: int, h: float, kernel="epanechnikov", noise="uniform") -> float:
    """E f(z) - f(z) summed directly over neighbouring cells.

    E f(z) = sum_{z'} f(z') int K(t) eta(h t - (z' - z)) dt, with each
    integral done by adaptive quadrature split at the integrand's kinks.
    """
    kernel, noise = as_kernel(kernel), as_noise(noise)
    if h <= 0:
        raise ValueError("h must be positive")
    reach = math.ceil(h + noise.gamma2)
    expect = 0.0
    for d in range(-reach, reach + 1):
        fd = pmf(z + d)
        if fd:
            expect += fd * jitter_weight(h, d, kernel, noise)
    return expect - pmf(z)


def continuous_bias_quadrature(f: Callable[[float], float], x: float, b: float, kernel="epanechnikov") -> float:
    """int K(v) f(x + b v) dv - f(x) for a univariate continuous density."""
    kernel = as_kernel(kernel)
    val = integrate.quad(lambda v: kernel_eval(kernel, v) * f(x + b * v), -1.0, 1.0,
                         points=[0.0], epsabs=_QUAD_TOL, epsrel=_QUAD_TOL, limit=200)[0]
    return val - f(x)
