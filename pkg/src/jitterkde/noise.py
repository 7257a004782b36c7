"""Noise densities used to jitter integer-coded discrete variables.

A valid noise density equals one on ``[-gamma1, gamma1]``, vanishes outside
``(-gamma2, gamma2)`` and integrates to one, with
``0 < gamma1 <= 0.5 <= gamma2 < 1``. Two shapes ship: the uniform density on
``(-1/2, 1/2)`` and a trapezoid with linear shoulders.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Literal

import numpy as np
from scipy import integrate

NoiseShape = Literal["uniform", "trapezoid"]
NOISE_SHAPES = ("uniform", "trapezoid")

_MASS_TOL = 1e-12


@dataclass(frozen=True)
class NoiseSpec:
    """Noise density with plateau half-width ``gamma1`` and support half-width ``gamma2``.

    Construction rejects parameters outside the admissible range. A trapezoid
    has unit mass only when ``gamma1 + gamma2 == 1``; other values are
    rejected rather than renormalized, since renormalizing would move the
    plateau away from one. Use :meth:`unchecked` to build an invalid instance
    for diagnostics.
    """

    shape: NoiseShape = "uniform"
    gamma1: float = 0.5
    gamma2: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "gamma1", float(self.gamma1))
        object.__setattr__(self, "gamma2", float(self.gamma2))
        if self.shape not in NOISE_SHAPES:
            raise ValueError(f"unknown noise shape {self.shape!r}; expected one of {NOISE_SHAPES}")
        if not (0.0 < self.gamma1 <= 0.5 <= self.gamma2 < 1.0):
            raise ValueError(
                f"need 0 < gamma1 <= 0.5 <= gamma2 < 1, got gamma1={self.gamma1}, gamma2={self.gamma2}"
            )
        if self.shape == "uniform" and not (self.gamma1 == self.gamma2 == 0.5):
            raise ValueError("uniform noise requires gamma1 = gamma2 = 0.5")
        if self.shape == "trapezoid" and abs(self.gamma1 + self.gamma2 - 1.0) > _MASS_TOL:
            raise ValueError(
                f"trapezoid noise has mass gamma1 + gamma2 = {self.gamma1 + self.gamma2:g}, not 1"
            )

    @classmethod
    def uniform(cls) -> "NoiseSpec":
        return cls("uniform", 0.5, 0.5)

    @classmethod
    def trapezoid(cls, gamma1: float = 0.375, gamma2: float = 0.625) -> "NoiseSpec":
        return cls("trapezoid", gamma1, gamma2)

    @classmethod
    def unchecked(cls, shape: str, gamma1: float, gamma2: float) -> "NoiseSpec":
        """Build a spec without validation (for class-membership diagnostics)."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "shape", shape)
        object.__setattr__(obj, "gamma1", float(gamma1))
        object.__setattr__(obj, "gamma2", float(gamma2))
        return obj

    @property
    def max_plateau_bandwidth(self) -> float:
        """min(gamma1, 1 - gamma2): the largest bandwidth that keeps the estimator local."""
        return min(self.gamma1, 1.0 - self.gamma2)

    @property
    def knots(self) -> tuple:
        """Points where the density is not smooth."""
        if self.shape == "uniform":
            return (-0.5, 0.5)
        return (-self.gamma2, -self.gamma1, self.gamma1, self.gamma2)

    def pdf(self, x):
        return noise_pdf(self, x)

    def cdf(self, x):
        return noise_cdf(self, x)

    def ppf(self, u):
        return noise_ppf(self, u)

    def sample(self, stream: np.random.Generator, count: int) -> np.ndarray:
        return noise_sample(self, stream, count)

    def to_dict(self) -> dict:
        return {"shape": self.shape, "gamma1": self.gamma1, "gamma2": self.gamma2}

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseSpec":
        return cls(d["shape"], d["gamma1"], d["gamma2"])


def as_noise(noise) -> NoiseSpec:
    if isinstance(noise, NoiseSpec):
        return noise
    if noise == "uniform":
        return NoiseSpec.uniform()
    if noise == "trapezoid":
        return NoiseSpec.trapezoid()
    raise ValueError(f"unknown noise {noise!r}")


def _scalar_or_array(out):
    return out if np.ndim(out) else float(out)


def noise_pdf(noise: NoiseSpec, x):
    """Evaluate the noise density."""
    x = np.asarray(x, dtype=float)
    a = np.abs(x)
    if noise.shape == "uniform":
        out = np.where(a < 0.5, 1.0, 0.0)
    else:
        g1, g2 = noise.gamma1, noise.gamma2
        shoulder = np.clip((g2 - a) / max(g2 - g1, 1e-300), 0.0, 1.0)
        out = np.where(a <= g1, 1.0, np.where(a < g2, shoulder, 0.0))
    return _scalar_or_array(out)


def noise_cdf(noise: NoiseSpec, x):
    x = np.asarray(x, dtype=float)
    if noise.shape == "uniform":
        return _scalar_or_array(np.clip(x + 0.5, 0.0, 1.0))
    g1, g2 = noise.gamma1, noise.gamma2
    w = g2 - g1
    mid = np.clip(x, -g1, g1) + g1
    if w == 0:
        return _scalar_or_array(mid)
    left = (np.clip(x, -g2, -g1) + g2) ** 2 / (2 * w)
    right = w / 2 - (g2 - np.clip(x, g1, g2)) ** 2 / (2 * w)
    return _scalar_or_array(left + mid + right)


def noise_ppf(noise: NoiseSpec, u):
    """Inverse CDF on (0, 1)."""
    u = np.asarray(u, dtype=float)
    if noise.shape == "uniform":
        return _scalar_or_array(u - 0.5)
    g1, g2 = noise.gamma1, noise.gamma2
    w = g2 - g1
    lo = w / 2
    hi = w / 2 + 2 * g1
    out = np.where(
        u < lo,
        -g2 + np.sqrt(2 * w * np.clip(u, 0.0, None)),
        np.where(
            u <= hi,
            u - lo - g1,
            g2 - np.sqrt(2 * w * np.clip(1.0 - u, 0.0, None)),
        ),
    )
    return _scalar_or_array(out)


def _open_unit_uniforms(stream: np.random.Generator, count: int) -> np.ndarray:
    # (k + 1/2) / 2**53 lies strictly inside (0, 1), so draws never hit +-gamma2
    k = stream.integers(0, 2**53, size=count, dtype=np.int64)
    return (k + 0.5) / 2.0**53


def noise_sample(noise: NoiseSpec, stream: np.random.Generator, count: int) -> np.ndarray:
    """Draw ``count`` iid noise values by inverse-CDF sampling."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    if count == 0:
        return np.empty(0)
    return np.asarray(noise_ppf(noise, _open_unit_uniforms(stream, count)), dtype=float)


@dataclass
class ConditionCheck:
    name: str
    passed: bool
    residual: float

    def __str__(self):
        return f"{self.name}: {'pass' if self.passed else 'FAIL'} (residual {self.residual:.3g})"


@dataclass
class ValidationReport:
    noise: NoiseSpec
    checks: List[ConditionCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __str__(self):
        head = (
            f"{self.noise.shape}(gamma1={self.noise.gamma1:g}, gamma2={self.noise.gamma2:g}): "
            f"{'valid' if self.passed else 'INVALID'}"
        )
        return "\n".join([head] + ["  " + str(c) for c in self.checks])


def validate_noise_class(noise: NoiseSpec, grid_size: int = 20001, tol: float = 1e-12) -> ValidationReport:
    """Check plateau, support and unit mass numerically.

    The plateau is checked on the closed interval ``[-gamma1, gamma1]`` and
    the support condition on ``|x| >= gamma2``. When ``gamma1 == gamma2`` the
    two shared endpoints are a null set and are left out of both checks.
    """
    g1, g2 = noise.gamma1, noise.gamma2
    report = ValidationReport(noise)

    in_range = 0.0 < g1 <= 0.5 <= g2 < 1.0
    report.checks.append(
        ConditionCheck("parameter range", in_range, 0.0 if in_range else max(g1 - 0.5, 0.5 - g2, -g1, g2 - 1.0, 0.0))
    )

    plateau = np.linspace(-g1, g1, grid_size)
    if g1 == g2:
        plateau = plateau[1:-1]
    resid = float(np.max(np.abs(noise_pdf(noise, plateau) - 1.0))) if plateau.size else 0.0
    report.checks.append(ConditionCheck("plateau equals one", resid <= tol, resid))

    outer = np.concatenate([np.linspace(g2, g2 + 2.0, grid_size), -np.linspace(g2, g2 + 2.0, grid_size)])
    if g1 == g2:
        outer = outer[np.abs(outer) > g2]
    resid = float(np.max(np.abs(noise_pdf(noise, outer))))
    report.checks.append(ConditionCheck("zero outside (-gamma2, gamma2)", resid <= tol, resid))

    pts = sorted({-g2, -g1, 0.0, g1, g2})
    mass = sum(
        integrate.quad(lambda t: noise_pdf(noise, t), a, b, epsabs=1e-14, epsrel=1e-14)[0]
        for a, b in zip(pts[:-1], pts[1:])
    )
    resid = abs(mass - 1.0)
    report.checks.append(ConditionCheck("unit mass", resid <= tol, resid))
    return report
