"""Compactly supported kernel functions on [-1, 1].

Each kernel is stored as a polynomial on its support, so moments and the
roughness constant are computed exactly from the coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Literal

import numpy as np
from numpy.polynomial import Polynomial

KernelFamily = Literal["uniform", "epanechnikov", "biweight"]

_COEFFICIENTS = {
    "uniform": (0.5,),
    "epanechnikov": (0.75, 0.0, -0.75),
    "biweight": (15 / 16, 0.0, -30 / 16, 0.0, 15 / 16),
}

KERNEL_FAMILIES = tuple(_COEFFICIENTS)


def _integrate_monomial(power: int) -> float:
    # integral of t**power over [-1, 1]
    return 0.0 if power % 2 else 2.0 / (power + 1)


@dataclass(frozen=True)
class KernelSpec:
    """A symmetric, nonnegative kernel with unit mass on [-1, 1].

    Parameters
    ----------
    family : {"uniform", "epanechnikov", "biweight"}
        Kernel shape.
    order : int
        Order of the kernel: the first nonvanishing moment. All built-in
        families are second order.
    """

    family: KernelFamily = "epanechnikov"
    order: int = 2
    _poly: Polynomial = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.family not in _COEFFICIENTS:
            raise ValueError(
                f"unknown kernel family {self.family!r}; expected one of {KERNEL_FAMILIES}"
            )
        if self.order != 2:
            raise ValueError("only second-order kernels are available (order=2)")
        object.__setattr__(self, "_poly", Polynomial(_COEFFICIENTS[self.family]))

    @property
    def polynomial(self) -> Polynomial:
        """The kernel as a polynomial on [-1, 1]."""
        return self._poly

    def __call__(self, t):
        return kernel_eval(self, t)

    def moment(self, k: int) -> float:
        return kernel_moment(self, k)

    @property
    def roughness(self) -> float:
        return kernel_roughness(self)

    @property
    def sigma(self) -> float:
        """The order-th moment, the constant multiplying the leading bias term."""
        return kernel_moment(self, self.order)

    def to_dict(self) -> dict:
        return {"family": self.family, "order": self.order}

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        return cls(family=d["family"], order=int(d.get("order", 2)))


def as_kernel(kernel) -> KernelSpec:
    if isinstance(kernel, KernelSpec):
        return kernel
    return KernelSpec(kernel)


def kernel_eval(spec: KernelSpec, t):
    """Evaluate K(t); zero outside [-1, 1]. Accepts scalars or arrays."""
    t = np.asarray(t, dtype=float)
    # all built-in kernels are even: Horner in t**2 on the even coefficients
    even = spec.polynomial.coef[::2]
    t2 = np.square(t)
    out = np.full(t.shape, even[-1])
    for c in even[-2::-1]:
        out *= t2
        out += c
    out *= t2 <= 1.0
    out += 0.0  # no negative zeros
    return out if out.ndim else float(out)


def kernel_moment(spec: KernelSpec, k: int) -> float:
    """Return the k-th moment of the kernel over [-1, 1]."""
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    coef = spec.polynomial.coef
    return float(sum(c * _integrate_monomial(j + k) for j, c in enumerate(coef)))


def kernel_roughness(spec: KernelSpec) -> float:
    """Return the integral of K(t)**2 over [-1, 1]."""
    coef = (spec.polynomial ** 2).coef
    return float(sum(c * _integrate_monomial(j) for j, c in enumerate(coef)))


def kernel_cdf(spec: KernelSpec, t):
    """Integral of K from -1 to t, clipped to [0, 1]."""
    t = np.clip(np.asarray(t, dtype=float), -1.0, 1.0)
    anti = spec.polynomial.integ(lbnd=-1.0)
    out = anti(t)
    return out if np.ndim(out) else float(out)


def product_kernel(spec: KernelSpec, w) -> float:
    """Product of K over the entries of ``w``; 1 for an empty vector."""
    w = np.asarray(w, dtype=float).ravel()
    return float(np.prod(kernel_eval(spec, w))) if w.size else 1.0


def bias_constant(spec: KernelSpec) -> float:
    """sigma_order / order!, the scale of the leading bias term."""
    return spec.sigma / factorial(spec.order)
