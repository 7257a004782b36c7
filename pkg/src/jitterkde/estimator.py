"""Jittering kernel density estimator for mixed discrete/continuous data.

Discrete columns are made continuous by adding one draw of noise per cell,
after which an ordinary product-kernel density estimator is applied:

    f(z, x) = 1 / (n prod(h) prod(b)) * sum_i K((Z_i + E_i - z) / h) K((X_i - x) / b)

The module also holds the two reference estimators used for comparison: the
sample frequency and an ordered-discrete kernel estimator in the style of
Li and Racine.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._rng import derive_stream
from .data import Bandwidths, DataError, GridSpec, MixedDataset, check_point
from .kernels import KernelSpec, as_kernel, kernel_eval
from .noise import NoiseSpec, as_noise, noise_sample

_CHUNK_CELLS = 1 << 22


def jitter(data: MixedDataset, noise: NoiseSpec, stream: np.random.Generator) -> np.ndarray:
    """One iid noise draw per discrete cell, in row-major order; shape (n, p)."""
    if data.p == 0:
        return np.empty((data.n, 0))
    return noise_sample(noise, stream, data.n * data.p).reshape(data.n, data.p)


def product_kernel_weights(kernel: KernelSpec, train: np.ndarray, query: np.ndarray, bw: np.ndarray) -> np.ndarray:
    """Matrix of prod_k K((train[i, k] - query[m, k]) / bw[k]); shape (m, n)."""
    out = np.ones((query.shape[0], train.shape[0]))
    for k in range(train.shape[1]):
        out *= kernel_eval(kernel, (train[None, :, k] - query[:, None, k]) / bw[k])
    return out


def kde_at(kernel: KernelSpec, train: np.ndarray, query: np.ndarray, bw: np.ndarray) -> np.ndarray:
    """Classical product-kernel density estimate at each query row."""
    n = train.shape[0]
    norm = n * float(np.prod(bw))
    out = np.empty(query.shape[0])
    step = max(1, _CHUNK_CELLS // max(n, 1))
    for start in range(0, query.shape[0], step):
        sl = slice(start, start + step)
        out[sl] = product_kernel_weights(kernel, train, query[sl], bw).sum(axis=1) / norm
    return out


@dataclass(frozen=True)
class JKDEModel:
    """A fitted jittering estimator: data, the realized noise, kernel and bandwidths.

    The jitter matrix is drawn once at fit time and never resampled, so
    evaluation is deterministic.
    """

    dataset: MixedDataset
    jitter: np.ndarray
    kernel: KernelSpec
    noise: NoiseSpec
    bandwidths: Bandwidths
    seed: int

    @property
    def jittered(self) -> np.ndarray:
        """Discrete columns plus noise, shape (n, p)."""
        return self.dataset.z + self.jitter

    @property
    def train_matrix(self) -> np.ndarray:
        return np.hstack([self.jittered, self.dataset.x])

    def evaluate(self, z=None, x=None) -> float:
        return evaluate(self, z, x)

    def evaluate_points(self, z=None, x=None) -> np.ndarray:
        return evaluate_points(self, z, x)

    def evaluate_grid(self, grid: GridSpec) -> np.ndarray:
        return evaluate_grid(self, grid)


def fit(data: MixedDataset, kernel="epanechnikov", noise="uniform", bandwidths: Optional[Bandwidths] = None,
        seed: int = 0, jitter_matrix: Optional[np.ndarray] = None) -> JKDEModel:
    """Jitter the discrete columns of ``data`` and store everything needed to evaluate.

    The noise is drawn from a stream derived from ``seed``; refitting with the
    same seed reproduces the jitter exactly. ``jitter_matrix`` overrides the
    draw (used when reloading a persisted model).
    """
    kernel = as_kernel(kernel)
    noise = as_noise(noise)
    if data.n < 1:
        raise DataError("cannot fit on an empty dataset")
    if bandwidths is None:
        raise ValueError("bandwidths are required; see jitterkde.bandwidth for selectors")
    if not isinstance(bandwidths, Bandwidths):
        bandwidths = Bandwidths.from_vector(bandwidths, data.p)
    bandwidths.check_dims(data.p, data.q)
    if jitter_matrix is None:
        jit = jitter(data, noise, derive_stream(seed))
    else:
        jit = np.asarray(jitter_matrix, dtype=float).reshape(data.n, data.p)
    jit.setflags(write=False)
    return JKDEModel(data, jit, kernel, noise, bandwidths, int(seed))


def evaluate_points(model: JKDEModel, z=None, x=None) -> np.ndarray:
    """Density estimates at a batch of points; ``z`` is (m, p), ``x`` is (m, q)."""
    d = model.dataset
    zq, xq = check_point(z, x, d.p, d.q)
    query = np.hstack([zq.astype(float), xq])
    return kde_at(model.kernel, model.train_matrix, query, model.bandwidths.vector)


def evaluate(model: JKDEModel, z=None, x=None) -> float:
    """Density estimate at a single point (z, x)."""
    d = model.dataset
    zq = np.asarray([] if z is None else z).reshape(1, d.p)
    xq = np.asarray([] if x is None else x, dtype=float).reshape(1, d.q)
    return float(evaluate_points(model, zq, xq)[0])


def evaluate_grid(model, grid: GridSpec) -> np.ndarray:
    """Evaluate on every node of a tensor grid; returns an array of shape ``grid.shape``."""
    zq, xq = grid.points()
    return model.evaluate_points(zq, xq).reshape(grid.shape)


def sample_frequency(data: MixedDataset, z) -> float:
    """Relative frequency of the cell ``z`` among the observations."""
    return float(sample_frequency_points(data, np.asarray(z).reshape(1, -1))[0])


def sample_frequency_points(data: MixedDataset, z) -> np.ndarray:
    if data.q != 0:
        raise DataError("the sample frequency estimator needs purely discrete data (q = 0)")
    zq, _ = check_point(z, None, data.p, 0)
    hits = np.all(data.z[None, :, :] == zq[:, None, :], axis=2)
    return hits.sum(axis=1) / data.n


def ordered_kernel_weights(lam: float, train: np.ndarray, query: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """lam**|Z_i - z| normalized over the categories lo..hi; shape (m, n).

    Each observation's kernel is a probability vector over ``lo..hi``;
    queries outside that range get weight zero.
    """
    cats = np.arange(lo, hi + 1)
    norm = np.power(lam, np.abs(cats[None, :] - train[:, None])).sum(axis=1)
    w = np.power(lam, np.abs(train[None, :] - query[:, None])) / norm[None, :]
    outside = (query < lo) | (query > hi)
    w[outside, :] = 0.0
    return w


def _check_lambdas(lam, p: int) -> np.ndarray:
    lam = np.atleast_1d(np.asarray(lam, dtype=float)).ravel()
    if lam.size != p:
        raise DataError(f"expected {p} discrete smoothing parameters, got {lam.size}")
    if np.any(~(lam >= 0) | ~(lam <= 1)):
        raise ValueError(f"discrete smoothing parameters must lie in [0, 1], got {lam}")
    return lam


def li_racine_points(data: MixedDataset, z, x, lam, b, kernel="epanechnikov",
                     support: Optional[np.ndarray] = None) -> np.ndarray:
    """Ordered-discrete x continuous product-kernel density estimate at a batch of points.

    ``support`` is a (p, 2) array of category ranges; defaults to the
    observed minimum and maximum of each discrete column.
    """
    kernel = as_kernel(kernel)
    lam = _check_lambdas(lam, data.p)
    b = np.atleast_1d(np.asarray(b, dtype=float)).ravel()
    if b.size != data.q or np.any(b <= 0):
        raise DataError(f"expected {data.q} positive continuous bandwidths, got {b}")
    zq, xq = check_point(z, x, data.p, data.q)
    if support is None:
        support = np.stack([data.z.min(axis=0), data.z.max(axis=0)], axis=1) if data.p else np.empty((0, 2))
    w = product_kernel_weights(kernel, data.x, xq, b) / float(np.prod(b)) if data.q else np.ones((zq.shape[0], data.n))
    for k in range(data.p):
        w *= ordered_kernel_weights(lam[k], data.z[:, k], zq[:, k], int(support[k, 0]), int(support[k, 1]))
    return w.sum(axis=1) / data.n


def li_racine_eval(data: MixedDataset, z, x, lam, b, kernel="epanechnikov") -> float:
    """Li-Racine style estimate at a single point."""
    zq = np.asarray([] if z is None else z).reshape(1, data.p)
    xq = np.asarray([] if x is None else x, dtype=float).reshape(1, data.q)
    return float(li_racine_points(data, zq, xq, lam, b, kernel)[0])


@dataclass(frozen=True)
class LiRacineModel:
    """Fitted ordered-discrete baseline; mirrors the evaluation surface of :class:`JKDEModel`."""

    dataset: MixedDataset
    lam: np.ndarray
    b: np.ndarray
    kernel: KernelSpec

    def evaluate_points(self, z=None, x=None) -> np.ndarray:
        return li_racine_points(self.dataset, z, x, self.lam, self.b, self.kernel)

    def evaluate_grid(self, grid: GridSpec) -> np.ndarray:
        return evaluate_grid(self, grid)
