"""Bandwidth selection: leave-one-out likelihood cross-validation and reference rules.

Cross-validation evaluates the leave-one-out density at the jittered
observations. The jitter is drawn once from the configured seed and held
fixed across candidate bandwidths, so the objective is deterministic.

The search is a full tensor grid of log-spaced candidates around the
reference rule, followed by coordinate-wise golden-section refinement.
Pairwise kernel matrices are cached per coordinate, so memory grows as
``grid_size * n**2`` per variable; this targets desk-scale samples.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from ._rng import derive_stream
from .data import Bandwidths, DataError, MixedDataset
from .estimator import jitter, ordered_kernel_weights
from .kernels import KernelSpec, as_kernel, kernel_eval
from .noise import NoiseSpec, as_noise

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class CvConfig:
    """Settings for :func:`select_cv`.

    Attributes
    ----------
    grid_size : int
        Candidates per variable in the initial grid.
    range_lo, range_hi : float
        The grid spans ``[range_lo, range_hi]`` times the reference bandwidth.
    refine_steps : int
        Golden-section iterations per coordinate and sweep.
    sweeps : int
        Coordinate-wise refinement passes.
    floor : float
        Leave-one-out densities are floored at this value before the log.
    h_min_multiplier, h_max_multiplier : float
        Discrete bandwidths are searched on ``[h_min_multiplier, h_max_multiplier]``
        times ``min(gamma1, 1 - gamma2)``. Values below the plateau width only
        add variance, so the default lower end is the plateau width itself.
    seed : int
        Seed of the jitter used during the search.
    """

    grid_size: int = 15
    range_lo: float = 0.1
    range_hi: float = 10.0
    refine_steps: int = 30
    sweeps: int = 2
    floor: float = 1e-10
    h_min_multiplier: float = 1.0
    h_max_multiplier: float = 4.0
    seed: int = 0

    def __post_init__(self):
        if self.floor <= 0:
            raise ValueError("density floor must be positive")
        if not (0 < self.range_lo < self.range_hi):
            raise ValueError("need 0 < range_lo < range_hi")
        if not (0 < self.h_min_multiplier <= self.h_max_multiplier):
            raise ValueError("need 0 < h_min_multiplier <= h_max_multiplier")
        if self.grid_size < 2:
            raise ValueError("grid_size must be at least 2")
        if self.refine_steps < 0 or self.sweeps < 0:
            raise ValueError("refine_steps and sweeps must be nonnegative")


def reference_bandwidths(n: int, p: int, q: int, order: int = 2, noise="uniform", scale=None) -> Bandwidths:
    """Asymptotically optimal bandwidth orders.

    Discrete bandwidths take the largest value that keeps the estimator
    unbiased in the discrete direction, ``min(gamma1, 1 - gamma2)``;
    continuous bandwidths are ``scale * n**(-1 / (2 * order + q))``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    noise = as_noise(noise)
    scale = np.ones(q) if scale is None else np.broadcast_to(np.asarray(scale, dtype=float), (q,))
    h = np.full(p, noise.max_plateau_bandwidth)
    b = scale * float(n) ** (-1.0 / (2 * order + q))
    return Bandwidths(h, b)


def column_scale(x: np.ndarray) -> np.ndarray:
    """Sample standard deviation per column, 1 where it vanishes."""
    if x.shape[0] < 2:
        return np.ones(x.shape[1])
    s = x.std(axis=0, ddof=1)
    return np.where(s > 0, s, 1.0)


class _LooObjective:
    """Leave-one-out log-likelihood over per-coordinate pairwise weight matrices.

    ``factories[k](theta)`` returns the (n, n) matrix whose entry (i, j) is
    the coordinate-k kernel weight of observation j at observation i.
    """

    def __init__(self, factories: Sequence[Callable[[float], np.ndarray]], n: int, floor: float):
        self.factories = list(factories)
        self.n = n
        self.floor = floor
        self._cache: List[Dict[float, np.ndarray]] = [dict() for _ in factories]
        self.n_evals = 0

    def matrix(self, k: int, theta: float) -> np.ndarray:
        cache = self._cache[k]
        m = cache.get(theta)
        if m is None:
            m = self.factories[k](theta)
            np.fill_diagonal(m, 0.0)
            cache[theta] = m
        return m

    def forget(self, k: int, keep: Sequence[float]):
        keep = set(keep)
        self._cache[k] = {t: m for t, m in self._cache[k].items() if t in keep}

    def __call__(self, theta: Sequence[float]) -> float:
        self.n_evals += 1
        prod = self.matrix(0, theta[0])
        for k in range(1, len(theta)):
            prod = prod * self.matrix(k, theta[k])
        dens = prod.sum(axis=1) / (self.n - 1)
        return float(np.sum(np.log(np.maximum(dens, self.floor))))


def _scaled_kernel_factory(kernel: KernelSpec, col: np.ndarray) -> Callable[[float], np.ndarray]:
    diff = col[None, :] - col[:, None]

    def factory(bw: float) -> np.ndarray:
        return kernel_eval(kernel, diff / bw) / bw

    return factory


def _ordered_factory(col: np.ndarray) -> Callable[[float], np.ndarray]:
    lo, hi = int(col.min()), int(col.max())

    def factory(lam: float) -> np.ndarray:
        return ordered_kernel_weights(lam, col, col, lo, hi)

    return factory


def _jkde_objective(data: MixedDataset, kernel: KernelSpec, noise: NoiseSpec, seed: int, floor: float) -> _LooObjective:
    if data.n < 2:
        raise DataError("leave-one-out cross-validation needs at least 2 observations")
    w = data.z + jitter(data, noise, derive_stream(seed))
    cols = [w[:, k] for k in range(data.p)] + [data.x[:, j] for j in range(data.q)]
    return _LooObjective([_scaled_kernel_factory(kernel, c) for c in cols], data.n, floor)


def loo_loglik(data: MixedDataset, kernel, noise, bandwidths: Bandwidths, seed: int = 0, floor: float = 1e-10) -> float:
    """Sum over i of log max(f_{-i}(Z_i + E_i, X_i), floor).

    ``f_{-i}`` is the jittering estimator fitted without observation i; the
    jitter comes from ``seed`` exactly as in :func:`jitterkde.estimator.fit`.
    """
    kernel, noise = as_kernel(kernel), as_noise(noise)
    if not isinstance(bandwidths, Bandwidths):
        bandwidths = Bandwidths.from_vector(bandwidths, data.p)
    bandwidths.check_dims(data.p, data.q)
    return _jkde_objective(data, kernel, noise, seed, floor)(tuple(bandwidths.vector))


def li_racine_loo_loglik(data: MixedDataset, kernel, lam, b, floor: float = 1e-10) -> float:
    """Leave-one-out log-likelihood of the ordered-discrete baseline at the raw observations."""
    kernel = as_kernel(kernel)
    if data.n < 2:
        raise DataError("leave-one-out cross-validation needs at least 2 observations")
    obj = _li_racine_objective(data, kernel, floor)
    return obj(tuple(np.atleast_1d(lam).tolist()) + tuple(np.atleast_1d(b).tolist()))


def _li_racine_objective(data: MixedDataset, kernel: KernelSpec, floor: float) -> _LooObjective:
    if data.n < 2:
        raise DataError("leave-one-out cross-validation needs at least 2 observations")
    factories = [_ordered_factory(data.z[:, k]) for k in range(data.p)]
    factories += [_scaled_kernel_factory(kernel, data.x[:, j]) for j in range(data.q)]
    return _LooObjective(factories, data.n, floor)


@dataclass
class _Coordinate:
    grid: np.ndarray
    lower: float
    upper: float
    log: bool


def _golden_max(f: Callable[[float], float], a: float, b: float, steps: int, log: bool) -> Tuple[float, float]:
    """Golden-section search for a maximum of ``f`` on [a, b]; returns (argmax, max) of evaluated points."""
    to = np.log if log else (lambda v: v)
    back = np.exp if log else (lambda v: v)
    lo, hi = float(to(a)), float(to(b))
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = f(float(back(c))), f(float(back(d)))
    best = (float(back(c)), fc) if fc >= fd else (float(back(d)), fd)
    for _ in range(steps):
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = f(float(back(c)))
            cand = (float(back(c)), fc)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = f(float(back(d)))
            cand = (float(back(d)), fd)
        if cand[1] > best[1]:
            best = cand
    return best


def _search(obj: _LooObjective, coords: List[_Coordinate], config: CvConfig) -> Tuple[np.ndarray, float]:
    best_theta, best_val = None, -np.inf
    for combo in itertools.product(*[c.grid for c in coords]):
        val = obj(combo)
        if val > best_val:
            best_theta, best_val = list(combo), val
    for _ in range(config.sweeps):
        for k, c in enumerate(coords):
            cur = best_theta[k]
            idx = int(np.argmin(np.abs(c.grid - cur)))
            a = c.grid[max(idx - 1, 0)]
            b = c.grid[min(idx + 1, len(c.grid) - 1)]
            if c.log:
                ratio = c.grid[1] / c.grid[0]
                a, b = min(a, cur / ratio), max(b, cur * ratio)
            else:
                step = c.grid[1] - c.grid[0]
                a, b = min(a, cur - step), max(b, cur + step)
            a, b = max(a, c.lower), min(b, c.upper)
            if not b > a or config.refine_steps == 0:
                continue

            def f(v, k=k):
                theta = list(best_theta)
                theta[k] = v
                return obj(theta)

            arg, val = _golden_max(f, a, b, config.refine_steps, c.log)
            obj.forget(k, list(c.grid) + [best_theta[k]])
            if val > best_val:
                best_theta[k], best_val = arg, val
    return np.asarray(best_theta, dtype=float), best_val


def _log_grid(center: float, config: CvConfig) -> np.ndarray:
    return center * np.geomspace(config.range_lo, config.range_hi, config.grid_size)


def select_cv(data: MixedDataset, kernel="epanechnikov", noise="uniform", config: CvConfig = CvConfig(),
              return_score: bool = False):
    """Maximize the leave-one-out likelihood over per-variable bandwidths.

    Returns the selected :class:`Bandwidths` (and the attained score when
    ``return_score`` is set). The result scores at least as well as every
    grid candidate.
    """
    kernel, noise = as_kernel(kernel), as_noise(noise)
    obj = _jkde_objective(data, kernel, noise, config.seed, config.floor)
    ref = reference_bandwidths(data.n, data.p, data.q, kernel.order, noise, column_scale(data.x))
    plateau = noise.max_plateau_bandwidth
    h_lo, h_hi = config.h_min_multiplier * plateau, config.h_max_multiplier * plateau
    h_grid = np.geomspace(h_lo, h_hi, config.grid_size) if h_hi > h_lo else np.array([h_lo])
    coords = [_Coordinate(h_grid, h_lo, h_hi, True) for _ in ref.h]
    coords += [_Coordinate(_log_grid(b, config), 0.0, np.inf, True) for b in ref.b]
    theta, score = _search(obj, coords, config)
    bw = Bandwidths.from_vector(theta, data.p)
    return (bw, score) if return_score else bw


def select_cv_li_racine(data: MixedDataset, kernel="epanechnikov", config: CvConfig = CvConfig(),
                        return_score: bool = False):
    """Cross-validated (lambda, b) for the ordered-discrete baseline.

    Discrete smoothing parameters are searched on an evenly spaced grid over
    [0, 1]; continuous bandwidths as in :func:`select_cv`.
    """
    kernel = as_kernel(kernel)
    obj = _li_racine_objective(data, kernel, config.floor)
    ref = reference_bandwidths(data.n, 0, data.q, kernel.order, "uniform", column_scale(data.x))
    coords = [_Coordinate(np.linspace(0.0, 1.0, config.grid_size), 0.0, 1.0, False) for _ in range(data.p)]
    coords += [_Coordinate(_log_grid(b, config), 0.0, np.inf, True) for b in ref.b]
    theta, score = _search(obj, coords, config)
    lam, b = theta[: data.p], theta[data.p:]
    return ((lam, b), score) if return_score else (lam, b)
