"""Monte Carlo experiments: RASE comparisons and empirical convergence rates.

Data follow the benchmark design: independent Binomial(m, theta) discrete
columns and standard normal continuous columns. Every replicate draws from
a stream keyed by (master seed, n, replicate, ...), so results do not depend
on execution order.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from ._rng import derive_seed, derive_stream
from .bandwidth import CvConfig, column_scale, reference_bandwidths, select_cv, select_cv_li_racine
from .data import Bandwidths, GridSpec, MixedDataset
from .estimator import LiRacineModel, fit, sample_frequency_points
from .kernels import as_kernel
from .noise import NoiseSpec, as_noise

ESTIMATORS = ("jkde", "jkde2", "liracine", "jkde-ref", "jkde2-ref", "freq")
_X_GRID = np.round(np.arange(-2.0, 2.0 + 1e-9, 0.4), 10)


def true_density(z, x, m: int, theta: float = 0.3) -> float:
    """Product of Binomial(m, theta) pmfs and standard normal densities."""
    z = np.atleast_1d(np.asarray(z if z is not None else [], dtype=float))
    x = np.atleast_1d(np.asarray(x if x is not None else [], dtype=float))
    return float(true_density_points(z.reshape(1, -1), x.reshape(1, -1), m, theta)[0])


def true_density_points(z: np.ndarray, x: np.ndarray, m: int, theta: float = 0.3) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    out = np.ones(max(z.shape[0], x.shape[0]))
    if z.size:
        integral = z == np.round(z)
        pz = stats.binom.pmf(np.round(z), m, theta) * integral
        out *= np.prod(pz, axis=1)
    if x.size:
        out *= np.prod(stats.norm.pdf(x), axis=1)
    return out


def simulate_data(stream: np.random.Generator, n: int, p: int, q: int, m: int, theta: float = 0.3) -> MixedDataset:
    z = stream.binomial(m, theta, size=(n, p))
    x = stream.standard_normal(size=(n, q))
    return MixedDataset(z, x)


def rase(estimates, truths) -> float:
    """Root of the summed (not averaged) squared errors over all grid nodes."""
    estimates = np.asarray(estimates, dtype=float)
    truths = np.asarray(truths, dtype=float)
    if estimates.shape != truths.shape:
        raise ValueError(f"shape mismatch: {estimates.shape} vs {truths.shape}")
    return float(np.sqrt(np.sum((estimates - truths) ** 2)))


def benchmark_grid(p: int, q: int, m: int) -> GridSpec:
    """Z = {0, ..., m} per discrete column, X = {-2, -1.6, ..., 2} per continuous column."""
    return GridSpec(tuple(np.arange(m + 1) for _ in range(p)), tuple(_X_GRID for _ in range(q)))


@dataclass(frozen=True)
class ScenarioConfig:
    p: int = 1
    q: int = 1
    m: int = 1
    theta: float = 0.3
    n_list: Tuple[int, ...] = (50, 200)
    n_sim: int = 200
    estimators: Tuple[str, ...] = ("jkde", "jkde2", "liracine")
    kernel: str = "epanechnikov"
    cv_grid: int = 15
    seed: int = 42

    def __post_init__(self):
        if self.n_sim < 1 or self.m < 1 or min(self.n_list) < 2:
            raise ValueError("need n_sim >= 1, m >= 1 and every n >= 2")
        if self.p < 0 or self.q < 0 or self.p + self.q == 0:
            raise ValueError("need p, q >= 0 with p + q >= 1")
        unknown = set(self.estimators) - set(ESTIMATORS)
        if unknown:
            raise ValueError(f"unknown estimators {sorted(unknown)}; choose from {ESTIMATORS}")
        if "freq" in self.estimators and self.q:
            raise ValueError("the frequency estimator needs q = 0")

    @property
    def label(self) -> str:
        return f"p={self.p},q={self.q},m={self.m}"

    @classmethod
    def parse(cls, text: str, **kwargs) -> "ScenarioConfig":
        """Parse ``"p=1,q=1,m=15"``."""
        fields = {}
        for part in filter(None, (s.strip() for s in text.split(","))):
            key, _, val = part.partition("=")
            if key not in ("p", "q", "m", "theta"):
                raise ValueError(f"unknown scenario field {key!r}")
            fields[key] = float(val) if key == "theta" else int(val)
        return cls(**fields, **kwargs)


@dataclass
class RiskTable:
    """RASE values per (estimator, n), one entry per replicate."""

    scenario: str
    rase: Dict[Tuple[str, int], np.ndarray] = field(default_factory=dict)

    def median(self, estimator: str, n: int) -> float:
        return float(np.median(self.rase[(estimator, n)]))

    def quantiles(self, estimator: str, n: int, qs=(0.1, 0.25, 0.5, 0.75, 0.9)) -> np.ndarray:
        return np.quantile(self.rase[(estimator, n)], qs)

    def rows(self):
        for (est, n), vals in self.rase.items():
            for r, v in enumerate(vals):
                yield self.scenario, est, n, r, float(v)


def write_risk_csv(tables: Sequence[RiskTable], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["scenario", "estimator", "n", "replicate", "rase"])
        for t in tables:
            for row in t.rows():
                w.writerow(row[:4] + (repr(row[4]),))


def _fit_estimator(name: str, data: MixedDataset, cfg: ScenarioConfig, seed: int):
    kernel = as_kernel(cfg.kernel)
    if name == "freq":
        return _FrequencyModel(data)
    if name == "liracine":
        lam, b = select_cv_li_racine(data, kernel, CvConfig(grid_size=cfg.cv_grid))
        return LiRacineModel(data, lam, b, kernel)
    noise = NoiseSpec.uniform() if name.startswith("jkde-") or name == "jkde" else NoiseSpec.trapezoid()
    if name.endswith("-ref"):
        bw = reference_bandwidths(data.n, data.p, data.q, kernel.order, noise, column_scale(data.x))
    else:
        bw = select_cv(data, kernel, noise, CvConfig(grid_size=cfg.cv_grid, seed=seed))
    return fit(data, kernel, noise, bw, seed)


@dataclass(frozen=True)
class _FrequencyModel:
    dataset: MixedDataset

    def evaluate_points(self, z, x=None):
        return sample_frequency_points(self.dataset, z)


def run_replicate(cfg: ScenarioConfig, n: int, r: int) -> Dict[str, float]:
    """RASE of every configured estimator on replicate ``r`` at sample size ``n``."""
    data = simulate_data(derive_stream(cfg.seed, n, r), n, cfg.p, cfg.q, cfg.m, cfg.theta)
    grid = benchmark_grid(cfg.p, cfg.q, cfg.m)
    zq, xq = grid.points()
    truth = true_density_points(zq, xq, cfg.m, cfg.theta)
    out = {}
    for name in cfg.estimators:
        model = _fit_estimator(name, data, cfg, derive_seed(cfg.seed, n, r, ESTIMATORS.index(name)))
        out[name] = rase(model.evaluate_points(zq, xq), truth)
    return out


def _run_chunk(args):
    cfg, tasks = args
    return [(n, r, run_replicate(cfg, n, r)) for n, r in tasks]


def run_scenario(cfg: ScenarioConfig, threads: int = 1) -> RiskTable:
    """Simulate, select bandwidths, fit and score every estimator on every replicate."""
    tasks = [(n, r) for n in cfg.n_list for r in range(cfg.n_sim)]
    if threads > 1:
        chunks = [tasks[i::threads] for i in range(threads)]
        with ProcessPoolExecutor(threads) as ex:
            results = [res for part in ex.map(_run_chunk, [(cfg, c) for c in chunks]) for res in part]
    else:
        results = _run_chunk((cfg, tasks))
    table = RiskTable(cfg.label, {(e, n): np.empty(cfg.n_sim) for n in cfg.n_list for e in cfg.estimators})
    for n, r, vals in results:
        for e, v in vals.items():
            table.rase[(e, n)][r] = v
    return table


@dataclass(frozen=True)
class RateConfig:
    """Convergence-rate experiment at a fixed point (or finite grid) with reference bandwidths.

    ``b_scale`` multiplies ``n**(-1 / (2 * ell + q))``; ``ladder`` must be
    strictly increasing with at least four sizes.
    """

    p: int = 1
    q: int = 1
    ell: int = 2
    m: int = 1
    theta: float = 0.3
    z: Optional[Tuple[int, ...]] = None
    x: Optional[Tuple[float, ...]] = None
    ladder: Tuple[int, ...] = (250, 500, 1000, 2000, 4000, 8000, 16000)
    reps: int = 400
    error_mode: str = "pointwise"
    kernel: str = "epanechnikov"
    noise: str = "uniform"
    b_scale: float = 1.0
    seed: int = 7

    def __post_init__(self):
        lad = np.asarray(self.ladder)
        if lad.size < 4 or np.any(np.diff(lad) <= 0) or lad[0] < 1:
            raise ValueError("ladder must be strictly increasing with at least 4 sample sizes")
        if self.error_mode not in ("pointwise", "sup"):
            raise ValueError("error_mode must be 'pointwise' or 'sup'")
        if self.reps < 2:
            raise ValueError("need at least 2 replicates")
        if self.p + self.q == 0:
            raise ValueError("need p + q >= 1")
        if as_kernel(self.kernel).order != self.ell:
            raise ValueError(f"kernel {self.kernel!r} has order {as_kernel(self.kernel).order}, not {self.ell}")

    def points(self) -> Tuple[np.ndarray, np.ndarray]:
        if self.error_mode == "sup":
            return benchmark_grid(self.p, self.q, self.m).points()
        z = np.zeros(self.p, dtype=np.int64) if self.z is None else np.asarray(self.z, dtype=np.int64)
        x = np.zeros(self.q) if self.x is None else np.asarray(self.x, dtype=float)
        return z.reshape(1, self.p), x.reshape(1, self.q)


@dataclass
class RateResult:
    slope: float
    stderr: float
    intercept: float
    ladder: np.ndarray
    rmse: np.ndarray
    target: float

    def rows(self):
        for n, e in zip(self.ladder, self.rmse):
            yield int(n), float(e)


def rate_experiment(cfg: RateConfig) -> RateResult:
    """Least-squares slope of log RMSE against log n.

    The theoretical slope is ``-ell / (2 ell + q)``; for q = 0 it is -1/2.
    """
    kernel, noise = as_kernel(cfg.kernel), as_noise(cfg.noise)
    zq, xq = cfg.points()
    truth = true_density_points(zq, xq, cfg.m, cfg.theta)
    rmse = []
    for n in cfg.ladder:
        bw = reference_bandwidths(n, cfg.p, cfg.q, cfg.ell, noise, np.full(cfg.q, cfg.b_scale))
        errs = np.empty(cfg.reps)
        for r in range(cfg.reps):
            data = simulate_data(derive_stream(cfg.seed, n, r), n, cfg.p, cfg.q, cfg.m, cfg.theta)
            model = fit(data, kernel, noise, bw, derive_seed(cfg.seed, n, r, 1))
            errs[r] = np.max(np.abs(model.evaluate_points(zq, xq) - truth))
        rmse.append(math.sqrt(np.mean(errs**2)))
    lad = np.asarray(cfg.ladder, dtype=float)
    rmse = np.asarray(rmse)
    fitres = stats.linregress(np.log(lad), np.log(rmse))
    target = -cfg.ell / (2 * cfg.ell + cfg.q) if cfg.q else -0.5
    return RateResult(float(fitres.slope), float(fitres.stderr), float(fitres.intercept), lad, rmse, target)


def geometric_ladder(start: int, stop: int, count: int) -> Tuple[int, ...]:
    return tuple(int(round(v)) for v in np.geomspace(start, stop, count))


@dataclass
class PointReplicates:
    """Estimates at one cell over independent refits (fresh data and jitter each time)."""

    jittered: np.ndarray
    frequency: np.ndarray
    truth: float


def discrete_point_replicates(probs: Sequence[float], z: int, n: int, h: float, reps: int,
                              kernel="epanechnikov", noise="uniform", seed: int = 0,
                              z_min: int = 0) -> PointReplicates:
    """Jittered-estimator and sample-frequency values at cell ``z`` for a discrete pmf."""
    kernel, noise = as_kernel(kernel), as_noise(noise)
    probs = np.asarray(probs, dtype=float)
    bw = Bandwidths([h])
    jit = np.empty(reps)
    freq = np.empty(reps)
    zq = np.array([[z]])
    for r in range(reps):
        stream = derive_stream(seed, n, r)
        data = MixedDataset.from_arrays(z=z_min + stream.choice(probs.size, size=n, p=probs))
        model = fit(data, kernel, noise, bw, derive_seed(seed, n, r, 1))
        jit[r] = model.evaluate_points(zq)[0]
        freq[r] = sample_frequency_points(data, zq)[0]
    truth = float(probs[z - z_min]) if 0 <= z - z_min < probs.size else 0.0
    return PointReplicates(jit, freq, truth)
