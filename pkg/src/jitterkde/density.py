"""scikit-learn compatible density estimators for mixed discrete/continuous data.

Inputs are (n, d) arrays; the ``discrete`` parameter lists the column
indices holding integer-coded discrete variables. Query arrays use the same
column layout as the training data.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, DensityMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._rng import DEFAULT_SEED
from .bandwidth import CvConfig, column_scale, reference_bandwidths, select_cv, select_cv_li_racine
from .data import Bandwidths, MixedDataset
from .estimator import LiRacineModel, fit as fit_model
from .kernels import as_kernel
from .noise import NoiseSpec, as_noise


def _split(X, discrete, n_features: int):
    X = check_array(X, ensure_2d=True, dtype=float)
    if X.shape[1] != n_features:
        raise ValueError(f"X has {X.shape[1]} features, but the estimator was fitted with {n_features}")
    data = MixedDataset.from_matrix(X, discrete)
    return data.z, data.x


def _safe_log(dens: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(dens)


class JitteredKDE(DensityMixin, BaseEstimator):
    """Kernel density estimator that jitters discrete columns with continuous noise.

    Parameters
    ----------
    discrete : sequence of int, default=()
        Indices of integer-coded discrete columns.
    kernel : {"epanechnikov", "uniform", "biweight"}, default="epanechnikov"
    noise : {"uniform", "trapezoid"} or NoiseSpec, default="uniform"
        Noise added to the discrete columns. ``gamma1``/``gamma2`` override
        the trapezoid's plateau and support half-widths.
    gamma1, gamma2 : float, optional
    bandwidth : {"cv", "reference"} or array-like, default="cv"
        Likelihood cross-validation, the asymptotic reference rule, or fixed
        per-column bandwidths (discrete columns first, then continuous).
    cv_grid : int, default=15
    cv_floor : float, default=1e-10
    random_state : int, optional
        Seed of the jitter. ``None`` uses a fixed default so fits are always
        reproducible.

    Attributes
    ----------
    model_ : JKDEModel
    bandwidths_ : Bandwidths
    jitter_ : ndarray of shape (n_samples, n_discrete)
    """

    def __init__(self, discrete=(), kernel="epanechnikov", noise="uniform", gamma1=None, gamma2=None,
                 bandwidth="cv", cv_grid=15, cv_floor=1e-10, random_state=None):
        self.discrete = discrete
        self.kernel = kernel
        self.noise = noise
        self.gamma1 = gamma1
        self.gamma2 = gamma2
        self.bandwidth = bandwidth
        self.cv_grid = cv_grid
        self.cv_floor = cv_floor
        self.random_state = random_state

    def _noise_spec(self) -> NoiseSpec:
        if self.gamma1 is None and self.gamma2 is None:
            return as_noise(self.noise)
        shape = self.noise.shape if isinstance(self.noise, NoiseSpec) else self.noise
        return NoiseSpec(shape, self.gamma1, self.gamma2)

    def _select(self, data: MixedDataset, kernel, noise, seed: int) -> Bandwidths:
        if isinstance(self.bandwidth, str):
            if self.bandwidth == "cv":
                cfg = CvConfig(grid_size=self.cv_grid, floor=self.cv_floor, seed=seed)
                return select_cv(data, kernel, noise, cfg)
            if self.bandwidth == "reference":
                return reference_bandwidths(data.n, data.p, data.q, kernel.order, noise, column_scale(data.x))
            raise ValueError(f"unknown bandwidth rule {self.bandwidth!r}")
        if isinstance(self.bandwidth, Bandwidths):
            return self.bandwidth
        return Bandwidths.from_vector(np.asarray(self.bandwidth, dtype=float).ravel(), data.p)

    def fit(self, X, y=None):
        if isinstance(X, MixedDataset):
            data = X
            self.n_features_in_ = data.p + data.q
            self._columns = list(range(data.p))
        else:
            X = check_array(X, ensure_2d=True, dtype=float)
            self.n_features_in_ = X.shape[1]
            data = MixedDataset.from_matrix(X, self.discrete)
            self._columns = list(self.discrete)
        kernel = as_kernel(self.kernel)
        noise = self._noise_spec()
        seed = DEFAULT_SEED if self.random_state is None else int(self.random_state)
        bw = self._select(data, kernel, noise, seed)
        self.model_ = fit_model(data, kernel, noise, bw, seed)
        self.bandwidths_ = bw
        self.jitter_ = self.model_.jitter
        self.seed_ = seed
        return self

    def density(self, X) -> np.ndarray:
        """Estimated density at each row of ``X``."""
        check_is_fitted(self, "model_")
        z, x = _split(X, self._columns, self.n_features_in_)
        return self.model_.evaluate_points(z, x)

    def score_samples(self, X) -> np.ndarray:
        """Log density at each row of ``X`` (``-inf`` where the estimate is zero)."""
        return _safe_log(self.density(X))

    def score(self, X, y=None) -> float:
        """Total log-likelihood of ``X``."""
        return float(np.sum(self.score_samples(X)))


class LiRacineKDE(DensityMixin, BaseEstimator):
    """Ordered-discrete kernel baseline: lambda**|Z_i - z| weights times a continuous kernel.

    ``bandwidth`` is ``"cv"`` or a pair ``(lambdas, continuous bandwidths)``.
    """

    def __init__(self, discrete=(), kernel="epanechnikov", bandwidth="cv", cv_grid=15, cv_floor=1e-10):
        self.discrete = discrete
        self.kernel = kernel
        self.bandwidth = bandwidth
        self.cv_grid = cv_grid
        self.cv_floor = cv_floor

    def fit(self, X, y=None):
        if isinstance(X, MixedDataset):
            data = X
            self.n_features_in_ = data.p + data.q
            self._columns = list(range(data.p))
        else:
            X = check_array(X, ensure_2d=True, dtype=float)
            self.n_features_in_ = X.shape[1]
            data = MixedDataset.from_matrix(X, self.discrete)
            self._columns = list(self.discrete)
        kernel = as_kernel(self.kernel)
        if isinstance(self.bandwidth, str):
            if self.bandwidth != "cv":
                raise ValueError(f"unknown bandwidth rule {self.bandwidth!r}")
            lam, b = select_cv_li_racine(data, kernel, CvConfig(grid_size=self.cv_grid, floor=self.cv_floor))
        else:
            lam, b = self.bandwidth
        self.model_ = LiRacineModel(data, np.atleast_1d(np.asarray(lam, dtype=float)),
                                    np.atleast_1d(np.asarray(b, dtype=float)), kernel)
        self.lambdas_, self.bandwidths_ = self.model_.lam, self.model_.b
        return self

    def density(self, X) -> np.ndarray:
        check_is_fitted(self, "model_")
        z, x = _split(X, self._columns, self.n_features_in_)
        return self.model_.evaluate_points(z, x)

    def score_samples(self, X) -> np.ndarray:
        return _safe_log(self.density(X))

    def score(self, X, y=None) -> float:
        return float(np.sum(self.score_samples(X)))
