"""Jittering kernel density estimation for mixed discrete and continuous data."""
from .data import Bandwidths, DataError, GridSpec, MixedDataset
from .density import JitteredKDE, LiRacineKDE
from .estimator import JKDEModel, evaluate, evaluate_grid, fit, sample_frequency
from .kernels import KernelSpec
from .noise import NoiseSpec, validate_noise_class

__version__ = "0.1.0"

__all__ = [
    "Bandwidths",
    "DataError",
    "GridSpec",
    "JKDEModel",
    "JitteredKDE",
    "KernelSpec",
    "LiRacineKDE",
    "MixedDataset",
    "NoiseSpec",
    "evaluate",
    "evaluate_grid",
    "fit",
    "sample_frequency",
    "validate_noise_class",
]
