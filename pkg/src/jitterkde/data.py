"""Mixed discrete/continuous data containers and input validation helpers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np


class DataError(ValueError):
    """Raised for malformed or inconsistent input data."""


def _as_2d(a, n: Optional[int], dtype, name: str) -> np.ndarray:
    if a is None:
        return np.empty((0 if n is None else n, 0), dtype=dtype)
    a = np.asarray(a)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise DataError(f"{name} must be 1-D or 2-D, got shape {a.shape}")
    return a


def check_integer_array(a, name: str = "z") -> np.ndarray:
    """Cast to int64, refusing non-integral or non-finite values."""
    a = np.asarray(a)
    if a.dtype.kind in "iu":
        return a.astype(np.int64, copy=False)
    if a.dtype.kind == "b":
        return a.astype(np.int64)
    af = a.astype(float)
    if not np.all(np.isfinite(af)):
        raise DataError(f"{name} contains missing or non-finite values")
    if np.any(af != np.round(af)):
        raise DataError(f"{name} contains non-integer values")
    return af.astype(np.int64)


def check_real_array(a, name: str = "x") -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise DataError(f"{name} contains missing or non-finite values")
    return a


@dataclass(frozen=True)
class MixedDataset:
    """n observations of integer-coded discrete columns ``z`` and real columns ``x``.

    ``z`` has shape (n, p) and ``x`` has shape (n, q); either may have zero
    columns but not both.
    """

    z: np.ndarray
    x: np.ndarray
    z_names: Tuple[str, ...] = ()
    x_names: Tuple[str, ...] = ()

    def __post_init__(self):
        z = _as_2d(self.z, None, np.int64, "z")
        x = _as_2d(self.x, None, float, "x")
        if z.shape[0] == 0 and z.shape[1] == 0:
            z = np.empty((x.shape[0], 0), dtype=np.int64)
        if x.shape[0] == 0 and x.shape[1] == 0:
            x = np.empty((z.shape[0], 0), dtype=float)
        if z.shape[0] != x.shape[0]:
            raise DataError(f"z has {z.shape[0]} rows but x has {x.shape[0]}")
        if z.shape[1] + x.shape[1] == 0:
            raise DataError("dataset needs at least one column")
        z = check_integer_array(z, "z")
        x = check_real_array(x, "x")
        z.setflags(write=False)
        x.setflags(write=False)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "x", x)
        z_names = tuple(self.z_names) or tuple(f"z{k + 1}" for k in range(z.shape[1]))
        x_names = tuple(self.x_names) or tuple(f"x{j + 1}" for j in range(x.shape[1]))
        if len(z_names) != z.shape[1] or len(x_names) != x.shape[1]:
            raise DataError("column names do not match the data dimensions")
        object.__setattr__(self, "z_names", z_names)
        object.__setattr__(self, "x_names", x_names)

    @classmethod
    def from_arrays(cls, z=None, x=None, z_names=(), x_names=()) -> "MixedDataset":
        if z is None and x is None:
            raise DataError("dataset needs at least one column")
        n = len(z) if z is not None else len(x)
        return cls(_as_2d(z, n, np.int64, "z"), _as_2d(x, n, float, "x"), tuple(z_names), tuple(x_names))

    @classmethod
    def from_matrix(cls, X, discrete: Sequence[int] = (), names: Optional[Sequence[str]] = None) -> "MixedDataset":
        """Split an (n, d) matrix into discrete columns ``discrete`` and the rest."""
        X = np.asarray(X)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:
            raise DataError(f"expected a 2-D array, got shape {X.shape}")
        d = X.shape[1]
        disc = [int(k) % d if d else int(k) for k in discrete]
        if any(k >= d for k in disc) or len(set(disc)) != len(disc):
            raise DataError(f"invalid discrete column indices {list(discrete)} for {d} columns")
        cont = [j for j in range(d) if j not in disc]
        names = list(names) if names is not None else [f"c{j}" for j in range(d)]
        return cls(
            check_integer_array(X[:, disc], "discrete columns"),
            check_real_array(X[:, cont], "continuous columns"),
            tuple(names[k] for k in disc),
            tuple(names[j] for j in cont),
        )

    @property
    def n(self) -> int:
        return self.z.shape[0]

    @property
    def p(self) -> int:
        return self.z.shape[1]

    @property
    def q(self) -> int:
        return self.x.shape[1]

    @property
    def names(self) -> Tuple[str, ...]:
        return self.z_names + self.x_names

    def take(self, idx) -> "MixedDataset":
        return MixedDataset(self.z[idx], self.x[idx], self.z_names, self.x_names)


@dataclass(frozen=True)
class Bandwidths:
    """Per-variable bandwidths: ``h`` for discrete columns, ``b`` for continuous ones."""

    h: np.ndarray = field(default_factory=lambda: np.empty(0))
    b: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        h = np.atleast_1d(np.asarray(self.h, dtype=float)).ravel()
        b = np.atleast_1d(np.asarray(self.b, dtype=float)).ravel()
        if np.any(~np.isfinite(h)) or np.any(h <= 0) or np.any(~np.isfinite(b)) or np.any(b <= 0):
            raise ValueError(f"bandwidths must be finite and strictly positive, got h={h}, b={b}")
        h.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "b", b)

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.h, self.b])

    @classmethod
    def from_vector(cls, v, p: int) -> "Bandwidths":
        v = np.asarray(v, dtype=float)
        return cls(v[:p], v[p:])

    def check_dims(self, p: int, q: int):
        if self.h.size != p or self.b.size != q:
            raise DataError(f"bandwidths have dims ({self.h.size}, {self.b.size}) but data has (p={p}, q={q})")

    def to_dict(self) -> dict:
        return {"h": self.h.tolist(), "b": self.b.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Bandwidths":
        return cls(d["h"], d["b"])


@dataclass(frozen=True)
class GridSpec:
    """Tensor grid: one axis of values per discrete column, then per continuous column."""

    z_axes: Tuple[np.ndarray, ...] = ()
    x_axes: Tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        z_axes = tuple(check_integer_array(np.atleast_1d(a), "grid z axis") for a in self.z_axes)
        x_axes = tuple(check_real_array(np.atleast_1d(a), "grid x axis") for a in self.x_axes)
        if not z_axes and not x_axes:
            raise DataError("empty grid")
        if any(a.size == 0 for a in z_axes + x_axes):
            raise DataError("empty grid axis")
        object.__setattr__(self, "z_axes", z_axes)
        object.__setattr__(self, "x_axes", x_axes)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(a.size for a in self.z_axes + self.x_axes)

    def points(self) -> Tuple[np.ndarray, np.ndarray]:
        """All nodes in C order as (Z, X) arrays of shapes (m, p) and (m, q)."""
        axes = [a.astype(float) for a in self.z_axes] + list(self.x_axes)
        mesh = np.meshgrid(*axes, indexing="ij")
        flat = np.stack([g.ravel() for g in mesh], axis=1)
        p = len(self.z_axes)
        return flat[:, :p].astype(np.int64), flat[:, p:]


def check_point(z, x, p: int, q: int) -> Tuple[np.ndarray, np.ndarray]:
    """Validate a batch of query points, returning (m, p) and (m, q) arrays."""
    z = np.asarray([] if z is None else z)
    x = np.asarray([] if x is None else x, dtype=float)
    if p == 0:
        x = x.reshape(-1, q) if x.ndim < 2 else x
        z = np.empty((x.shape[0], 0), dtype=np.int64)
    elif q == 0:
        z = z.reshape(-1, p) if z.ndim < 2 else z
        x = np.empty((z.shape[0], 0))
    else:
        z = z.reshape(-1, p) if z.ndim < 2 else z
        x = x.reshape(-1, q) if x.ndim < 2 else x
    if z.shape[1] != p or x.shape[1] != q or z.shape[0] != x.shape[0]:
        raise DataError(f"query dims (z {z.shape}, x {x.shape}) do not match model (p={p}, q={q})")
    return check_integer_array(z, "query z"), check_real_array(x, "query x")
