"""CSV datasets, grid specifications and JSON model persistence."""
from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .data import Bandwidths, DataError, GridSpec, MixedDataset
from .estimator import JKDEModel, fit
from .kernels import KernelSpec
from .noise import NoiseSpec

MODEL_FORMAT = "jitterkde-model"
MODEL_VERSION = 1


@dataclass(frozen=True)
class DatasetSchema:
    """Column names and kinds; ``continuous=None`` means every non-discrete column."""

    discrete: Tuple[str, ...] = ()
    continuous: Tuple[str, ...] = None

    def resolve(self, header: Sequence[str]) -> Tuple[List[str], List[str]]:
        missing = [c for c in self.discrete if c not in header]
        if self.continuous is not None:
            missing += [c for c in self.continuous if c not in header]
        if missing:
            raise DataError(f"missing column(s): {', '.join(missing)}")
        cont = list(self.continuous) if self.continuous is not None else [c for c in header if c not in self.discrete]
        if not self.discrete and not cont:
            raise DataError("schema selects no columns")
        return list(self.discrete), cont


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def parse_dataset(path, schema: DatasetSchema = DatasetSchema()) -> MixedDataset:
    """Read a CSV with a header row into a :class:`MixedDataset`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError("empty dataset: file has no header")
        header = [h.strip() for h in header]
        disc, cont = schema.resolve(header)
        idx = {c: header.index(c) for c in disc + cont}
        z_rows, x_rows = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not v.strip() for v in row):
                continue
            if len(row) != len(header):
                raise DataError(f"row {lineno}: expected {len(header)} fields, got {len(row)}")
            z_rows.append([_parse_int(row[idx[c]], lineno, c) for c in disc])
            x_rows.append([_parse_float(row[idx[c]], lineno, c) for c in cont])
    if not z_rows:
        raise DataError("empty dataset")
    n = len(z_rows)
    z = np.asarray(z_rows, dtype=np.int64).reshape(n, len(disc))
    x = np.asarray(x_rows, dtype=float).reshape(n, len(cont))
    return MixedDataset(z, x, tuple(disc), tuple(cont))


def _parse_int(text: str, lineno: int, col: str) -> int:
    s = text.strip()
    try:
        return int(s)
    except ValueError:
        pass
    try:
        v = float(s)
    except ValueError:
        raise DataError(f"row {lineno}, column {col!r}: {text!r} is not an integer") from None
    if not math.isfinite(v) or v != int(v):
        raise DataError(f"row {lineno}, column {col!r}: {text!r} is not an integer")
    return int(v)


def _parse_float(text: str, lineno: int, col: str) -> float:
    try:
        v = float(text.strip())
    except ValueError:
        raise DataError(f"row {lineno}, column {col!r}: {text!r} is not a number") from None
    if not math.isfinite(v):
        raise DataError(f"row {lineno}, column {col!r}: missing or non-finite value")
    return v


def _parse_axis(spec: str, integer: bool) -> np.ndarray:
    spec = spec.strip()
    if not spec:
        raise DataError("empty grid axis")
    parts = spec.split(":")
    try:
        if len(parts) == 1:
            vals = [float(v) for v in spec.split(",")]
        elif len(parts) in (2, 3):
            start, stop = float(parts[0]), float(parts[-1])
            step = float(parts[1]) if len(parts) == 3 else 1.0
            if step <= 0 or stop < start:
                raise DataError(f"bad range {spec!r}")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            vals = [round(start + k * step, 12) for k in range(count)]
        else:
            raise DataError(f"bad grid axis {spec!r}")
    except ValueError:
        raise DataError(f"bad grid axis {spec!r}") from None
    arr = np.asarray(vals, dtype=float)
    if integer:
        if np.any(arr != np.round(arr)):
            raise DataError(f"discrete grid axis {spec!r} has non-integer values")
        return arr.astype(np.int64)
    return arr


def parse_grid(text: str, z_names: Sequence[str], x_names: Sequence[str]) -> GridSpec:
    """Parse ``"z1=0:15;x1=-2:0.4:2"`` into a grid over the model's columns.

    Each axis is ``start:stop`` (unit step), ``start:step:stop`` (inclusive)
    or a comma-separated list. Every model column must be given.
    """
    axes: Dict[str, str] = {}
    for part in filter(None, (s.strip() for s in text.split(";"))):
        name, eq, spec = part.partition("=")
        if not eq:
            raise DataError(f"grid entry {part!r} lacks '='")
        axes[name.strip()] = spec
    unknown = set(axes) - set(z_names) - set(x_names)
    if unknown:
        raise DataError(f"grid names unknown column(s): {', '.join(sorted(unknown))}")
    missing = [c for c in list(z_names) + list(x_names) if c not in axes]
    if missing:
        raise DataError(f"grid lacks column(s): {', '.join(missing)}")
    return GridSpec(tuple(_parse_axis(axes[c], True) for c in z_names),
                    tuple(_parse_axis(axes[c], False) for c in x_names))


def write_grid_csv(path_or_fh, model, grid: GridSpec) -> None:
    """Write ``z..., x..., density`` rows, one per grid node, with round-trip float formatting."""
    zq, xq = grid.points()
    dens = model.evaluate_points(zq, xq)
    d = model.dataset
    own = isinstance(path_or_fh, (str, os.PathLike))
    fh = open(path_or_fh, "w", newline="") if own else path_or_fh
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(d.z_names) + list(d.x_names) + ["density"])
        for i in range(dens.size):
            w.writerow([str(v) for v in zq[i]] + [repr(float(v)) for v in xq[i]] + [repr(float(dens[i]))])
    finally:
        if own:
            fh.close()


def model_to_dict(model: JKDEModel, dataset_path=None, embed_data: bool = False) -> dict:
    d = model.dataset
    ref = {"discrete": list(d.z_names), "continuous": list(d.x_names), "n": d.n}
    if dataset_path is not None:
        ref["path"] = os.fspath(dataset_path)
        ref["sha256"] = _sha256(dataset_path)
    if embed_data or dataset_path is None:
        ref["z"] = d.z.tolist()
        ref["x"] = d.x.tolist()
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "dataset": ref,
        "seed": model.seed,
        "kernel": model.kernel.to_dict(),
        "noise": model.noise.to_dict(),
        "bandwidths": model.bandwidths.to_dict(),
        "jitter": model.jitter.tolist(),
    }


def model_from_dict(doc: dict, base_dir=".") -> JKDEModel:
    if doc.get("format") != MODEL_FORMAT:
        raise DataError("not a jitterkde model document")
    ref = doc["dataset"]
    disc, cont = tuple(ref["discrete"]), tuple(ref["continuous"])
    if "z" in ref:
        n = int(ref["n"])
        data = MixedDataset(np.asarray(ref["z"], dtype=np.int64).reshape(n, len(disc)),
                            np.asarray(ref["x"], dtype=float).reshape(n, len(cont)), disc, cont)
    else:
        path = ref["path"]
        if not os.path.isabs(path) and not os.path.exists(path):
            path = os.path.join(base_dir, path)
        if not os.path.exists(path):
            raise DataError(f"dataset {ref['path']!r} referenced by the model was not found")
        if _sha256(path) != ref["sha256"]:
            raise DataError(f"dataset {path!r} changed since the model was fitted")
        data = parse_dataset(path, DatasetSchema(disc, cont))
    return fit(data, KernelSpec.from_dict(doc["kernel"]), NoiseSpec.from_dict(doc["noise"]),
               Bandwidths.from_dict(doc["bandwidths"]), int(doc["seed"]),
               jitter_matrix=np.asarray(doc["jitter"], dtype=float).reshape(data.n, data.p))


def save_model(model: JKDEModel, path, dataset_path=None, embed_data: bool = False) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(model, dataset_path, embed_data), fh, indent=1)
        fh.write("\n")


def load_model(path) -> JKDEModel:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"cannot parse model file: {exc}") from None
    return model_from_dict(doc, os.path.dirname(os.path.abspath(path)))
