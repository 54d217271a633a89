"""Synthetic instances and CSV ingestion."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Dataset, Query


class LoadError(ValueError):
    pass


@dataclass(frozen=True)
class SubspaceSpec:
    n: int
    m: int
    p: int
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        if not 1 <= self.p <= self.m:
            raise ValueError(f"need 1 <= p <= m, got p={self.p}, m={self.m}")


@dataclass(frozen=True, eq=False)
class SubspaceInstance:
    basis: np.ndarray  # m x p, unit-norm columns
    coefficients: np.ndarray  # (n + 1) x p, unit rows; last row is the query
    scale: float
    data: Dataset
    query: Query


def _scale_to_half(points: np.ndarray) -> float:
    peak = np.abs(points).max()
    c = 0.5 / peak
    while c * peak > 0.5:
        c = np.nextafter(c, 0.0)
    return float(c)


def subspace_instance(spec: SubspaceSpec) -> SubspaceInstance:
    rng = np.random.default_rng(spec.seed)
    Q = rng.standard_normal((spec.m, spec.p))
    Q /= np.linalg.norm(Q, axis=0)
    Y = rng.standard_normal((spec.n + 1, spec.p))
    Y /= np.linalg.norm(Y, axis=1, keepdims=True)
    P = Y @ Q.T
    c = _scale_to_half(P)
    P *= c
    meta = {"generator": "subspace", "n": spec.n, "m": spec.m, "p": spec.p, "seed": spec.seed, "scale": c}
    return SubspaceInstance(Q, Y, c, Dataset(P[:-1], meta), Query(P[-1]))


def generate_subspace(spec: SubspaceSpec) -> tuple[Dataset, Query]:
    """Points c*Q*y with Gaussian Q (unit columns) and y uniform on the sphere.

    The scale c is shared by all n + 1 points (query included) and is the
    largest value keeping every coordinate within [-1/2, 1/2].
    """
    inst = subspace_instance(spec)
    return inst.data, inst.query


def generate_coherent(n: int, m: int, seed: int = 0) -> tuple[Dataset, Query]:
    """All mass on the first coordinate: per-coordinate sampling is blind.

    Dataset values are an evenly spaced grid over [-1/2, 1/2] in shuffled
    order; the query sits a quarter step off one grid point so no two points
    are equidistant from it.
    """
    if n < 2 or m < 1:
        raise ValueError(f"need n >= 2 and m >= 1, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    grid = rng.permutation(np.linspace(-0.5, 0.5, n))
    step = 1.0 / (n - 1)
    anchor = grid[rng.integers(n)]
    qv = anchor + step / 4 if anchor + step / 4 <= 0.5 else anchor - step / 4
    X = np.zeros((n, m))
    X[:, 0] = grid
    q = np.zeros(m)
    q[0] = qv
    meta = {"generator": "coherent", "n": n, "m": m, "seed": seed}
    return Dataset(X, meta), Query(q)


def _parse_rows(path) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8") as f:
        return [row for row in csv.reader(f) if row and any(cell.strip() for cell in row)]


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_matrix(path) -> np.ndarray:
    rows = _parse_rows(path)
    if not rows:
        raise LoadError(f"{path}: no data rows")
    if not all(_is_number(c) for c in rows[0]):
        rows = rows[1:]  # header
        if not rows:
            raise LoadError(f"{path}: header but no data rows")
    width = len(rows[0])
    out = np.empty((len(rows), width))
    for r, row in enumerate(rows):
        if len(row) != width:
            raise LoadError(f"{path}: row {r + 1} has {len(row)} columns, expected {width}")
        for c, cell in enumerate(row):
            try:
                out[r, c] = float(cell)
            except ValueError:
                raise LoadError(f"{path}: non-numeric cell {cell!r} at row {r + 1}, column {c + 1}") from None
    if not np.all(np.isfinite(out)):
        r, c = np.argwhere(~np.isfinite(out))[0]
        raise LoadError(f"{path}: non-finite value at row {r + 1}, column {c + 1}")
    return out


def sidecar_path(path) -> Path:
    return Path(os.fspath(path) + ".meta.json")


def load_csv(path, normalize: bool = False) -> Dataset:
    """Read one point per row.

    With ``normalize`` the global value range is mapped affinely onto
    [-1/2, 1/2] (recorded under ``metadata["transform"]``); otherwise values
    must already be within that range.
    """
    X = read_matrix(path)
    meta = {"source": os.fspath(path)}
    if normalize:
        lo, hi = float(X.min()), float(X.max())
        span = hi - lo
        if span > 0:
            X = (X - lo) / span - 0.5
        else:
            X = np.zeros_like(X)
        meta["transform"] = {"kind": "affine", "min": lo, "max": hi}
    else:
        bad = np.argwhere(np.abs(X) > 0.5)
        if bad.size:
            r, c = bad[0]
            raise LoadError(f"{path}: value {X[r, c]!r} at row {r + 1}, column {c + 1} is outside [-1/2, 1/2]")
    return Dataset(X, meta)


def write_csv(path, points: np.ndarray, metadata: dict | None = None) -> None:
    """Write rows with round-trip exact floats; metadata goes to a JSON sidecar."""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        for row in points:
            w.writerow([repr(float(v)) for v in row])
    if metadata:
        sidecar_path(path).write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_instance(path, data: Dataset, query: Query) -> None:
    """Dataset rows followed by the query as the final row."""
    meta = dict(data.metadata)
    meta["query_row"] = data.n
    write_csv(path, np.vstack([data.points, query.coords]), meta)


def load_instance(path, normalize: bool = False) -> tuple[Dataset, Query]:
    """Inverse of :func:`write_instance`: the last row is the query."""
    full = load_csv(path, normalize)
    if full.n < 3:
        raise LoadError(f"{path}: an instance needs at least two points plus a query row")
    return Dataset(full.points[:-1], full.metadata), Query(full.points[-1])
