"""Empirical distribution shifts between observational and interventional data."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import AllZeroError, FormatError, InvariantError, NonFiniteError
from .graph import Dag, transitive_closure

__all__ = [
    "DistanceMatrix",
    "wasserstein1",
    "distance_matrix",
    "oracle_distance_matrix",
    "suggest_epsilon",
    "save_distance_csv",
    "load_distance_csv",
]


def wasserstein1(a, b) -> float:
    """Exact 1-D Wasserstein-1 distance between two empirical samples.

    Integrates the absolute difference of the two empirical CDFs over the
    merged support; handles unequal sample sizes and runs in
    O((n + m) log(n + m)).
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size < 1 or b.size < 1:
        raise ValueError("both samples must contain at least one value")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise NonFiniteError("samples contain NaN or infinite values")
    a = np.sort(a)
    b = np.sort(b)
    grid = np.sort(np.concatenate([a, b]), kind="mergesort")
    deltas = np.diff(grid)
    cdf_a = np.searchsorted(a, grid[:-1], side="right") / a.size
    cdf_b = np.searchsorted(b, grid[:-1], side="right") / b.size
    return float(np.sum(np.abs(cdf_a - cdf_b) * deltas))


@dataclass(frozen=True)
class DistanceMatrix:
    """d x d marginal-shift distances with a mask of rows that carry data.

    ``values[i, j]`` is the shift of variable ``j``'s marginal under an
    intervention on ``i``; it is meaningful only for ``i`` in
    ``defined_rows``. Consumers must never read undefined rows.
    """

    values: np.ndarray
    defined_rows: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise InvariantError("values must be a square matrix")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "defined_rows", frozenset(int(i) for i in self.defined_rows))
        d = vals.shape[0]
        for i in self.defined_rows:
            if not 0 <= i < d:
                raise InvariantError(f"defined row {i} out of range for d={d}")
        rows = sorted(self.defined_rows)
        if rows:
            defined = vals[rows]
            if not np.isfinite(defined).all():
                raise NonFiniteError("defined distances contain NaN or infinity")
            if (defined < 0).any():
                raise InvariantError("distances must be nonnegative")
            if np.any(vals[rows, rows] != 0.0):
                raise InvariantError("diagonal entries must be zero")
        vals.flags.writeable = False

    @property
    def d(self) -> int:
        return self.values.shape[0]

    def defined(self, i: int) -> bool:
        return i in self.defined_rows


def distance_matrix(ds) -> DistanceMatrix:
    """Fill the per-target marginal-shift matrix of a dataset.

    For every intervention target ``i`` and every other variable ``j``, the
    entry is the Wasserstein-1 distance between the observational column
    ``j`` and the same column under the intervention on ``i``. The diagonal
    is zero by convention; rows of variables that were never intervened on
    stay undefined.
    """
    if not ds.targets:
        raise ValueError("dataset has no intervention targets")
    d = ds.d
    values = np.zeros((d, d))
    for i in sorted(ds.targets):
        block = ds.interventions[i]
        for j in range(d):
            if j == i:
                continue
            values[i, j] = wasserstein1(ds.obs[:, j], block[:, j])
    return DistanceMatrix(values, frozenset(ds.targets))


def oracle_distance_matrix(
    g: Dag, targets: Iterable[int], hi: float = 1.0, lo: float = 0.0
) -> DistanceMatrix:
    """Synthesize a noise-free shift matrix from ground-truth reachability.

    Rows of ``targets`` get ``hi`` wherever a directed path exists and
    ``lo`` elsewhere, so any threshold strictly between ``lo`` and ``hi``
    separates path pairs from non-path pairs exactly.
    """
    if not 0.0 <= lo < hi:
        raise ValueError(f"need 0 <= lo < hi, got lo={lo}, hi={hi}")
    targets = frozenset(int(t) for t in targets)
    reach = transitive_closure(g)
    values = np.zeros((g.d, g.d))
    for i in sorted(targets):
        values[i] = np.where(reach[i], hi, lo)
        values[i, i] = 0.0
    return DistanceMatrix(values, targets)


def suggest_epsilon(dm: DistanceMatrix) -> float:
    """Half of the smallest strictly positive defined distance.

    A data-driven threshold: any value below every true shift and above the
    zero-shift noise floor works, and half the smallest positive entry is
    one admissible choice.
    """
    rows = sorted(dm.defined_rows)
    if not rows:
        raise AllZeroError("distance matrix has no defined rows")
    defined = dm.values[rows]
    positive = defined[defined > 0.0]
    if positive.size == 0:
        raise AllZeroError("every defined distance is zero")
    return float(positive.min() / 2.0)


def save_distance_csv(dm: DistanceMatrix, csv_path: str | Path, meta_path: str | Path) -> None:
    """Write defined entries as ``i,j,distance`` rows (1-based) plus metadata."""
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "j", "distance"])
        for i in sorted(dm.defined_rows):
            for j in range(dm.d):
                w.writerow([i + 1, j + 1, repr(float(dm.values[i, j]))])
    meta = {"d": dm.d, "defined_rows": [i + 1 for i in sorted(dm.defined_rows)]}
    Path(meta_path).write_text(json.dumps(meta, indent=2) + "\n")


def load_distance_csv(csv_path: str | Path, meta_path: str | Path) -> DistanceMatrix:
    meta = json.loads(Path(meta_path).read_text())
    d = int(meta["d"])
    rows = frozenset(int(i) - 1 for i in meta["defined_rows"])
    values = np.zeros((d, d))
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:3]] != ["i", "j", "distance"]:
            raise FormatError(f"{csv_path}: expected header 'i,j,distance'")
        for ln, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                i, j, v = int(row[0]) - 1, int(row[1]) - 1, float(row[2])
            except (ValueError, IndexError) as exc:
                raise FormatError(f"{csv_path}:{ln}: malformed row {row!r}") from exc
            if not (0 <= i < d and 0 <= j < d):
                raise FormatError(f"{csv_path}:{ln}: index out of range for d={d}")
            values[i, j] = v
    return DistanceMatrix(values, rows)
