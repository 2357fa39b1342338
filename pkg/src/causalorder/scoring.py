"""Scores ranking candidate causal orders and candidate graphs."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import UndefinedRowError
from .graph import CausalOrder, Dag
from .stats import DistanceMatrix

__all__ = ["ScoreParams", "pair_contributions", "score_order", "score_graph"]


@dataclass(frozen=True)
class ScoreParams:
    """Threshold ``epsilon`` and ordering-bonus weight ``c``.

    ``c <= epsilon`` is allowed but warned about: the bonus is meant to
    dominate the sub-threshold terms.
    """

    epsilon: float
    c: float

    def __post_init__(self):
        if self.epsilon < 0 or self.c < 0:
            raise ValueError("epsilon and c must be nonnegative")
        if self.c <= self.epsilon:
            warnings.warn(
                f"c={self.c} <= epsilon={self.epsilon}; the ordering bonus may "
                "not dominate sub-threshold terms",
                UserWarning,
                stacklevel=2,
            )


def pair_contributions(dm: DistanceMatrix, params: ScoreParams) -> np.ndarray:
    """Per-pair score terms ``(D(i,j) - eps) + c*d*[D(i,j) > eps]``.

    Entry (i, j) is the amount added to an order's score when target ``i``
    is placed before ``j``. Undefined rows and the diagonal contribute
    exactly zero, so a full masked sum over this matrix never reads
    undefined data.
    """
    d = dm.d
    contrib = np.zeros((d, d))
    rows = sorted(dm.defined_rows)
    if rows:
        vals = dm.values[rows]
        contrib[rows] = (vals - params.epsilon) + params.c * d * (vals > params.epsilon)
        contrib[rows, rows] = 0.0
    return contrib


def score_order(order: CausalOrder, dm: DistanceMatrix, params: ScoreParams) -> float:
    """Score of a causal order against a shift matrix.

    Sums, over every pair (i, j) with ``i`` an intervention target placed
    before ``j``, the shifted distance ``D(i, j) - epsilon`` plus a bonus
    ``c * d`` whenever the shift exceeds the threshold. Orders that place
    strong shifts forward score higher.
    """
    if order.d != dm.d:
        raise ValueError(f"order has {order.d} entries, matrix has {dm.d}")
    if not dm.defined_rows:
        raise UndefinedRowError("distance matrix has no defined rows to score")
    contrib = pair_contributions(dm, params)
    rank = order.rank
    before = rank[:, None] < rank[None, :]
    return float(np.sum(contrib[before]))


def score_graph(g: Dag, dm: DistanceMatrix, epsilon: float) -> float:
    """Edge-wise score of a candidate graph: shift mass minus ``epsilon`` per edge.

    Edges from intervention targets contribute their measured shift; every
    edge, including ones from non-targets, pays the ``epsilon`` penalty.
    """
    if g.d != dm.d:
        raise ValueError(f"graph has {g.d} nodes, matrix has {dm.d}")
    total = 0.0
    for i, j in g.edges():
        if dm.defined(i):
            total += float(dm.values[i, j])
    return total - epsilon * g.num_edges
