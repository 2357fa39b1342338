"""Causal-order search: greedy edge-ranking init, hill climbing, exact search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import TooLargeError
from .graph import CausalOrder, Dag, d_top, topological_order
from .scoring import ScoreParams, pair_contributions, score_order
from .stats import DistanceMatrix, distance_matrix

__all__ = [
    "SolverConfig",
    "IntersortResult",
    "sortranking",
    "neighborhood",
    "localsearch",
    "intersort",
    "intersort_matrix",
    "exhaustive_opt",
]

EXHAUSTIVE_LIMIT = 9
_CHUNK = 40320  # permutations scored per vectorized batch


@dataclass(frozen=True)
class SolverConfig:
    """Search settings: score parameters, neighborhood depth, size limits."""

    params: ScoreParams
    k: int = 1
    exhaustive_limit: int = EXHAUSTIVE_LIMIT
    deterministic: bool = True

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("neighborhood depth k must be >= 1")
        if self.exhaustive_limit < 2:
            raise ValueError("exhaustive_limit must be >= 2")
        if not self.deterministic:
            raise ValueError("only deterministic candidate ordering is implemented")


def sortranking(dm: DistanceMatrix, epsilon: float) -> CausalOrder:
    """Initial order from greedy edge insertion.

    Candidate edges (i, j) with a defined shift above ``epsilon`` are
    visited by descending shift (ties: smaller i, then smaller j) and added
    to a growing graph unless a path j -> i already exists. The result is
    the topological order of that graph, so variables never touched by an
    admissible edge fall back to index order.
    """
    d = dm.d
    rows = sorted(dm.defined_rows)
    admissible = np.zeros((d, d), dtype=bool)
    if rows:
        admissible[rows] = dm.values[rows] > epsilon
    np.fill_diagonal(admissible, False)
    ii, jj = np.nonzero(admissible)
    vv = dm.values[ii, jj]
    visit = np.lexsort((jj, ii, -vv))

    adj = np.zeros((d, d), dtype=bool)
    reach = np.zeros((d, d), dtype=bool)
    for k in visit:
        i, j = int(ii[k]), int(jj[k])
        if reach[j, i]:
            continue
        adj[i, j] = True
        src = reach[:, i].copy()
        src[i] = True
        dst = reach[j].copy()
        dst[j] = True
        reach |= np.outer(src, dst)
    return topological_order(Dag.from_adjacency(adj))


def _insertion_moves(rank: np.ndarray):
    """All remove-and-reinsert variants of ``rank``, variable index then
    target position ascending; duplicates are not filtered here."""
    d = rank.size
    for v in range(d):
        p = int(rank[v])
        for t in range(d):
            if t == p:
                continue
            moved = rank.copy()
            if t > p:
                between = (rank > p) & (rank <= t)
                moved[between] -= 1
            else:
                between = (rank >= t) & (rank < p)
                moved[between] += 1
            moved[v] = t
            yield moved


def neighborhood(order: CausalOrder, k: int = 1) -> list[CausalOrder]:
    """Orders reachable by ``k`` successive insertion moves, deduplicated.

    For ``k = 1`` this realizes "give one variable any other position":
    remove it and reinsert it elsewhere, shifting the variables in between.
    Candidates appear in a fixed deterministic sequence.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    frontier = [order.rank]
    for _ in range(k):
        seen = set()
        nxt = []
        for rank in frontier:
            for cand in _insertion_moves(rank):
                key = cand.tobytes()
                if key not in seen:
                    seen.add(key)
                    nxt.append(cand)
        frontier = nxt
    return [CausalOrder(r) for r in frontier]


def _score_ranks(contrib: np.ndarray, rank: np.ndarray) -> float:
    before = rank[:, None] < rank[None, :]
    return float(np.sum(contrib[before]))


def _localsearch(
    init: CausalOrder, dm: DistanceMatrix, cfg: SolverConfig
) -> tuple[CausalOrder, int]:
    # First-improvement hill climbing; each accepted move restarts the scan
    # on the fresh neighborhood.
    score_order(init, dm, cfg.params)  # surface contract errors up front
    contrib = pair_contributions(dm, cfg.params)
    current = init
    current_score = _score_ranks(contrib, current.rank)
    moves = 0
    improved = True
    while improved:
        improved = False
        for cand in neighborhood(current, cfg.k):
            cand_score = _score_ranks(contrib, cand.rank)
            if cand_score > current_score:
                current, current_score = cand, cand_score
                moves += 1
                improved = True
                break
    return current, moves


def localsearch(init: CausalOrder, dm: DistanceMatrix, cfg: SolverConfig) -> CausalOrder:
    """Greedy first-improvement refinement of ``init``; never scores worse."""
    order, _ = _localsearch(init, dm, cfg)
    return order


@dataclass(frozen=True)
class IntersortResult:
    """Solved order plus the diagnostics of how it was reached."""

    order: CausalOrder
    initial_order: CausalOrder
    score_init: float
    score_final: float
    iterations: int
    epsilon: float
    c: float
    dtop: int | None = None

    def to_dict(self) -> dict:
        """JSON-ready record; ranks are reported 1-based."""
        out = {
            "order": [int(r) + 1 for r in self.order.rank],
            "initial_order": [int(r) + 1 for r in self.initial_order.rank],
            "score_init": self.score_init,
            "score_final": self.score_final,
            "iterations": self.iterations,
            "epsilon": self.epsilon,
            "c": self.c,
        }
        if self.dtop is not None:
            out["d_top"] = self.dtop
        return out


def intersort_matrix(
    dm: DistanceMatrix, cfg: SolverConfig, ground_truth: Dag | None = None
) -> IntersortResult:
    """Run init plus refinement on an already-computed shift matrix."""
    init = sortranking(dm, cfg.params.epsilon)
    score_init = score_order(init, dm, cfg.params)
    final, moves = _localsearch(init, dm, cfg)
    score_final = score_order(final, dm, cfg.params)
    err = d_top(ground_truth, final) if ground_truth is not None else None
    return IntersortResult(
        order=final,
        initial_order=init,
        score_init=score_init,
        score_final=score_final,
        iterations=moves,
        epsilon=cfg.params.epsilon,
        c=cfg.params.c,
        dtop=err,
    )


def intersort(ds, cfg: SolverConfig | None = None) -> IntersortResult:
    """Full pipeline on a dataset: shift matrix, greedy init, local search."""
    if cfg is None:
        cfg = SolverConfig(ScoreParams(epsilon=0.3, c=0.5))
    dm = distance_matrix(ds)
    return intersort_matrix(dm, cfg, ground_truth=ds.ground_truth)


def exhaustive_opt(
    dm: DistanceMatrix, params: ScoreParams, limit: int = EXHAUSTIVE_LIMIT
) -> CausalOrder:
    """Score every permutation and return the best one.

    Ties are broken toward the lexicographically smallest rank array.
    Refuses dimensions above ``limit`` (d! blow-up).
    """
    d = dm.d
    if d > limit:
        raise TooLargeError(f"d={d} exceeds the exhaustive limit {limit}")
    contrib = pair_contributions(dm, params)
    best_score = -np.inf
    best_rank: np.ndarray | None = None
    perms = itertools.permutations(range(d))
    while True:
        chunk = np.array(list(itertools.islice(perms, _CHUNK)), dtype=np.intp)
        if chunk.size == 0:
            break
        before = chunk[:, :, None] < chunk[:, None, :]
        scores = (before * contrib).sum(axis=(1, 2))
        k = int(np.argmax(scores))  # first max: lexicographically smallest
        if scores[k] > best_score:
            best_score = float(scores[k])
            best_rank = chunk[k]
    assert best_rank is not None
    return CausalOrder(best_rank)
