"""Expected-error bounds for order recovery under random interventions."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from .errors import DomainError, TooLargeError
from .graph import Dag, transitive_closure

__all__ = [
    "ancestor_bound",
    "parent_bound",
    "er_closed_bound",
    "er_loose_bound",
    "asymptotic_normalized_bound",
    "expected_dtop_exact",
    "effective_intervention_ratio",
]

EXACT_ENUM_LIMIT = 6


def _check_prob(name: str, value: float, lo_open: bool = False, hi_open: bool = False):
    lo_ok = value > 0 if lo_open else value >= 0
    hi_ok = value < 1 if hi_open else value <= 1
    if not (lo_ok and hi_ok):
        lo = "(" if lo_open else "["
        hi = ")" if hi_open else "]"
        raise DomainError(f"{name}={value} outside {lo}0, 1{hi}")


def ancestor_bound(g: Dag, p_int: float) -> float:
    """Edge-wise bound on the expected misordered-edge count.

    An edge survives in the wrong direction only if none of the variables
    whose intervention would separate its endpoints was drawn; per edge
    (i, j) that set is ``ancestors(j) + {j} - ancestors(i)``.
    """
    _check_prob("p_int", p_int)
    total = 0.0
    anc = [g.ancestors(j) for j in range(g.d)]
    for i, j in g.edges():
        exponent = len((anc[j] | {j}) - anc[i])
        total += (1.0 - p_int) ** exponent
    return total


def parent_bound(g: Dag, p_int: float) -> float:
    """Weaker analogue of :func:`ancestor_bound` for the case where only
    direct children react detectably to an intervention."""
    _check_prob("p_int", p_int)
    total = 0.0
    pa = [g.parents(j) for j in range(g.d)]
    for i, j in g.edges():
        exponent = len((pa[j] | {j}) - pa[i])
        total += (1.0 - p_int) ** exponent
    return total


def er_closed_bound(d: int, p_int: float, p_e: float) -> float:
    """Closed-form expected-error bound for random graphs with independent
    forward edges of probability ``p_e``."""
    _check_prob("p_int", p_int, lo_open=True, hi_open=True)
    if not 0.0 < p_e <= 1.0:
        raise DomainError(f"p_e={p_e} outside (0, 1]")
    x = p_int * p_e
    # 1 - (1 - x)^d via expm1/log1p: the direct form cancels badly for
    # small x and can push this nonnegative bound below zero
    one_minus_qd = -math.expm1(d * math.log1p(-x)) if x < 1.0 else 1.0
    geom = (1.0 - x) * one_minus_qd / x
    return (1.0 - p_int) ** 2 / p_int * max(d - geom, 0.0)


def er_loose_bound(d: int, p_int: float) -> float:
    """Density-free relaxation of :func:`er_closed_bound`."""
    _check_prob("p_int", p_int, lo_open=True, hi_open=True)
    return (1.0 - p_int) ** 2 / p_int * d


def asymptotic_normalized_bound(c_avg: float, p_int: float) -> float:
    """Large-d limit of the closed bound per variable, at a constant
    expected number of edges per variable ``c_avg``."""
    _check_prob("p_int", p_int, lo_open=True, hi_open=True)
    if c_avg <= 0:
        raise DomainError(f"c_avg={c_avg} must be positive")
    x = p_int * c_avg
    return (1.0 - p_int) ** 2 / p_int * (1.0 + math.expm1(-x) / x)


def _argmax_rank_set(contrib: np.ndarray) -> np.ndarray:
    """All rank arrays maximizing the integer-valued pair score; exact."""
    d = contrib.shape[0]
    ranks = np.array(list(itertools.permutations(range(d))), dtype=np.intp)
    before = ranks[:, :, None] < ranks[:, None, :]
    scores = (before * contrib).sum(axis=(1, 2))
    return ranks[scores == scores.max()]


def expected_dtop_exact(g: Dag, num_targets: int) -> Fraction:
    """Exact expected misordered-edge count over uniform target subsets.

    For every subset of ``num_targets`` intervened variables, the full set
    of score-maximizing orders is enumerated on a noise-free shift matrix.
    An edge constrained to the correct (wrong) direction in every maximizer
    counts 0 (1); an edge the optimum leaves free counts 1/2, which models
    uniform tie resolution. Integer-scaled scores keep the tie detection
    exact, and the result is an exact rational.
    """
    d = g.d
    if d > EXACT_ENUM_LIMIT:
        raise TooLargeError(f"d={d} exceeds the exact-enumeration limit {EXACT_ENUM_LIMIT}")
    if not 0 <= num_targets <= d:
        raise ValueError(f"num_targets must be in [0, {d}], got {num_targets}")
    reach = transitive_closure(g)
    edges = g.edges()
    total = Fraction(0)
    n_subsets = math.comb(d, num_targets)
    for targets in itertools.combinations(range(d), num_targets):
        # Doubled score with hi=1, lo=0, eps=1/2, c=1/2: an above-threshold
        # pair contributes 1 + d, a zero-shift pair -1; all entries integer.
        contrib = np.zeros((d, d), dtype=np.int64)
        for i in targets:
            contrib[i] = np.where(reach[i], 1 + d, -1)
            contrib[i, i] = 0
        maximizers = _argmax_rank_set(contrib)
        for u, v in edges:
            forward = bool(np.any(maximizers[:, u] < maximizers[:, v]))
            backward = bool(np.any(maximizers[:, u] > maximizers[:, v]))
            if forward and backward:
                total += Fraction(1, 2)
            elif backward:
                total += 1
    return total / n_subsets


def effective_intervention_ratio(p_int: float, p_e: float) -> float:
    """Difficulty statistic for a setting: ``p_int / sqrt(p_e)``."""
    if p_e <= 0:
        raise DomainError(f"p_e={p_e} must be positive")
    return p_int / math.sqrt(p_e)
