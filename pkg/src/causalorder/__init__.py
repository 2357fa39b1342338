"""Causal order inference from observational plus interventional data.

The package infers the topological order of the variables of a structural
causal model by scoring permutations against the marginal-distribution
shifts each single-variable intervention causes downstream. It ships the
order score and its solvers, SCM simulators for benchmarking, the empirical
Wasserstein-1 distance, theoretical expected-error bounds and a
reproducible experiment harness.
"""

from .bounds import (
    ancestor_bound,
    asymptotic_normalized_bound,
    effective_intervention_ratio,
    er_closed_bound,
    er_loose_bound,
    expected_dtop_exact,
    parent_bound,
)
from .graph import (
    CausalOrder,
    Dag,
    barabasi_albert,
    d_top,
    erdos_renyi,
    load_edge_csv,
    save_edge_csv,
    topological_order,
    transitive_closure,
)
from .harness import (
    DEFAULT_EPSILON,
    ExperimentConfig,
    RunRecord,
    build_dataset,
    emit_results,
    expand_grid,
    load_dataset,
    run_bound_sweep,
    run_experiment,
    save_dataset,
)
from .scm import (
    InterventionalDataset,
    ScmInstance,
    generate_dataset,
    sample_intervention_targets,
    sample_scm,
    select_targets_by_policy,
    simulate,
    standardize,
)
from .scoring import ScoreParams, pair_contributions, score_graph, score_order
from .solver import (
    IntersortResult,
    SolverConfig,
    exhaustive_opt,
    intersort,
    intersort_matrix,
    localsearch,
    neighborhood,
    sortranking,
)
from .stats import (
    DistanceMatrix,
    distance_matrix,
    oracle_distance_matrix,
    suggest_epsilon,
    wasserstein1,
)

__version__ = "0.1.0"
