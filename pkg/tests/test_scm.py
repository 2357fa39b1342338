import numpy as np
import pytest

from causalorder.errors import DegenerateColumnError, InvariantError
from causalorder.graph import Dag, erdos_renyi, transitive_closure
from causalorder.scm import (
    InterventionalDataset,
    LinearMechanism,
    NoiseSpec,
    ScmInstance,
    generate_dataset,
    sample_intervention_targets,
    sample_scm,
    select_targets_by_policy,
    simulate,
    standardize,
)
from causalorder.stats import distance_matrix


def chain(d=3):
    return Dag(d, [(i, i + 1) for i in range(d - 1)])


def manual_linear_scm(dag, weights, biases, scale=1.0):
    mechs, noises = [], []
    for j in range(dag.d):
        mechs.append(LinearMechanism(np.asarray(weights[j], float), float(biases[j])))
        noises.append(NoiseSpec("gaussian", scale))
    return ScmInstance(dag, "linear", tuple(mechs), tuple(noises), scale)


# --- parameter sampling ---------------------------------------------------------


def test_linear_parameters_in_range():
    rng = np.random.default_rng(0)
    scm = sample_scm(chain(), "linear", rng)
    for j, mech in enumerate(scm.mechanisms):
        assert mech.weights.shape == (len(scm.dag.parents(j)),)
        assert np.all((np.abs(mech.weights) >= 1.0) & (np.abs(mech.weights) <= 3.0))
        assert -3.0 <= mech.bias <= 3.0


def test_rff_feature_count():
    rng = np.random.default_rng(1)
    scm = sample_scm(chain(), "rff", rng)
    for j, mech in enumerate(scm.mechanisms):
        assert mech.alpha.shape == (100,)
        assert mech.omega.shape == (100, len(scm.dag.parents(j)))
        assert 7.0 <= mech.length_scale <= 10.0
        assert 10.0 <= mech.out_scale <= 20.0


def test_nn_shape_and_forced_noise():
    rng = np.random.default_rng(2)
    scm = sample_scm(chain(), "nn", rng)
    for mech in scm.mechanisms:
        assert mech.w1.shape[0] == 10
        assert mech.w2.shape == (10,)
    for spec in scm.noises:
        assert spec.kind == "gaussian" and spec.scale == 1.0


def test_mixed_noise_covers_all_kinds():
    rng = np.random.default_rng(3)
    g = Dag(30)
    scm = sample_scm(g, "linear", rng)
    kinds = {spec.kind for spec in scm.noises}
    assert kinds == {"gaussian", "heteroscedastic", "laplace"}


def test_heteroscedastic_scale_positive_everywhere():
    rng = np.random.default_rng(4)
    scm = sample_scm(chain(), "linear", rng, noise_policy="heteroscedastic")
    spec = scm.noises[2]
    x = rng.normal(size=(200, 1)) * 50
    assert np.all(np.logaddexp(0.0, spec.scale_fn(x)) > 0.0)


def test_unknown_domain_rejected():
    with pytest.raises(ValueError):
        sample_scm(chain(), "cubic", np.random.default_rng(0))


# --- simulation ------------------------------------------------------------------


def test_zero_weight_columns_center_on_bias():
    dag = chain(3)
    biases = [0.5, -1.0, 2.0]
    scm = manual_linear_scm(dag, [[], [0.0], [0.0]], biases)
    x = simulate(scm, 10_000, rng=np.random.default_rng(5))
    stderr = 1.0 / np.sqrt(10_000)
    for j, b in enumerate(biases):
        assert abs(x[:, j].mean() - b) <= 3 * stderr


def test_intervention_pins_root_column():
    rng = np.random.default_rng(6)
    scm = sample_scm(chain(), "linear", rng)
    x = simulate(scm, 50, intervention=0, rng=rng)
    assert np.all(x[:, 0] == x[0, 0])
    assert 1.0 <= abs(x[0, 0]) <= 5.0


def test_nn_intervention_resamples_per_row():
    rng = np.random.default_rng(7)
    scm = sample_scm(chain(), "nn", rng)
    x = simulate(scm, 2000, intervention=1, rng=rng)
    col = x[:, 1]
    assert col.std() > 0.5  # per-sample draws, not a pinned constant
    assert abs(col.mean() - 2.0) < 0.1


def test_chain_variance_propagation():
    w = 1.5
    scm = manual_linear_scm(chain(2), [[], [w]], [0.0, 0.0])
    x = simulate(scm, 100_000, rng=np.random.default_rng(8))
    expected = w**2 * 1.0 + 1.0
    assert x[:, 1].var() == pytest.approx(expected, rel=0.05)


def test_simulate_requires_rng_and_positive_n():
    scm = manual_linear_scm(chain(2), [[], [1.0]], [0.0, 0.0])
    with pytest.raises(ValueError):
        simulate(scm, 0, rng=np.random.default_rng(0))
    with pytest.raises(ValueError):
        simulate(scm, 5)


def test_matched_streams_leave_nondescendants_untouched():
    # same seed with and without the intervention: only the target and its
    # descendants may change
    rng = np.random.default_rng(9)
    g = erdos_renyi(6, 0.4, rng)
    scm = sample_scm(g, "linear", rng)
    k = 2
    base = simulate(scm, 300, rng=np.random.default_rng(42))
    intervened = simulate(scm, 300, intervention=k, rng=np.random.default_rng(42))
    affected = {k} | g.descendants(k)
    for j in range(g.d):
        if j in affected:
            continue
        assert np.array_equal(base[:, j], intervened[:, j])


@pytest.mark.parametrize("domain", ["linear", "rff", "nn"])
def test_simulation_deterministic(domain):
    rng = np.random.default_rng(10)
    scm = sample_scm(chain(4), domain, rng)
    a = simulate(scm, 64, intervention=1, rng=np.random.default_rng(11))
    b = simulate(scm, 64, intervention=1, rng=np.random.default_rng(11))
    assert np.array_equal(a, b)


# --- datasets ----------------------------------------------------------------------


def test_generate_dataset_block_layout():
    rng = np.random.default_rng(12)
    scm = sample_scm(chain(4), "linear", rng)
    ds = generate_dataset(scm, 120, 30, range(4), rng)
    assert ds.obs.shape == (120, 4)
    assert set(ds.targets) == {0, 1, 2, 3}
    assert all(block.shape == (30, 4) for block in ds.interventions.values())
    assert ds.ground_truth == scm.dag
    assert ds.scm_config["domain"] == "linear"


def test_generate_dataset_observational_only():
    rng = np.random.default_rng(13)
    scm = sample_scm(chain(3), "linear", rng)
    ds = generate_dataset(scm, 50, 10, set(), rng)
    assert ds.targets == frozenset()


def test_generate_dataset_rejects_single_sample_blocks():
    rng = np.random.default_rng(14)
    scm = sample_scm(chain(3), "linear", rng)
    with pytest.raises(InvariantError):
        generate_dataset(scm, 50, 1, {0}, rng)


def test_blocks_state_independent_of_other_targets():
    # each block draws from its own substream, so adding a target never
    # perturbs the existing blocks
    rng = np.random.default_rng(15)
    scm = sample_scm(chain(3), "linear", rng)
    a = generate_dataset(scm, 40, 20, {1}, np.random.default_rng(99))
    b = generate_dataset(scm, 40, 20, {1, 2}, np.random.default_rng(99))
    assert np.array_equal(a.obs, b.obs)
    assert np.array_equal(a.interventions[1], b.interventions[1])


def test_dataset_invariants():
    with pytest.raises(InvariantError):
        InterventionalDataset(obs=np.zeros((1, 3)))
    with pytest.raises(InvariantError):
        InterventionalDataset(obs=np.zeros((5, 3)), interventions={7: np.zeros((5, 3))})
    with pytest.raises(InvariantError):
        InterventionalDataset(obs=np.zeros((5, 3)), interventions={0: np.zeros((5, 2))})


def test_standardize_moments_and_idempotence():
    rng = np.random.default_rng(16)
    scm = sample_scm(chain(3), "linear", rng)
    ds = standardize(generate_dataset(scm, 400, 50, {0, 2}, rng))
    assert ds.standardized
    assert np.allclose(ds.obs.mean(axis=0), 0.0, atol=1e-12)
    assert np.allclose(ds.obs.std(axis=0), 1.0, atol=1e-12)
    again = standardize(ds)
    assert np.allclose(again.obs, ds.obs, atol=1e-12)
    for k in ds.targets:
        assert np.allclose(again.interventions[k], ds.interventions[k], atol=1e-12)


def test_standardize_rejects_constant_column():
    obs = np.ones((10, 2))
    obs[:, 0] = np.arange(10)
    ds = InterventionalDataset(obs=obs)
    with pytest.raises(DegenerateColumnError):
        standardize(ds)


# --- target selection ----------------------------------------------------------------


def test_bernoulli_targets_extremes():
    rng = np.random.default_rng(17)
    assert sample_intervention_targets(6, 1.0, rng) == set(range(6))
    assert sample_intervention_targets(6, 0.0, rng) == set()


def test_bernoulli_targets_mean_size():
    sizes = np.array(
        [
            len(sample_intervention_targets(30, 0.5, np.random.default_rng([20, s])))
            for s in range(1000)
        ]
    )
    stderr = sizes.std(ddof=1) / np.sqrt(sizes.size)
    assert abs(sizes.mean() - 15.0) <= 3 * stderr


def test_policy_on_star_graph():
    hub = Dag(5, [(0, j) for j in range(1, 5)])
    rng = np.random.default_rng(18)
    assert select_targets_by_policy(hub, 1, "most_children", rng) == {0}
    leaf = select_targets_by_policy(hub, 1, "fewest_children", rng)
    assert leaf <= {1, 2, 3, 4}
    assert len(select_targets_by_policy(hub, 3, "random", rng)) == 3


def test_policy_tie_break_by_index():
    g = Dag(4)  # all child counts are zero
    rng = np.random.default_rng(19)
    assert select_targets_by_policy(g, 2, "most_children", rng) == {0, 1}
    assert select_targets_by_policy(g, 2, "fewest_children", rng) == {0, 1}


def test_policy_validation():
    with pytest.raises(ValueError):
        select_targets_by_policy(Dag(3), 4, "random", np.random.default_rng(0))
    with pytest.raises(ValueError):
        select_targets_by_policy(Dag(3), 1, "weirdest", np.random.default_rng(0))


# --- faithfulness of the linear domain -------------------------------------------------


def test_linear_scms_separate_paths_from_non_paths():
    # with full-support pinned values and weight magnitudes >= 1, the
    # smallest shift over path pairs should beat the largest shift over
    # non-path pairs in almost every draw
    successes = 0
    for s in range(200):
        rng = np.random.default_rng([902, s])
        d = int(rng.integers(2, 7))
        g = erdos_renyi(d, 0.5, rng)
        scm = sample_scm(g, "linear", rng)
        ds = generate_dataset(scm, 3000, 3000, range(d), rng)
        dm = distance_matrix(ds)
        reach = transitive_closure(g)
        path_vals, nonpath_vals = [], []
        for i in range(d):
            for j in range(d):
                if i != j:
                    (path_vals if reach[i, j] else nonpath_vals).append(dm.values[i, j])
        if not path_vals:
            successes += 1
            continue
        floor = max(nonpath_vals) if nonpath_vals else 0.0
        successes += min(path_vals) > floor
    assert successes >= 190  # 95% of 200
