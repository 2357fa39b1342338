import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from causalorder.errors import CycleError, FormatError, SelfLoopError
from causalorder.graph import (
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


def random_dag(d, p, seed):
    return erdos_renyi(d, p, np.random.default_rng(seed))


# --- construction -----------------------------------------------------------


def test_chain_construction():
    g = Dag(3, [(0, 1), (1, 2)])
    assert g.num_edges == 2
    assert g.edges() == [(0, 1), (1, 2)]


def test_empty_construction():
    assert Dag(3).num_edges == 0


def test_two_cycle_rejected():
    with pytest.raises(CycleError):
        Dag(2, [(0, 1), (1, 0)])


def test_self_loop_rejected():
    with pytest.raises(SelfLoopError):
        Dag(2, [(1, 1)])


def test_out_of_range_rejected():
    with pytest.raises(IndexError):
        Dag(2, [(0, 2)])


def test_longer_cycle_rejected():
    with pytest.raises(CycleError):
        Dag(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


def test_adjacency_read_only():
    g = Dag(2, [(0, 1)])
    with pytest.raises(ValueError):
        g.adjacency[0, 1] = False


# --- random graph models ----------------------------------------------------


def test_erdos_renyi_extremes():
    assert random_dag(5, 0.0, 1).num_edges == 0
    assert random_dag(5, 1.0, 1).num_edges == 10


def test_erdos_renyi_mean_edges():
    # E[#edges] = d(d-1) p / 2 = 43.5 at d=30, p=0.1
    counts = np.array(
        [erdos_renyi(30, 0.1, np.random.default_rng([10, s])).num_edges for s in range(1000)]
    )
    stderr = counts.std(ddof=1) / np.sqrt(counts.size)
    assert abs(counts.mean() - 43.5) <= 3 * stderr


def test_erdos_renyi_rejects_bad_probability():
    with pytest.raises(ValueError):
        erdos_renyi(5, 1.5, np.random.default_rng(0))


def test_barabasi_albert_tree():
    g = barabasi_albert(5, 1, np.random.default_rng(3))
    assert g.num_edges == 4


def test_barabasi_albert_edge_count():
    # m seed nodes, each of the remaining d-m arrivals adds m edges
    g = barabasi_albert(30, 2, np.random.default_rng(4))
    assert g.num_edges == 2 * (30 - 2) == 56


def test_barabasi_albert_bad_m():
    with pytest.raises(ValueError):
        barabasi_albert(2, 2, np.random.default_rng(0))


@pytest.mark.parametrize("seed", range(20))
def test_generators_deterministic(seed):
    a = erdos_renyi(12, 0.3, np.random.default_rng(seed))
    b = erdos_renyi(12, 0.3, np.random.default_rng(seed))
    assert a == b
    x = barabasi_albert(12, 2, np.random.default_rng(seed))
    y = barabasi_albert(12, 2, np.random.default_rng(seed))
    assert x == y


@given(st.integers(0, 10_000), st.sampled_from([0.1, 0.4, 0.8]))
@settings(max_examples=40, deadline=None)
def test_generated_graphs_satisfy_invariants(seed, p):
    g = erdos_renyi(8, p, np.random.default_rng(seed))  # constructor re-validates
    assert not g.adjacency.diagonal().any()
    h = barabasi_albert(8, 2, np.random.default_rng(seed))
    assert h.num_edges == 2 * 6


# --- orders and reachability -------------------------------------------------


def test_topological_order_chain():
    g = Dag(3, [(0, 1), (1, 2)])
    assert topological_order(g).rank.tolist() == [0, 1, 2]


def test_topological_order_tie_break():
    assert topological_order(Dag(3)).rank.tolist() == [0, 1, 2]


def test_topological_order_collider():
    g = Dag(3, [(0, 2), (1, 2)])
    order = topological_order(g)
    assert order.position(2) == 2


def test_transitive_closure_chain():
    g = Dag(3, [(0, 1), (1, 2)])
    reach = transitive_closure(g)
    assert {(i, j) for i, j in zip(*np.nonzero(reach))} == {(0, 1), (1, 2), (0, 2)}


def test_transitive_closure_empty():
    assert not transitive_closure(Dag(3)).any()


def _closure_by_matrix_powers(g):
    # independent oracle: positivity of A + A^2 + ... + A^(d-1)
    a = g.adjacency.astype(np.int64)
    total = np.zeros_like(a)
    power = np.eye(g.d, dtype=np.int64)
    for _ in range(g.d - 1):
        power = power @ a
        total += power
    return total > 0


@pytest.mark.parametrize("seed", range(25))
def test_transitive_closure_matches_matrix_powers(seed):
    g = random_dag(6, 0.4, seed)
    assert np.array_equal(transitive_closure(g), _closure_by_matrix_powers(g))


def _ancestors_by_reverse_bfs(g, j):
    # independent oracle: BFS on reversed edges
    frontier = [j]
    seen = set()
    while frontier:
        u = frontier.pop()
        for v in range(g.d):
            if g.adjacency[v, u] and v not in seen:
                seen.add(v)
                frontier.append(v)
    seen.discard(j)
    return seen


def test_ancestors_chain():
    g = Dag(3, [(0, 1), (1, 2)])
    assert g.ancestors(2) == {0, 1}
    assert g.ancestors(0) == set()
    assert g.parents(2) == {1}
    assert g.descendants(0) == {1, 2}
    assert g.children(0) == {1}


@pytest.mark.parametrize("seed", range(15))
def test_ancestors_match_reverse_bfs(seed):
    g = random_dag(8, 0.3, seed)
    for j in range(g.d):
        assert g.ancestors(j) == _ancestors_by_reverse_bfs(g, j)


@pytest.mark.parametrize("seed", range(15))
def test_closure_consistent_with_node_queries(seed):
    g = random_dag(7, 0.35, seed)
    reach = transitive_closure(g)
    for i in range(g.d):
        for j in range(g.d):
            assert reach[i, j] == (j in g.descendants(i)) == (i in g.ancestors(j))


# --- top-order divergence ----------------------------------------------------


def test_d_top_valid_order_is_zero():
    g = Dag(3, [(0, 1), (1, 2)])
    assert d_top(g, CausalOrder([0, 1, 2])) == 0


def test_d_top_reversed_chain():
    g = Dag(3, [(0, 1), (1, 2)])
    assert d_top(g, CausalOrder([2, 1, 0])) == 2


def test_d_top_full_dag_single_violation():
    g = Dag(3, [(0, 1), (0, 2), (1, 2)])
    # sequence (1, 0, 2) reverses exactly the edge 0 -> 1
    assert d_top(g, CausalOrder.from_sequence([1, 0, 2])) == 1


@pytest.mark.parametrize("seed", range(20))
def test_d_top_zero_for_topological_order(seed):
    g = random_dag(9, 0.4, seed)
    assert d_top(g, topological_order(g)) == 0


@pytest.mark.parametrize("seed", range(20))
def test_d_top_bounded_by_edge_count(seed):
    g = random_dag(7, 0.5, seed)
    rng = np.random.default_rng(seed + 1000)
    for _ in range(10):
        order = CausalOrder(rng.permutation(g.d))
        assert 0 <= d_top(g, order) <= g.num_edges


@pytest.mark.parametrize("seed", range(10))
def test_reordered_adjacency_upper_triangular(seed):
    g = random_dag(8, 0.4, seed)
    seq = topological_order(g).sequence()
    for mat in (g.adjacency, transitive_closure(g)):
        permuted = mat[np.ix_(seq, seq)]  # row/col r = variable at position r
        assert not np.tril(permuted).any()


# --- CausalOrder -------------------------------------------------------------


def test_causal_order_validates_bijection():
    with pytest.raises(ValueError):
        CausalOrder([0, 0, 1])


def test_causal_order_sequence_round_trip():
    order = CausalOrder.from_sequence([2, 0, 1])
    assert order.sequence().tolist() == [2, 0, 1]
    assert order.rank.tolist() == [1, 2, 0]


@given(st.permutations(list(range(6))))
def test_causal_order_rank_sequence_inverse(perm):
    order = CausalOrder(perm)
    assert CausalOrder.from_sequence(order.sequence()) == order


# --- file format --------------------------------------------------------------


def test_edge_csv_round_trip(tmp_path):
    g = random_dag(7, 0.4, 5)
    path = tmp_path / "graph.csv"
    save_edge_csv(g, path)
    assert load_edge_csv(path, 7) == g
    header = path.read_text().splitlines()[0]
    assert header == "src,dst"


def test_edge_csv_bad_header(tmp_path):
    path = tmp_path / "graph.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(FormatError):
        load_edge_csv(path, 3)


def test_edge_csv_out_of_range(tmp_path):
    path = tmp_path / "graph.csv"
    path.write_text("src,dst\n1,9\n")
    with pytest.raises(FormatError):
        load_edge_csv(path, 3)
