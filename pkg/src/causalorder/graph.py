"""Directed acyclic graphs, random graph models and order diagnostics.

Variables are indexed 0..d-1 throughout the Python API. The edge-list file
format (see :func:`save_edge_csv`) uses 1-based indices.
"""

from __future__ import annotations

import csv
import heapq
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import CycleError, FormatError, SelfLoopError

__all__ = [
    "Dag",
    "CausalOrder",
    "erdos_renyi",
    "barabasi_albert",
    "topological_order",
    "transitive_closure",
    "d_top",
    "load_edge_csv",
    "save_edge_csv",
]


class Dag:
    """Immutable directed acyclic graph over ``d`` variables.

    Parameters
    ----------
    d : int
        Number of variables, at least 1.
    edges : iterable of (src, dst)
        Directed edges with 0-based endpoints.

    Raises
    ------
    IndexError
        If an endpoint is outside ``0..d-1``.
    SelfLoopError
        If an edge starts and ends at the same node.
    CycleError
        If the edge set contains a directed cycle.
    """

    __slots__ = ("_adj", "_d")

    def __init__(self, d: int, edges: Iterable[tuple[int, int]] = ()):
        if d < 1:
            raise ValueError(f"d must be >= 1, got {d}")
        adj = np.zeros((d, d), dtype=bool)
        for src, dst in edges:
            if not (0 <= src < d and 0 <= dst < d):
                raise IndexError(f"edge ({src}, {dst}) out of range for d={d}")
            if src == dst:
                raise SelfLoopError(f"self-loop at node {src}")
            adj[src, dst] = True
        self._adj = adj
        self._d = d
        self._adj.flags.writeable = False
        if self._has_cycle():
            raise CycleError("edge set contains a directed cycle")

    @classmethod
    def from_adjacency(cls, adj: np.ndarray) -> "Dag":
        adj = np.asarray(adj, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency must be a square matrix")
        src, dst = np.nonzero(adj)
        return cls(adj.shape[0], zip(src.tolist(), dst.tolist()))

    def _has_cycle(self) -> bool:
        # Kahn peeling; a leftover node means a cycle.
        indeg = self._adj.sum(axis=0).astype(int)
        ready = [i for i in range(self._d) if indeg[i] == 0]
        seen = 0
        while ready:
            u = ready.pop()
            seen += 1
            for v in np.nonzero(self._adj[u])[0]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    ready.append(int(v))
        return seen < self._d

    @property
    def d(self) -> int:
        return self._d

    @property
    def adjacency(self) -> np.ndarray:
        """Read-only d x d boolean adjacency, ``adj[i, j]`` iff edge i -> j."""
        return self._adj

    @property
    def num_edges(self) -> int:
        return int(self._adj.sum())

    def edges(self) -> list[tuple[int, int]]:
        src, dst = np.nonzero(self._adj)
        return list(zip(src.tolist(), dst.tolist()))

    def parents(self, j: int) -> set[int]:
        self._check_index(j)
        return set(np.nonzero(self._adj[:, j])[0].tolist())

    def children(self, i: int) -> set[int]:
        self._check_index(i)
        return set(np.nonzero(self._adj[i])[0].tolist())

    def ancestors(self, j: int) -> set[int]:
        """All nodes with a directed path to ``j`` (``j`` excluded)."""
        self._check_index(j)
        return self._reach_from(j, self._adj.T)

    def descendants(self, i: int) -> set[int]:
        """All nodes reachable from ``i`` (``i`` excluded)."""
        self._check_index(i)
        return self._reach_from(i, self._adj)

    def _reach_from(self, start: int, adj: np.ndarray) -> set[int]:
        seen = np.zeros(self._d, dtype=bool)
        stack = [start]
        while stack:
            u = stack.pop()
            for v in np.nonzero(adj[u])[0]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
        seen[start] = False
        return set(np.nonzero(seen)[0].tolist())

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self._d:
            raise IndexError(f"node {i} out of range for d={self._d}")

    def __eq__(self, other) -> bool:
        return isinstance(other, Dag) and self._d == other._d and bool(
            np.array_equal(self._adj, other._adj)
        )

    def __hash__(self) -> int:
        return hash((self._d, self._adj.tobytes()))

    def __repr__(self) -> str:
        return f"Dag(d={self._d}, edges={self.edges()})"


class CausalOrder:
    """A permutation of the variables, stored as variable -> position ranks.

    ``rank[i] < rank[j]`` means variable ``i`` is placed before ``j``.
    """

    __slots__ = ("_rank",)

    def __init__(self, rank: Sequence[int]):
        arr = np.asarray(rank, dtype=np.intp)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("rank must be a nonempty 1-D sequence")
        if not np.array_equal(np.sort(arr), np.arange(arr.size)):
            raise ValueError(f"rank is not a permutation of 0..{arr.size - 1}")
        self._rank = arr
        self._rank.flags.writeable = False

    @classmethod
    def identity(cls, d: int) -> "CausalOrder":
        return cls(np.arange(d))

    @classmethod
    def from_sequence(cls, seq: Sequence[int]) -> "CausalOrder":
        """Build from the variables listed first-to-last."""
        seq = np.asarray(seq, dtype=np.intp)
        rank = np.empty_like(seq)
        rank[seq] = np.arange(seq.size)
        return cls(rank)

    @property
    def d(self) -> int:
        return self._rank.size

    @property
    def rank(self) -> np.ndarray:
        return self._rank

    def sequence(self) -> np.ndarray:
        """Variables sorted by position, earliest first."""
        return np.argsort(self._rank, kind="stable")

    def position(self, i: int) -> int:
        return int(self._rank[i])

    def __eq__(self, other) -> bool:
        return isinstance(other, CausalOrder) and bool(
            np.array_equal(self._rank, other._rank)
        )

    def __hash__(self) -> int:
        return hash(self._rank.tobytes())

    def __repr__(self) -> str:
        return f"CausalOrder(rank={self._rank.tolist()})"


def erdos_renyi(d: int, p_e: float, rng: np.random.Generator) -> Dag:
    """Sample a random DAG with independent forward edges.

    A uniform random ordering of the variables is drawn first, then every
    pair ordered forward by it becomes an edge independently with
    probability ``p_e``. The latent ordering is discarded, so the labels
    carry no positional information.
    """
    if not 0.0 <= p_e <= 1.0:
        raise ValueError(f"p_e must be in [0, 1], got {p_e}")
    perm = rng.permutation(d)
    adj = np.zeros((d, d), dtype=bool)
    upper = np.triu(rng.random((d, d)) < p_e, k=1)
    # upper[a, b] is an edge from the a-th to the b-th variable of the draw.
    adj[np.ix_(perm, perm)] = upper
    return Dag.from_adjacency(adj)


def barabasi_albert(d: int, m: int, rng: np.random.Generator) -> Dag:
    """Sample a preferential-attachment DAG.

    Starts from ``m`` unconnected seed nodes; every later node receives
    ``m`` incoming edges from distinct existing nodes chosen preferentially
    by degree, so edges always point from earlier to later arrivals and the
    total edge count is ``m * (d - m)``.
    """
    if not 1 <= m < d:
        raise ValueError(f"need 1 <= m < d, got m={m}, d={d}")
    arrival = rng.permutation(d)
    adj = np.zeros((d, d), dtype=bool)
    # Multiset of edge endpoints; sampling from it is degree-proportional.
    endpoints: list[int] = []
    for t in range(m, d):
        new = int(arrival[t])
        if t == m:
            targets = [int(arrival[k]) for k in range(m)]
        else:
            targets = []
            while len(targets) < m:
                pick = int(endpoints[rng.integers(len(endpoints))])
                if pick not in targets:
                    targets.append(pick)
        for src in targets:
            adj[src, new] = True
            endpoints.append(src)
        endpoints.extend([new] * m)
    return Dag.from_adjacency(adj)


def topological_order(g: Dag) -> CausalOrder:
    """Deterministic topological sort, smallest node index first on ties."""
    indeg = g.adjacency.sum(axis=0).astype(int)
    ready = [i for i in range(g.d) if indeg[i] == 0]
    heapq.heapify(ready)
    seq = np.empty(g.d, dtype=np.intp)
    for pos in range(g.d):
        u = heapq.heappop(ready)
        seq[pos] = u
        for v in np.nonzero(g.adjacency[u])[0]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(ready, int(v))
    return CausalOrder.from_sequence(seq)


def transitive_closure(g: Dag) -> np.ndarray:
    """Reachability matrix: ``reach[i, j]`` iff a directed path i -> j exists.

    Computed by dynamic programming over a reverse topological sweep, so the
    cost is proportional to d times the number of edges.
    """
    reach = np.array(g.adjacency, dtype=bool)
    seq = topological_order(g).sequence()
    for u in seq[::-1]:
        kids = np.nonzero(g.adjacency[u])[0]
        if kids.size:
            reach[u] |= reach[kids].any(axis=0)
    return reach


def d_top(g: Dag, order: CausalOrder) -> int:
    """Number of edges placed backwards by ``order``.

    Zero exactly when the order is a valid causal (topological) order of the
    graph; at most the edge count otherwise.
    """
    if order.d != g.d:
        raise ValueError(f"order has {order.d} entries, graph has {g.d} nodes")
    src, dst = np.nonzero(g.adjacency)
    return int(np.sum(order.rank[src] > order.rank[dst]))


def save_edge_csv(g: Dag, path: str | Path) -> None:
    """Write the edge list as CSV with header ``src,dst`` (1-based)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["src", "dst"])
        for i, j in g.edges():
            w.writerow([i + 1, j + 1])


def load_edge_csv(path: str | Path, d: int) -> Dag:
    """Read a 1-based ``src,dst`` edge list; node count comes from metadata."""
    edges = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["src", "dst"]:
            raise FormatError(f"{path}: expected header 'src,dst'")
        for ln, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                src, dst = int(row[0]), int(row[1])
            except (ValueError, IndexError) as exc:
                raise FormatError(f"{path}:{ln}: malformed edge row {row!r}") from exc
            if not (1 <= src <= d and 1 <= dst <= d):
                raise FormatError(f"{path}:{ln}: endpoint out of range for d={d}")
            edges.append((src - 1, dst - 1))
    return Dag(d, edges)
