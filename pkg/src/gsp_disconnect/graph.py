"""Weighted undirected graphs, Laplacians and edge-disconnection algebra.

A disconnection of edge ``(i, j)`` is modelled as subtracting the rank-one
matrix ``E(i,j) = w_ij (e_i - e_j)(e_i - e_j)^T`` from the Laplacian, so the
Laplacian after removing an edge set ``C`` is ``L0 - sum_{(i,j) in C} E(i,j)``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._linalg import rank_tolerance, sym_eigh

Edge = tuple[int, int]
WeightedEdge = tuple[int, int, float]


class GraphError(ValueError):
    """Invalid graph construction or an edge that is not in the graph."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def norm_edge(i: int, j: int) -> Edge:
    i, j = int(i), int(j)
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected weighted graph with lexicographically sorted edges."""

    n_vertices: int
    edges: tuple[WeightedEdge, ...]
    adjacency: np.ndarray = field(repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.n_vertices

    @property
    def edge_pairs(self) -> tuple[Edge, ...]:
        return tuple((i, j) for i, j, _ in self.edges)

    @cached_property
    def weight(self) -> dict[Edge, float]:
        return {(i, j): w for i, j, w in self.edges}

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for i, j, _ in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return tuple(tuple(sorted(a)) for a in adj)

    def has_edge(self, i: int, j: int) -> bool:
        return norm_edge(i, j) in self.weight

    def without(self, removed: Iterable[Edge]) -> "WeightedGraph":
        drop = {norm_edge(*e) for e in removed}
        missing = drop - set(self.weight)
        if missing:
            raise GraphError(f"not an edge of the graph: {sorted(missing)[0]}")
        return build_graph(self.n_vertices, [e for e in self.edges if e[:2] not in drop])

    def to_json(self) -> dict:
        return {"n": self.n_vertices, "edges": [[i, j, w] for i, j, w in self.edges]}

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1))


def build_graph(n: int, weighted_edges: Iterable[Sequence[float]]) -> WeightedGraph:
    """Validate an edge list and build the graph.

    Raises :class:`GraphError` naming the first offending edge for
    self-loops, out-of-range vertices, nonpositive weights and duplicates.
    """
    n = int(n)
    if n < 1:
        raise GraphError(f"vertex count must be positive, got {n}")
    seen: dict[Edge, float] = {}
    for e in weighted_edges:
        if len(e) != 3:
            raise GraphError(f"edge must be (i, j, w), got {e!r}")
        i, j, w = int(e[0]), int(e[1]), float(e[2])
        if i == j:
            raise GraphError(f"self-loop at vertex {i}")
        if not (0 <= i < n and 0 <= j < n):
            raise GraphError(f"edge ({i}, {j}) out of range for n={n}")
        if not (w > 0 and np.isfinite(w)):
            raise GraphError(f"edge ({i}, {j}) has nonpositive weight {w}")
        key = norm_edge(i, j)
        if key in seen:
            raise GraphError(f"duplicate edge {key}")
        seen[key] = w
    edges = tuple((i, j, seen[(i, j)]) for i, j in sorted(seen))
    adj = np.zeros((n, n))
    for i, j, w in edges:
        adj[i, j] = adj[j, i] = w
    return WeightedGraph(n, edges, _readonly(adj))


def load_graph(path: str | Path) -> WeightedGraph:
    data = json.loads(Path(path).read_text())
    try:
        return build_graph(data["n"], data["edges"])
    except (KeyError, TypeError) as exc:
        raise GraphError(f"malformed graph file {path}: {exc}") from exc


@dataclass(frozen=True, eq=False)
class LaplacianView:
    """Laplacian matrix with its cached ascending eigendecomposition."""

    matrix: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    zero_eig_count: int
    graph: WeightedGraph = field(repr=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def connected(self) -> bool:
        return self.zero_eig_count == 1


def _view(matrix: np.ndarray, graph: WeightedGraph) -> LaplacianView:
    w, u = sym_eigh(matrix)
    w = np.maximum(w, 0.0)
    zero = int(np.sum(w <= rank_tolerance(w)))
    return LaplacianView(_readonly(matrix), _readonly(w), _readonly(u), zero, graph)


def laplacian(g: WeightedGraph) -> LaplacianView:
    """``L = diag(W 1) - W`` with eigenvalues sorted ascending."""
    w = np.asarray(g.adjacency)
    return _view(np.diag(w.sum(axis=1)) - w, g)


def is_connected(lap: LaplacianView) -> bool:
    return lap.connected


def single_edge_perturbation(L0: LaplacianView, i: int, j: int) -> np.ndarray:
    """``L0[i,j] (e_i e_j^T + e_j e_i^T - e_j e_j^T - e_i e_i^T)``."""
    lij = L0.matrix[i, j]
    if i == j or lij == 0:
        raise GraphError(f"({i}, {j}) is not an edge of the graph")
    e = np.zeros_like(L0.matrix)
    e[i, j] = e[j, i] = lij
    e[i, i] = e[j, j] = -lij
    return e


@dataclass(frozen=True)
class DisconnectionHypothesis:
    """Removed-edge set ``C`` with its perturbation ``E`` and touched vertices ``S``."""

    n: int
    removed_edges: tuple[Edge, ...]
    weights: tuple[float, ...]

    @classmethod
    def from_graph(cls, g: WeightedGraph, removed: Iterable[Edge]) -> "DisconnectionHypothesis":
        pairs = tuple(sorted({norm_edge(*e) for e in removed}))
        for p in pairs:
            if p not in g.weight:
                raise GraphError(f"not an edge of the graph: {p}")
        return cls(g.n_vertices, pairs, tuple(g.weight[p] for p in pairs))

    @property
    def is_null(self) -> bool:
        return not self.removed_edges

    @cached_property
    def affected_vertices(self) -> tuple[int, ...]:
        return tuple(sorted({v for e in self.removed_edges for v in e}))

    @cached_property
    def perturbation(self) -> np.ndarray:
        e = np.zeros((self.n, self.n))
        for (i, j), w in zip(self.removed_edges, self.weights):
            e[i, j] -= w
            e[j, i] -= w
            e[i, i] += w
            e[j, j] += w
        return _readonly(e)


def apply_hypothesis(
    L0: LaplacianView, removed: Iterable[Edge]
) -> tuple[LaplacianView, DisconnectionHypothesis]:
    """Remove ``removed`` from the graph behind ``L0``.

    The new Laplacian is formed as ``L0 - E`` and re-decomposed. The empty
    set returns ``L0`` itself.
    """
    removed = list(removed)
    for i, j in removed:
        if i == j or L0.matrix[i, j] == 0:
            raise GraphError(f"({i}, {j}) is not an edge of the graph")
    hyp = DisconnectionHypothesis.from_graph(L0.graph, removed)
    if hyp.is_null:
        return L0, hyp
    return _view(L0.matrix - hyp.perturbation, L0.graph.without(hyp.removed_edges)), hyp


def hop_distances(g: WeightedGraph, i: int, limit: int | None = None) -> dict[int, int]:
    """BFS hop counts from ``i``, optionally stopping at ``limit`` hops."""
    dist = {i: 0}
    queue = deque([i])
    while queue:
        u = queue.popleft()
        if limit is not None and dist[u] >= limit:
            continue
        for v in g.neighbors[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def neighborhood(g: WeightedGraph, i: int, beta: int) -> frozenset[int]:
    """Vertices within ``beta`` hops of ``i`` (``i`` included)."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    return frozenset(hop_distances(g, i, beta))


def edge_neighborhood(g: WeightedGraph, edge: Edge, beta: int) -> frozenset[int]:
    return neighborhood(g, edge[0], beta) | neighborhood(g, edge[1], beta)


def path_edge_set(g: WeightedGraph, i: int, beta: int) -> frozenset[Edge]:
    """Edges lying on some shortest path from ``i`` to a vertex within ``beta`` hops.

    Edge ``(u, v)`` qualifies iff ``hop(u) + 1 == hop(v) <= beta`` (either
    orientation), i.e. it joins consecutive BFS layers.
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    dist = hop_distances(g, i, beta)
    out = set()
    for u, du in dist.items():
        for v in g.neighbors[u]:
            dv = dist.get(v)
            if dv is not None and dv == du + 1:
                out.add(norm_edge(u, v))
    return frozenset(out)


def diameter(g: WeightedGraph) -> int:
    """Largest finite hop distance (per component)."""
    return max((max(hop_distances(g, i).values()) for i in range(g.n_vertices)), default=0)


def watts_strogatz(
    n: int,
    k_per_side: int,
    p_rewire: float = 0.1,
    weight_lo: float = 0.1,
    weight_hi: float = 5.0,
    seed: int = 0,
    max_tries: int = 200,
) -> WeightedGraph:
    """Connected weighted Watts-Strogatz graph with ``n * k_per_side`` edges.

    Each lattice edge ``(u, u+d)`` is rewired to ``(u, x)`` with probability
    ``p_rewire``, ``x`` uniform among vertices that are neither ``u`` nor
    already adjacent to it. Disconnected draws are discarded and redrawn from
    the same generator, so the result depends only on ``seed``.
    """
    if k_per_side < 1 or n <= 2 * k_per_side:
        raise GraphError(f"need n > 2*k_per_side >= 2, got n={n}, k_per_side={k_per_side}")
    if not 0.0 <= p_rewire <= 1.0:
        raise GraphError(f"p_rewire must lie in [0, 1], got {p_rewire}")
    if not 0.0 < weight_lo <= weight_hi:
        raise GraphError(f"need 0 < weight_lo <= weight_hi, got [{weight_lo}, {weight_hi}]")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        adj: list[set[int]] = [set() for _ in range(n)]
        for u in range(n):
            for d in range(1, k_per_side + 1):
                v = (u + d) % n
                adj[u].add(v)
                adj[v].add(u)
        for d in range(1, k_per_side + 1):
            for u in range(n):
                v = (u + d) % n
                if v not in adj[u] or rng.random() >= p_rewire:
                    continue
                choices = [x for x in range(n) if x != u and x not in adj[u]]
                if not choices:
                    continue
                x = choices[int(rng.integers(len(choices)))]
                adj[u].discard(v)
                adj[v].discard(u)
                adj[u].add(x)
                adj[x].add(u)
        pairs = sorted({norm_edge(u, v) for u in range(n) for v in adj[u]})
        weights = rng.uniform(weight_lo, weight_hi, size=len(pairs))
        g = build_graph(n, [(i, j, w) for (i, j), w in zip(pairs, weights)])
        if len(hop_distances(g, 0)) == n:
            return g
    raise GraphError(f"no connected Watts-Strogatz graph after {max_tries} draws")
