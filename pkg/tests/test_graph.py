import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gsp_disconnect import (
    GraphError,
    apply_hypothesis,
    build_graph,
    diameter,
    laplacian,
    load_graph,
    neighborhood,
    path_edge_set,
    single_edge_perturbation,
    watts_strogatz,
)
from gsp_disconnect.graph import DisconnectionHypothesis, edge_neighborhood, hop_distances

from oracles import bfs_components, hop_matrix, laplacian_from_edges, shortest_path_edges


@st.composite
def weighted_graphs(draw, min_n=2, max_n=9):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    weights = draw(st.lists(st.floats(0.1, 5.0), min_size=len(chosen), max_size=len(chosen)))
    return build_graph(n, [(i, j, w) for (i, j), w in zip(chosen, weights)])


class TestBuildGraph:
    def test_two_vertices(self):
        g = build_graph(2, [(0, 1, 2.5)])
        np.testing.assert_array_equal(g.adjacency, [[0, 2.5], [2.5, 0]])

    def test_path_degrees(self, path3):
        np.testing.assert_array_equal(np.diag(laplacian(path3).matrix), [1, 3, 2])

    @pytest.mark.parametrize(
        "edges",
        [[(0, 0, 1.0)], [(0, 3, 1.0)], [(0, 1, 0.0)], [(0, 1, -1.0)], [(0, 1, 1.0), (1, 0, 2.0)]],
        ids=["self-loop", "out-of-range", "zero-weight", "negative-weight", "duplicate"],
    )
    def test_rejects_bad_edges(self, edges):
        with pytest.raises(GraphError):
            build_graph(3, edges)

    def test_edges_sorted_and_normalized(self):
        g = build_graph(4, [(3, 1, 1.0), (2, 0, 2.0)])
        assert g.edge_pairs == ((0, 2), (1, 3))

    def test_json_round_trip(self, tmp_path, path3):
        p = tmp_path / "g.json"
        path3.save(p)
        assert load_graph(p) == path3
        assert json.loads(p.read_text())["n"] == 3

    def test_load_malformed(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"edges": []}))
        with pytest.raises(GraphError):
            load_graph(p)


class TestLaplacian:
    def test_two_vertex_closed_form(self):
        L = laplacian(build_graph(2, [(0, 1, 1.5)]))
        np.testing.assert_allclose(L.matrix, [[1.5, -1.5], [-1.5, 1.5]])
        np.testing.assert_allclose(L.eigenvalues, [0, 3.0], atol=1e-14)

    def test_triangle(self):
        L = laplacian(build_graph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)]))
        np.testing.assert_allclose(L.eigenvalues, np.linalg.eigvalsh(L.matrix), atol=1e-12)
        np.testing.assert_allclose(L.eigenvalues, [0, 3, 3], atol=1e-12)

    @given(weighted_graphs())
    @settings(max_examples=60, deadline=None)
    def test_structure_matches_oracle(self, g):
        L = laplacian(g)
        np.testing.assert_allclose(L.matrix, laplacian_from_edges(g.n_vertices, g.edges), atol=1e-12)
        np.testing.assert_allclose(L.matrix.sum(axis=1), 0, atol=1e-12)
        assert np.all(L.eigenvalues >= 0)
        assert np.all(np.diff(L.eigenvalues) >= 0)
        assert L.zero_eig_count == bfs_components(g.n_vertices, g.edge_pairs)

    def test_connected_has_single_zero(self):
        L = laplacian(watts_strogatz(20, 2, seed=3))
        assert L.connected and L.eigenvalues[0] == 0 and L.eigenvalues[1] > 0

    def test_two_disjoint_edges(self):
        L = laplacian(build_graph(4, [(0, 1, 1), (2, 3, 1)]))
        assert L.zero_eig_count == 2 and not L.connected

    def test_read_only(self, path3):
        with pytest.raises(ValueError):
            laplacian(path3).matrix[0, 0] = 5


class TestPerturbation:
    def test_only_edge(self):
        L = laplacian(build_graph(2, [(0, 1, 3.0)]))
        E = single_edge_perturbation(L, 0, 1)
        np.testing.assert_allclose(E, [[3, -3], [-3, 3]])
        np.testing.assert_allclose(L.matrix - E, 0)
        np.testing.assert_allclose(np.linalg.eigvalsh(E), [0, 6], atol=1e-12)

    def test_path_removal_matches_rebuilt_graph(self, path3):
        L = laplacian(path3)
        E = single_edge_perturbation(L, 1, 2)
        np.testing.assert_allclose(L.matrix - E, laplacian_from_edges(3, [(0, 1, 1.0)]))

    def test_non_edge_rejected(self, path3):
        with pytest.raises(GraphError):
            single_edge_perturbation(laplacian(path3), 0, 2)

    def test_null_hypothesis_is_identity(self, path3):
        L = laplacian(path3)
        Lk, hyp = apply_hypothesis(L, [])
        assert Lk is L and hyp.affected_vertices == () and hyp.is_null

    def test_affected_vertices_on_cycle(self):
        g = build_graph(6, [(i, (i + 1) % 6, 1.0) for i in range(6)])
        _, hyp = apply_hypothesis(laplacian(g), [(1, 2), (3, 4)])
        assert hyp.affected_vertices == (1, 2, 3, 4)

    def test_removing_missing_edge_fails(self, path3):
        with pytest.raises(GraphError):
            apply_hypothesis(laplacian(path3), [(0, 2)])

    @given(weighted_graphs(min_n=3), st.data())
    @settings(max_examples=60, deadline=None)
    def test_removal_is_valid_laplacian(self, g, data):
        if not g.edges:
            return
        removed = data.draw(st.lists(st.sampled_from(g.edge_pairs), unique=True, min_size=1))
        L0 = laplacian(g)
        Lk, hyp = apply_hypothesis(L0, removed)
        kept = [e for e in g.edges if (e[0], e[1]) not in set(removed)]
        np.testing.assert_allclose(Lk.matrix, laplacian_from_edges(g.n_vertices, kept), atol=1e-12)
        off = Lk.matrix[~np.eye(g.n_vertices, dtype=bool)]
        assert np.all(off <= 0)
        np.testing.assert_allclose(Lk.matrix.sum(axis=1), 0, atol=1e-12)
        singles = sum(single_edge_perturbation(L0, i, j) for i, j in hyp.removed_edges)
        np.testing.assert_allclose(hyp.perturbation, singles, atol=1e-12)
        assert np.all(np.linalg.eigvalsh(hyp.perturbation) >= -1e-10)
        assert Lk.graph.edge_pairs == tuple(e[:2] for e in kept)

    def test_cycle_minus_edge_connected(self):
        g = build_graph(5, [(i, (i + 1) % 5, 1.0) for i in range(5)])
        Lk, _ = apply_hypothesis(laplacian(g), [(0, 4)])
        assert Lk.connected
        assert bfs_components(5, Lk.graph.edge_pairs) == 1

    def test_hypothesis_from_graph_dedupes(self, path3):
        hyp = DisconnectionHypothesis.from_graph(path3, [(1, 0), (0, 1)])
        assert hyp.removed_edges == ((0, 1),) and hyp.weights == (1.0,)


class TestNeighborhoods:
    def test_zero_hops(self, path3):
        assert neighborhood(path3, 1, 0) == {1}
        assert path_edge_set(path3, 1, 0) == frozenset()

    def test_path_one_hop(self):
        g = build_graph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
        assert neighborhood(g, 1, 1) == {0, 1, 2}

    def test_star(self):
        g = build_graph(5, [(0, k, 1.0) for k in range(1, 5)])
        assert path_edge_set(g, 0, 1) == set(g.edge_pairs)

    def test_four_cycle_both_paths(self):
        g = build_graph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1)])
        assert path_edge_set(g, 0, 2) == set(g.edge_pairs)

    def test_negative_beta(self, path3):
        with pytest.raises(ValueError):
            neighborhood(path3, 0, -1)

    @given(weighted_graphs(min_n=2, max_n=8), st.data())
    @settings(max_examples=60, deadline=None)
    def test_against_floyd_warshall(self, g, data):
        n = g.n_vertices
        i = data.draw(st.integers(0, n - 1))
        beta = data.draw(st.integers(0, n))
        d = hop_matrix(n, g.edge_pairs)
        assert neighborhood(g, i, beta) == {v for v in range(n) if d[i, v] <= beta}
        assert hop_distances(g, i) == {v: int(d[i, v]) for v in range(n) if np.isfinite(d[i, v])}
        assert path_edge_set(g, i, beta) == shortest_path_edges(n, g.edge_pairs, i, beta)

    def test_beyond_diameter_covers_component(self):
        g = watts_strogatz(15, 2, seed=4)
        dia = diameter(g)
        for i in range(15):
            assert neighborhood(g, i, dia) == set(range(15))
        assert edge_neighborhood(g, g.edge_pairs[0], dia) == set(range(15))


class TestWattsStrogatz:
    def test_edge_count_at_full_size(self):
        g = watts_strogatz(50, 2, seed=0)
        assert len(g.edges) == 100

    def test_weights_in_range(self):
        g = watts_strogatz(50, 2, weight_lo=0.1, weight_hi=5.0, seed=1)
        w = np.array([e[2] for e in g.edges])
        assert w.min() >= 0.1 and w.max() <= 5.0

    def test_ring_lattice_without_rewiring(self):
        g = watts_strogatz(12, 2, p_rewire=0.0, seed=0)
        deg = np.count_nonzero(g.adjacency, axis=1)
        assert np.all(deg == 4)
        assert set(g.edge_pairs) == {tuple(sorted((u, (u + d) % 12))) for u in range(12) for d in (1, 2)}

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_seeded_and_connected(self, seed):
        a = watts_strogatz(16, 2, seed=seed)
        assert a == watts_strogatz(16, 2, seed=seed)
        assert bfs_components(16, a.edge_pairs) == 1

    def test_bad_parameters(self):
        with pytest.raises(GraphError):
            watts_strogatz(4, 2)
        with pytest.raises(GraphError):
            watts_strogatz(10, 2, p_rewire=1.5)
