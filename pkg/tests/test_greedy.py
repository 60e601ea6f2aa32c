import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gsp_disconnect import (
    GraphFilter,
    SignalModel,
    apply_hypothesis,
    build_graph,
    diameter,
    enumerate_hypotheses,
    generate,
    greedy_identify,
    greedy_identify_local,
    laplacian,
    lrt_statistic,
    ml_scores,
    model_covariance,
    phi1,
    phi2,
    sample_covariance,
    update_search_set,
)
from gsp_disconnect.greedy import GreedyConfig, GreedyState, identify
from gsp_disconnect.scoring import penalized_score

from conftest import random_pair
from oracles import h2

FILTERS = [GraphFilter.gmrf(), GraphFilter.tikhonov(), GraphFilter.heat()]
ids = lambda f: f.kind  # noqa: E731


def cov(L, f, sw2, m, seed, sx2=1.0):
    return sample_covariance(generate(SignalModel(L, f, sx2, sw2), m, seed)).matrix


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            GreedyConfig(mode="beam")
        with pytest.raises(ValueError):
            GreedyConfig(r_max=0)
        with pytest.raises(ValueError):
            GreedyConfig(beta=-1)


class TestPhi:
    def test_zero_perturbation(self):
        L0, _, _ = random_pair(0)
        s = cov(L0, GraphFilter.heat(), 0.3, 100, 0)
        assert phi1(s, L0, np.zeros((L0.n, L0.n)), [0, 3], GraphFilter.heat(), 1.0, 0.3) == 0
        assert phi2(L0, np.zeros((L0.n, L0.n)), [0, 3], GraphFilter.heat(), 1.0, 0.3) == 0

    @pytest.mark.parametrize("f", FILTERS, ids=ids)
    def test_whole_vertex_set_is_global(self, f):
        L0, Lk, hyp = random_pair(1)
        s = cov(Lk, f, 0.3, 200, 1)
        stat = lrt_statistic(s, L0, Lk, f, 1.0, 0.3)
        everything = range(L0.n)
        assert phi1(s, L0, hyp.perturbation, everything, f, 1.0, 0.3) == pytest.approx(stat.value, rel=1e-9)
        assert phi2(L0, hyp.perturbation, everything, f, 1.0, 0.3) == pytest.approx(stat.penalty, rel=1e-9, abs=1e-12)

    def test_two_vertex_restriction_by_hand(self):
        g = build_graph(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5), (0, 3, 1.5)])
        L0 = laplacian(g)
        Lk, hyp = apply_hypothesis(L0, [(1, 2)])
        sx2, sw2 = 1.0, 0.4
        s = cov(Lk, GraphFilter.tikhonov(), sw2, 50, 2)

        def block(L):
            w, u = np.linalg.eigh(L)
            full = (u * h2("tikhonov", np.clip(w, 0, None))) @ u.T
            b = sx2 * full[np.ix_([1, 2], [1, 2])] + sw2 * np.eye(2)
            a, bb, d = b[0, 0], b[0, 1], b[1, 1]
            det = a * d - bb * bb
            return np.array([[d, -bb], [-bb, a]]) / det, det

        s2 = s[np.ix_([1, 2], [1, 2])]
        inv0, det0 = block(L0.matrix)
        inv1, det1 = block(Lk.matrix)
        expected1 = np.sum(inv0 * s2) - np.sum(inv1 * s2)
        f = GraphFilter.tikhonov()
        assert phi1(s, L0, hyp.perturbation, [1, 2], f, sx2, sw2) == pytest.approx(expected1, rel=1e-10)
        assert phi2(L0, hyp.perturbation, [1, 2], f, sx2, sw2) == pytest.approx(np.log(det1 / det0), rel=1e-10)

    def test_bad_subset(self):
        L0, _, hyp = random_pair(1)
        with pytest.raises(ValueError):
            phi1(np.eye(L0.n), L0, hyp.perturbation, [], GraphFilter.heat(), 1.0, 0.3)
        with pytest.raises(ValueError):
            phi2(L0, hyp.perturbation, [L0.n], GraphFilter.heat(), 1.0, 0.3)


class TestSearchSet:
    @pytest.fixture
    def setting(self):
        g = build_graph(6, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1), (0, 5, 1), (1, 4, 1)])
        L0 = laplacian(g)
        return g, GreedyState([(1, 2)], L0, set(g.edge_pairs))

    def test_no_positive_scores(self, setting):
        g, state = setting
        assert update_search_set(state, {e: -1.0 for e in g.edge_pairs}, g, 2) == set()

    def test_beta_zero_keeps_positive_only(self, setting):
        g, state = setting
        scores = {e: -1.0 for e in g.edge_pairs}
        scores.update({(1, 2): 3.0, (3, 4): 0.5, (0, 5): 0.0})
        assert update_search_set(state, scores, g, 0) == {(3, 4)}

    def test_beta_one_neighbours(self, setting):
        g, state = setting
        scores = {e: -1.0 for e in g.edge_pairs}
        scores[(3, 4)] = 0.5
        # (3,4) lies on a 1-hop path from 3 or 4, which are endpoints of (2,3), (3,4), (4,5), (1,4)
        assert update_search_set(state, scores, g, 1) == {(2, 3), (3, 4), (4, 5), (1, 4)}

    @given(st.integers(0, 300), st.integers(0, 3), st.data())
    @settings(max_examples=40, deadline=None)
    def test_found_edges_never_return(self, seed, beta, data):
        L0, _, _ = random_pair(seed)
        g = L0.graph
        found = data.draw(st.lists(st.sampled_from(g.edge_pairs), unique=True, max_size=3))
        values = data.draw(st.lists(st.floats(-1, 1), min_size=len(g.edge_pairs), max_size=len(g.edge_pairs)))
        scores = dict(zip(g.edge_pairs, values))
        nxt = update_search_set(GreedyState(found, L0, set()), scores, g, beta)
        assert not nxt & set(found)
        assert {e for e, v in scores.items() if v > 0} - set(found) <= nxt


class TestGreedy:
    @pytest.mark.parametrize("f", FILTERS, ids=ids)
    @pytest.mark.parametrize("mode", ["full", "local"])
    def test_trace_is_auditable(self, f, mode):
        L0, Lk, _ = random_pair(2, n=16, r=3)
        s = cov(Lk, f, 0.1, 2000, 3)
        res = identify(s, L0, f, 1.0, 0.1, GreedyConfig(mode=mode, beta=1))
        accepted = [r for r in res.trace if r.accepted]
        assert [r.chosen for r in accepted] == res.edges
        assert all(r.score > 0 for r in accepted)
        assert not res.trace[-1].accepted or len(res.edges) == len(L0.graph.edges)
        assert len(set(res.edges)) == len(res.edges)

    def test_r_max_caps_output(self):
        L0, Lk, _ = random_pair(3, n=16, r=4)
        s = cov(Lk, GraphFilter.heat(), 0.1, 3000, 0)
        for mode in ("full", "local"):
            res = identify(s, L0, GraphFilter.heat(), 1.0, 0.1, GreedyConfig(mode=mode, r_max=2))
            assert len(res.edges) == 2

    def test_first_choice_maximizes_global_score(self):
        L0, Lk, _ = random_pair(4, n=12, r=2)
        f = GraphFilter.tikhonov()
        s = cov(Lk, f, 0.2, 1000, 1)
        res = greedy_identify(s, L0, f, 1.0, 0.2)
        best = max(L0.graph.edge_pairs, key=lambda e: penalized_score(s, L0, apply_hypothesis(L0, [e])[0], f, 1.0, 0.2))
        assert res.edges[0] == best

    def test_recovers_single_edge(self):
        f = GraphFilter.heat()
        hits = 0
        for t in range(100):
            L0, Lk, hyp = random_pair(t, n=20, r=1)
            hits += hyp.removed_edges[0] in greedy_identify(cov(Lk, f, 0.5, 2000, t), L0, f, 1.0, 0.5).edges
        assert hits >= 90

    def test_null_score_mean_is_minus_twice_kl(self):
        # positive false-alarm rates under H0 come from weak edges whose KL divergence is tiny
        L0, _, _ = random_pair(3, n=20)
        f, sw2 = GraphFilter.heat(), 0.5
        e = min(L0.graph.edges, key=lambda x: x[2])[:2]
        Le, _ = apply_hypothesis(L0, [e])
        s0, sk = model_covariance(SignalModel(L0, f, 1.0, sw2)), model_covariance(SignalModel(Le, f, 1.0, sw2))
        two_kl = np.trace(np.linalg.solve(sk, s0)) - L0.n + np.linalg.slogdet(sk)[1] - np.linalg.slogdet(s0)[1]
        scores = [penalized_score(cov(L0, f, sw2, 2000, t), L0, Le, f, 1.0, sw2) for t in range(300)]
        se = np.std(scores) / np.sqrt(len(scores))
        assert abs(np.mean(scores) + two_kl) < 4 * se

    def test_never_beats_exhaustive_ml(self):
        f = GraphFilter.heat()
        for t in range(10):
            L0, Lk, _ = random_pair(t, n=8, r=2)
            s = cov(Lk, f, 0.1, 2000, t)
            hyps = enumerate_hypotheses(L0.graph, 2)
            best = ml_scores(s, hyps, L0, f, 1.0, 0.1).scores.max()
            for mode in ("full", "local"):
                found = identify(s, L0, f, 1.0, 0.1, GreedyConfig(mode=mode, r_max=2)).edges
                assert penalized_score(s, L0, apply_hypothesis(L0, found)[0], f, 1.0, 0.1) <= best + 1e-9

    @pytest.mark.parametrize("f", FILTERS, ids=ids)
    def test_local_with_whole_graph_matches_full(self, f):
        L0, Lk, _ = random_pair(5, n=12, r=2)
        s = cov(Lk, f, 0.3, 500, 5)
        full = greedy_identify(s, L0, f, 1.0, 0.3)
        local = greedy_identify_local(s, L0, f, 1.0, 0.3, GreedyConfig(mode="local", beta=diameter(L0.graph)))
        assert full.edges == local.edges
        for a, b in zip(full.trace, local.trace):
            assert a.score == pytest.approx(b.score, rel=1e-8, abs=1e-10)

    def test_beta_zero_scores_from_pair_only(self):
        L0, Lk, _ = random_pair(6, n=12, r=1)
        f = GraphFilter.heat()
        s = cov(Lk, f, 0.3, 500, 5)
        res = greedy_identify_local(s, L0, f, 1.0, 0.3, GreedyConfig(mode="local", beta=0))
        e = res.trace[0].chosen
        E = apply_hypothesis(L0, [e])[1].perturbation
        expected = phi1(s, L0, E, e, f, 1.0, 0.3) - phi2(L0, E, e, f, 1.0, 0.3)
        assert res.trace[0].score == pytest.approx(expected, rel=1e-10)

    def test_noiseless_gmrf_skips_bridges(self):
        g = build_graph(5, [(0, 1, 1), (1, 2, 1), (2, 0, 1), (2, 3, 1), (3, 4, 1)])
        L0 = laplacian(g)
        Lk, _ = apply_hypothesis(L0, [(0, 1)])
        f = GraphFilter.gmrf()
        res = greedy_identify(cov(Lk, f, 0.0, 2000, 0), L0, f, 1.0, 0.0)
        assert res.edges == [(0, 1)]
        assert res.trace[0].n_candidates == 3

    def test_write_trace(self, tmp_path):
        L0, Lk, _ = random_pair(2)
        res = greedy_identify(cov(Lk, GraphFilter.heat(), 0.1, 1000, 0), L0, GraphFilter.heat(), 1.0, 0.1)
        res.write_trace(tmp_path / "t.jsonl")
        lines = [json.loads(x) for x in (tmp_path / "t.jsonl").read_text().splitlines()]
        assert len(lines) == len(res.trace) and lines[0]["iteration"] == 0

    def test_restricted_edge_set(self):
        L0, Lk, hyp = random_pair(7, r=1)
        s = cov(Lk, GraphFilter.heat(), 0.1, 2000, 0)
        allowed = [e for e in L0.graph.edge_pairs if e not in hyp.removed_edges][:5]
        res = greedy_identify(s, L0, GraphFilter.heat(), 1.0, 0.1, edges=allowed)
        assert set(res.edges) <= set(allowed)
