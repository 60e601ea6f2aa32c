"""Greedy identification of disconnected edges.

``greedy_identify`` adds, one edge per iteration, the candidate with the
largest penalized likelihood gain over the current Laplacian and stops once
no candidate has a strictly positive gain (or ``r_max`` edges are found).
``greedy_identify_local`` scores each candidate only on the
``beta``-neighbourhood of its endpoints and shrinks the search set to edges
near positively scored ones.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from ._linalg import sym_eigh
from .graph import (
    Edge,
    LaplacianView,
    WeightedGraph,
    apply_hypothesis,
    edge_neighborhood,
    path_edge_set,
)
from .scoring import CovarianceTerms, filtered_block, local_terms, phi1, phi2
from .signals import SampleCovariance
from .spectral import GraphFilter

__all__ = [
    "GreedyConfig",
    "GreedyState",
    "GreedyResult",
    "IterationRecord",
    "greedy_identify",
    "greedy_identify_local",
    "identify",
    "phi1",
    "phi2",
    "update_search_set",
]


@dataclass(frozen=True)
class GreedyConfig:
    r_max: int | None = None
    beta: int = 1
    mode: str = "full"
    skip_bridges: bool = True

    def __post_init__(self):
        if self.mode not in ("full", "local"):
            raise ValueError(f"mode must be 'full' or 'local', got {self.mode!r}")
        if self.r_max is not None and self.r_max < 1:
            raise ValueError("r_max must be >= 1")
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")


@dataclass
class GreedyState:
    found_edges: list[Edge]
    current_laplacian: LaplacianView
    search_edges: set[Edge]
    iteration: int = 0


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    n_candidates: int
    chosen: Edge | None
    score: float
    accepted: bool
    next_search_size: int

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "n_candidates": self.n_candidates,
            "chosen": list(self.chosen) if self.chosen else None,
            "score": self.score,
            "accepted": self.accepted,
            "next_search_size": self.next_search_size,
        }


@dataclass
class GreedyResult:
    edges: list[Edge]
    trace: list[IterationRecord] = field(default_factory=list)
    evaluations: int = 0

    def write_trace(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            for rec in self.trace:
                fh.write(json.dumps(rec.to_dict()) + "\n")


def _remove_edge(lap: np.ndarray, e: Edge) -> np.ndarray:
    i, j = e
    lij = lap[i, j]
    out = lap.copy()
    out[i, j] = out[j, i] = 0.0
    out[i, i] += lij
    out[j, j] += lij
    return out


@lru_cache(maxsize=64)
def _path_sets(g: WeightedGraph, beta: int) -> tuple[frozenset[Edge], ...]:
    return tuple(path_edge_set(g, i, beta) for i in range(g.n_vertices))


def _skip(cand_eigs: np.ndarray, filt: GraphFilter, sigma_w2: float, cfg: GreedyConfig) -> bool:
    # splitting the graph leaves noiseless GMRF outside the model's support
    if not (cfg.skip_bridges and filt.kind == "gmrf" and sigma_w2 == 0):
        return False
    return int(np.sum(cand_eigs == 0.0)) > 1


def _argmax(scores: Mapping[Edge, float]) -> tuple[Edge | None, float]:
    best, best_score = None, -np.inf
    for e in sorted(scores):
        if scores[e] > best_score:
            best, best_score = e, scores[e]
    return best, best_score


def greedy_identify(
    s: SampleCovariance | np.ndarray,
    L0: LaplacianView,
    filt: GraphFilter,
    sigma_x2: float,
    sigma_w2: float,
    cfg: GreedyConfig = GreedyConfig(),
    edges: Iterable[Edge] | None = None,
) -> GreedyResult:
    """Full greedy search over every remaining edge."""
    s_y = getattr(s, "matrix", s)
    state = GreedyState([], L0, set(L0.graph.edge_pairs if edges is None else edges))
    result = GreedyResult([])
    while state.search_edges:
        cur = state.current_laplacian
        ref = CovarianceTerms.of(cur, s_y, filt, sigma_x2, sigma_w2)
        scores: dict[Edge, float] = {}
        for e in state.search_edges:
            lk = _remove_edge(cur.matrix, e)
            eig, vec = sym_eigh(lk)
            result.evaluations += 1
            if _skip(eig, filt, sigma_w2, cfg):
                continue
            alt = CovarianceTerms(eig, vec, s_y, filt, sigma_x2, sigma_w2)
            scores[e] = (ref.trace - alt.trace) - (alt.logdet - ref.logdet)
        chosen, score = _argmax(scores)
        accepted = chosen is not None and score > 0
        if accepted:
            state.found_edges.append(chosen)
            state.search_edges.discard(chosen)
            state.current_laplacian, _ = apply_hypothesis(cur, [chosen])
        result.trace.append(
            IterationRecord(state.iteration, len(scores), chosen, float(score), accepted, len(state.search_edges))
        )
        state.iteration += 1
        if not accepted or (cfg.r_max is not None and len(state.found_edges) >= cfg.r_max):
            break
    result.edges = list(state.found_edges)
    return result


def update_search_set(
    state: GreedyState,
    scores: Mapping[Edge, float],
    g: WeightedGraph,
    beta: int,
) -> set[Edge]:
    """Next search set: positively scored edges plus their path neighbours.

    An original edge ``(i, j)`` joins through the neighbour rule when some
    positively scored edge lies on a shortest path of at most ``beta`` hops
    out of ``i`` or ``j``. Edges already found are removed.
    """
    positive = {e for e, v in scores.items() if v > 0}
    near = set()
    if positive and beta > 0:
        paths = _path_sets(g, beta)
        for i, j in g.edge_pairs:
            if (paths[i] | paths[j]) & positive:
                near.add((i, j))
    return (positive | near) - set(state.found_edges)


def greedy_identify_local(
    s: SampleCovariance | np.ndarray,
    L0: LaplacianView,
    filt: GraphFilter,
    sigma_x2: float,
    sigma_w2: float,
    cfg: GreedyConfig = GreedyConfig(mode="local"),
    edges: Iterable[Edge] | None = None,
) -> GreedyResult:
    """Greedy search with ``beta``-local scores and a shrinking search set.

    Neighbourhoods and shortest-path edge sets are taken on the original
    graph ``L0.graph``.
    """
    s_y = getattr(s, "matrix", s)
    g = L0.graph
    beta = cfg.beta
    hood = {e: np.array(sorted(edge_neighborhood(g, e, beta)), dtype=int) for e in g.edge_pairs}
    state = GreedyState([], L0, set(g.edge_pairs if edges is None else edges))
    result = GreedyResult([])
    while state.search_edges:
        cur = state.current_laplacian
        scores: dict[Edge, float] = {}
        for e in state.search_edges:
            idx = hood[e]
            lk = _remove_edge(cur.matrix, e)
            eig, vec = sym_eigh(lk)
            result.evaluations += 1
            if _skip(eig, filt, sigma_w2, cfg):
                continue
            h_ref = filtered_block(cur.eigenvalues, cur.eigenvectors, filt, idx)
            h_alt = filtered_block(eig, vec, filt, idx)
            p1, p2 = local_terms(s_y, h_ref, h_alt, idx, sigma_x2, sigma_w2)
            scores[e] = p1 - p2
        chosen, score = _argmax(scores)
        accepted = chosen is not None and score > 0
        if accepted:
            state.found_edges.append(chosen)
            state.current_laplacian, _ = apply_hypothesis(cur, [chosen])
            state.search_edges = update_search_set(state, scores, g, beta)
        result.trace.append(
            IterationRecord(state.iteration, len(scores), chosen, float(score), accepted, len(state.search_edges))
        )
        state.iteration += 1
        if not accepted or (cfg.r_max is not None and len(state.found_edges) >= cfg.r_max):
            break
    result.edges = list(state.found_edges)
    return result


def identify(s, L0, filt, sigma_x2, sigma_w2, cfg: GreedyConfig) -> GreedyResult:
    if cfg.mode == "full":
        return greedy_identify(s, L0, filt, sigma_x2, sigma_w2, cfg)
    return greedy_identify_local(s, L0, filt, sigma_x2, sigma_w2, cfg)
