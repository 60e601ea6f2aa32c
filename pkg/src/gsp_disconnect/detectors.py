"""Binary and M-ary tests for edge disconnections, plus baseline detectors.

Every score is oriented so that larger values favour a disconnection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .graph import (
    DisconnectionHypothesis,
    LaplacianView,
    WeightedGraph,
    apply_hypothesis,
    edge_neighborhood,
)
from .scoring import CovarianceTerms, phi1
from .signals import SampleCovariance, SignalBatch, model_covariance, SignalModel
from .spectral import GraphFilter, gft, log_pseudo_det, pseudo_inverse


class HypothesisCapError(ValueError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"{count} hypotheses exceed the cap of {cap}")
        self.count = count
        self.cap = cap


@dataclass(frozen=True)
class LrtStatistic:
    value: float
    penalty: float

    @property
    def penalized(self) -> float:
        return self.value - self.penalty

    def decide(self, threshold: float) -> bool:
        """True for H1: ``value > threshold`` where ``threshold = gamma + penalty``."""
        return self.value > threshold

    def to_dict(self, hypothesis: DisconnectionHypothesis | None = None) -> dict:
        out = {"value": self.value, "penalty": self.penalty, "penalized": self.penalized}
        if hypothesis is not None:
            out = {"hypothesis": [list(e) for e in hypothesis.removed_edges], **out}
        return out


@dataclass(frozen=True)
class DetectorConfig:
    threshold: float = 0.0
    beta: int | None = None
    band_b: int | None = None

    def band(self, n: int) -> int:
        b = default_band(n) if self.band_b is None else self.band_b
        if not 1 <= b <= n:
            raise ValueError(f"band B={b} outside [1, {n}]")
        return b


def default_band(n: int) -> int:
    return math.ceil(n / 4)


@dataclass(frozen=True, eq=False)
class FrequencyEnergies:
    psi: np.ndarray


def _s(s) -> np.ndarray:
    return getattr(s, "matrix", s)


def lrt_statistic(
    s: SampleCovariance | np.ndarray,
    L0: LaplacianView,
    Lk: LaplacianView,
    filt: GraphFilter,
    sigma_x2: float,
    sigma_w2: float,
) -> LrtStatistic:
    """Trace statistic and log pseudo-determinant penalty from explicit covariances."""
    s_y = _s(s)
    cov0 = model_covariance(SignalModel(L0, filt, sigma_x2, sigma_w2))
    covk = model_covariance(SignalModel(Lk, filt, sigma_x2, sigma_w2))
    value = float(np.trace(pseudo_inverse(cov0) @ s_y) - np.trace(pseudo_inverse(covk) @ s_y))
    penalty = log_pseudo_det(covk) - log_pseudo_det(cov0)
    return LrtStatistic(value, penalty)


def frequency_energies(batch: SignalBatch, L: LaplacianView) -> FrequencyEnergies:
    """Mean squared GFT coefficient per graph frequency."""
    coeffs = gft(L, batch.samples)
    return FrequencyEnergies(np.mean(coeffs**2, axis=1))


def lrt_spectral(
    batch: SignalBatch,
    L0: LaplacianView,
    Lk: LaplacianView,
    filt: GraphFilter,
    sigma_x2: float,
    sigma_w2: float,
) -> float:
    """Trace statistic as weighted graph-frequency energies (needs ``sigma_w2 > 0``)."""
    if not sigma_w2 > 0:
        raise ValueError("spectral form needs a nonsingular covariance (sigma_w2 > 0)")

    def weighted(L):
        h2 = filt.squared(L.eigenvalues)
        weights = h2 / (sigma_w2 + sigma_x2 * h2)
        return float(weights @ frequency_energies(batch, L).psi)

    return sigma_x2 / sigma_w2 * (weighted(Lk) - weighted(L0))


def _check_noiseless_gmrf(filt, sigma_w2):
    if filt is not None and filt.kind != "gmrf":
        raise ValueError("Dirichlet-energy form only holds for the GMRF filter")
    if sigma_w2:
        raise ValueError("Dirichlet-energy form only holds without observation noise")


def gmrf_lrt_noiseless(
    batch: SignalBatch,
    L0: LaplacianView,
    hyp: DisconnectionHypothesis,
    sigma_x2: float,
    filt: GraphFilter | None = None,
    sigma_w2: float = 0.0,
) -> float:
    """Mean Dirichlet-energy drop ``(Q_L0(y) - Q_Lk(y)) / sx2`` over samples."""
    _check_noiseless_gmrf(filt, sigma_w2)
    y = batch.samples
    lk = L0.matrix - hyp.perturbation
    q0 = np.einsum("im,ij,jm->m", y, L0.matrix, y)
    qk = np.einsum("im,ij,jm->m", y, lk, y)
    return float(np.mean(q0 - qk)) / sigma_x2


def gmrf_lrt_edge_sum(batch: SignalBatch, L0: LaplacianView, hyp: DisconnectionHypothesis, sigma_x2: float) -> float:
    """Same statistic as a sum of squared differences across the removed edges."""
    y = batch.samples
    total = 0.0
    for i, j in hyp.removed_edges:
        total -= L0.matrix[i, j] * float(np.sum((y[i] - y[j]) ** 2))
    return total / (sigma_x2 * batch.m_count)


def gmrf_lrt_local_trace(s: SampleCovariance | np.ndarray, hyp: DisconnectionHypothesis, sigma_x2: float) -> float:
    """``Tr([E]_S [S_y]_S) / sx2`` on the affected vertices only."""
    idx = np.array(hyp.affected_vertices, dtype=int)
    if idx.size == 0:
        return 0.0
    sub = np.ix_(idx, idx)
    return float(np.trace(hyp.perturbation[sub] @ _s(s)[sub])) / sigma_x2


def gmrf_penalty_local(L0: LaplacianView, Lk: LaplacianView, hyp: DisconnectionHypothesis) -> float:
    """Noiseless-GMRF penalty from covariances restricted to the affected vertices.

    ``log(|[Lk^+]_S + J/N| / |[L0^+]_S + J/N|)`` with ``J`` the all-ones
    ``|S| x |S|`` matrix; valid for connected graphs. ``sx2`` cancels.
    """
    if hyp.is_null:
        return 0.0
    idx = np.array(hyp.affected_vertices, dtype=int)
    n = L0.n
    sub = np.ix_(idx, idx)
    gmrf = GraphFilter.gmrf()

    def logdet(L):
        block = model_covariance(SignalModel(L, gmrf, 1.0, 0.0))[sub] + 1.0 / n
        sign, ld = np.linalg.slogdet(block)
        if sign <= 0:
            raise ValueError("restricted covariance is not positive definite; graph disconnected?")
        return ld

    return logdet(Lk) - logdet(L0)


def local_vertex_set(g: WeightedGraph, hyp: DisconnectionHypothesis, beta: int) -> frozenset[int]:
    out: frozenset[int] = frozenset()
    for e in hyp.removed_edges:
        out |= edge_neighborhood(g, e, beta)
    return out


def local_lrt(
    s: SampleCovariance | np.ndarray,
    L0: LaplacianView,
    hyp: DisconnectionHypothesis,
    beta: int,
    filt: GraphFilter,
    sigma_x2: float,
    sigma_w2: float,
) -> float:
    """Trace statistic restricted to the ``beta``-neighbourhoods of the removed edges."""
    if hyp.is_null:
        return 0.0
    subset = local_vertex_set(L0.graph, hyp, beta)
    return phi1(_s(s), L0, hyp.perturbation, subset, filt, sigma_x2, sigma_w2)


def enumerate_hypotheses(
    g: WeightedGraph, r_max: int, cap: int = 100_000
) -> list[DisconnectionHypothesis]:
    """Null hypothesis followed by every edge subset of size ``1..r_max``.

    Order is by size, then lexicographic in the sorted edge list.
    """
    n_edges = len(g.edges)
    if not 1 <= r_max <= n_edges:
        raise ValueError(f"r_max must lie in [1, {n_edges}], got {r_max}")
    count = sum(math.comb(n_edges, r) for r in range(1, r_max + 1))
    if count > cap:
        raise HypothesisCapError(count, cap)
    pairs = g.edge_pairs
    weights = tuple(w for _, _, w in g.edges)
    out = [DisconnectionHypothesis(g.n_vertices, (), ())]
    for r in range(1, r_max + 1):
        for combo in combinations(range(n_edges), r):
            out.append(
                DisconnectionHypothesis(
                    g.n_vertices, tuple(pairs[c] for c in combo), tuple(weights[c] for c in combo)
                )
            )
    return out


@dataclass(frozen=True, eq=False)
class MLResult:
    index: int
    scores: np.ndarray
    disconnected: np.ndarray  # hypotheses whose removal splits the graph

    @property
    def flagged(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.disconnected)]


def ml_scores(
    s: SampleCovariance | np.ndarray,
    hypotheses: Sequence[DisconnectionHypothesis],
    L0: LaplacianView,
    filt: GraphFilter,
    sigma_x2: float,
    sigma_w2: float,
) -> MLResult:
    """Penalized statistic for each hypothesis and the ML choice.

    Hypothesis 0 must be the null and scores exactly 0. Ties go to the
    smallest index.
    """
    if not hypotheses or not hypotheses[0].is_null:
        raise ValueError("hypothesis 0 must be the null (no removed edges)")
    s_y = _s(s)
    ref = CovarianceTerms.of(L0, s_y, filt, sigma_x2, sigma_w2)
    scores = np.zeros(len(hypotheses))
    split = np.zeros(len(hypotheses), dtype=bool)
    best = 0
    for k, hyp in enumerate(hypotheses[1:], start=1):
        Lk, _ = apply_hypothesis(L0, hyp.removed_edges)
        alt = CovarianceTerms.of(Lk, s_y, filt, sigma_x2, sigma_w2)
        scores[k] = (ref.trace - alt.trace) - (alt.logdet - ref.logdet)
        split[k] = not Lk.connected
        if scores[k] > scores[best]:
            best = k
    return MLResult(best, scores, split)


def ml_decision(s, hypotheses, L0, filt, sigma_x2, sigma_w2) -> int:
    return ml_scores(s, hypotheses, L0, filt, sigma_x2, sigma_w2).index


def naive_smoothness(batch: SignalBatch, L0: LaplacianView) -> float:
    """Average Dirichlet energy of the samples with respect to ``L0``."""
    y = batch.samples
    return float(np.mean(np.einsum("im,ij,jm->m", y, L0.matrix, y)))


def _high_band_energy(batch: SignalBatch, L: LaplacianView, band: int) -> float:
    if not 1 <= band <= L.n:
        raise ValueError(f"band B={band} outside [1, {L.n}]")
    coeffs = gft(L, batch.samples)[band:]
    return float(np.sum(coeffs**2)) / batch.m_count


def smsd(batch: SignalBatch, L0: LaplacianView, Lk: LaplacianView, band: int | None = None) -> float:
    """Simple matched-subspace detector: high-band energy under ``L0`` minus under ``Lk``."""
    band = default_band(L0.n) if band is None else band
    return _high_band_energy(batch, L0, band) - _high_band_energy(batch, Lk, band)


def bmsd(batch: SignalBatch, L0: LaplacianView, band: int | None = None) -> float:
    """Blind variant: high-band energy under ``L0`` only."""
    band = default_band(L0.n) if band is None else band
    return _high_band_energy(batch, L0, band)
