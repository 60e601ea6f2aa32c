"""Eigenbasis likelihood terms shared by the ML rule and the greedy searches.

The model covariance of Laplacian ``L`` is diagonal in ``L``'s eigenbasis, so
``Tr(Sigma^+ S_y)`` and ``log|Sigma|_+`` only need the eigenpairs of ``L``.
The restricted (local) variants work on principal submatrices
``[sx2 h^2(L)]_S + sw2 I`` and need a small eigendecomposition of their own.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ._linalg import pinv_logpdet_from_eigs, sym_eigh
from .graph import LaplacianView
from .spectral import GraphFilter


class CovarianceTerms:
    """``Tr(Sigma(L)^+ S_y)`` and ``log|Sigma(L)|_+`` for one Laplacian."""

    __slots__ = ("trace", "logdet")

    def __init__(self, eigenvalues, eigenvectors, s_y, filt, sigma_x2, sigma_w2):
        d = sigma_x2 * filt.squared(eigenvalues) + sigma_w2
        inv, self.logdet = pinv_logpdet_from_eigs(d)
        proj = np.einsum("in,in->n", eigenvectors, s_y @ eigenvectors)
        self.trace = float(inv @ proj)

    @classmethod
    def of(cls, L: LaplacianView, s_y, filt, sigma_x2, sigma_w2) -> "CovarianceTerms":
        return cls(L.eigenvalues, L.eigenvectors, s_y, filt, sigma_x2, sigma_w2)


def penalized_score(
    s_y: np.ndarray,
    L_ref: LaplacianView,
    L_alt: LaplacianView,
    filt: GraphFilter,
    sigma_x2: float,
    sigma_w2: float,
) -> float:
    """``l(y|L_alt) - rho(L_alt)`` with ``L_ref`` playing the null."""
    if L_alt is L_ref:
        return 0.0
    ref = CovarianceTerms.of(L_ref, s_y, filt, sigma_x2, sigma_w2)
    alt = CovarianceTerms.of(L_alt, s_y, filt, sigma_x2, sigma_w2)
    return (ref.trace - alt.trace) - (alt.logdet - ref.logdet)


def filtered_block(
    eigenvalues: np.ndarray, eigenvectors: np.ndarray, filt: GraphFilter, idx: np.ndarray
) -> np.ndarray:
    """``[h^2(L)]_S`` from the full eigendecomposition of ``L``."""
    us = eigenvectors[idx]
    out = (us * filt.squared(eigenvalues)) @ us.T
    return 0.5 * (out + out.T)


def _restricted_terms(h2_block, s_block, sigma_x2, sigma_w2) -> tuple[float, float]:
    b = sigma_x2 * h2_block
    b[np.diag_indices_from(b)] += sigma_w2
    w, u = sym_eigh(b, clamp=False)
    inv, logdet = pinv_logpdet_from_eigs(w)
    proj = np.einsum("in,in->n", u, s_block @ u)
    return float(inv @ proj), logdet


def local_terms(
    s_y: np.ndarray,
    h2_ref: np.ndarray,
    h2_alt: np.ndarray,
    idx: np.ndarray,
    sigma_x2: float,
    sigma_w2: float,
) -> tuple[float, float]:
    """``(Phi1, Phi2)`` from already-restricted filtered blocks."""
    s_block = s_y[np.ix_(idx, idx)]
    tr0, ld0 = _restricted_terms(h2_ref.copy(), s_block, sigma_x2, sigma_w2)
    tr1, ld1 = _restricted_terms(h2_alt.copy(), s_block, sigma_x2, sigma_w2)
    return tr0 - tr1, ld1 - ld0


def _vertex_index(subset: Sequence[int], n: int) -> np.ndarray:
    idx = np.array(sorted(set(int(v) for v in subset)), dtype=int)
    if idx.size == 0:
        raise ValueError("vertex subset must be nonempty")
    if idx[0] < 0 or idx[-1] >= n:
        raise ValueError("vertex subset out of range")
    return idx


def _both_blocks(L, E, subset, filt):
    idx = _vertex_index(subset, L.n)
    h2_ref = filtered_block(L.eigenvalues, L.eigenvectors, filt, idx)
    w, u = sym_eigh(L.matrix - np.asarray(E))
    return idx, h2_ref, filtered_block(w, u, filt, idx)


def phi1(s_y, L: LaplacianView, E, subset, filt: GraphFilter, sigma_x2: float, sigma_w2: float) -> float:
    """Local trace statistic on the vertices in ``subset``.

    ``Tr((sx2 [h^2(L)]_S + sw2 I)^+ [S_y]_S) - Tr((sx2 [h^2(L-E)]_S + sw2 I)^+ [S_y]_S)``
    where the filtered matrices are formed on the whole graph and then
    restricted to ``S``.
    """
    s_y = getattr(s_y, "matrix", s_y)
    idx, h0, h1 = _both_blocks(L, E, subset, filt)
    return local_terms(s_y, h0, h1, idx, sigma_x2, sigma_w2)[0]


def phi2(L: LaplacianView, E, subset, filt: GraphFilter, sigma_x2: float, sigma_w2: float) -> float:
    """Local penalty: log pseudo-determinant ratio of the restricted covariances."""
    idx, h0, h1 = _both_blocks(L, E, subset, filt)
    zeros = np.zeros((idx.size, idx.size))
    ld0 = _restricted_terms(h0.copy(), zeros, sigma_x2, sigma_w2)[1]
    ld1 = _restricted_terms(h1.copy(), zeros, sigma_x2, sigma_w2)[1]
    return ld1 - ld0
