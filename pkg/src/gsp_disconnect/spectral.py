"""Graph Fourier transform, Dirichlet energy and smooth graph filters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import check_symmetric, pinv_logpdet_from_eigs, sym_eigh
from .graph import LaplacianView

FILTER_KINDS = ("gmrf", "tikhonov", "heat")


@dataclass(frozen=True)
class GraphFilter:
    """Transfer-function family ``h(lambda)``.

    ``gmrf``: ``1/sqrt(lambda)`` (0 at lambda=0); ``tikhonov``:
    ``1/(1 + alpha*lambda)``; ``heat``: ``exp(-tau*lambda)``.
    """

    kind: str
    alpha: float = 0.5
    tau: float = 0.2

    def __post_init__(self):
        if self.kind not in FILTER_KINDS:
            raise ValueError(f"unknown filter {self.kind!r}; expected one of {FILTER_KINDS}")
        if self.kind == "tikhonov" and not self.alpha > 0:
            raise ValueError("tikhonov alpha must be positive")
        if self.kind == "heat" and not self.tau > 0:
            raise ValueError("heat tau must be positive")

    @classmethod
    def gmrf(cls) -> "GraphFilter":
        return cls("gmrf")

    @classmethod
    def tikhonov(cls, alpha: float = 0.5) -> "GraphFilter":
        return cls("tikhonov", alpha=alpha)

    @classmethod
    def heat(cls, tau: float = 0.2) -> "GraphFilter":
        return cls("heat", tau=tau)

    def __call__(self, lam):
        return transfer(self, lam)

    def squared(self, lam) -> np.ndarray:
        """``h(lambda)**2`` without the square root round trip for the GMRF case."""
        lam = np.asarray(lam, dtype=float)
        if self.kind == "gmrf":
            out = np.zeros_like(lam)
            nz = lam > 0
            out[nz] = 1.0 / lam[nz]
            return out
        return transfer(self, lam) ** 2


def transfer(f: GraphFilter, lam):
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise ValueError("transfer function is defined for lambda >= 0")
    if f.kind == "gmrf":
        out = np.zeros_like(lam)
        nz = lam > 0
        out[nz] = 1.0 / np.sqrt(lam[nz])
    elif f.kind == "tikhonov":
        out = 1.0 / (1.0 + f.alpha * lam)
    else:
        out = np.exp(-f.tau * lam)
    return float(out) if out.ndim == 0 else out


def _check_signal(L: LaplacianView, a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape[0] != L.n:
        raise ValueError(f"signal length {a.shape[0]} does not match graph size {L.n}")
    return a


def gft(L: LaplacianView, a: np.ndarray) -> np.ndarray:
    """Spectrum ``U^T a``. Accepts a vector or an ``(N, M)`` batch."""
    return L.eigenvectors.T @ _check_signal(L, a)


def igft(L: LaplacianView, s: np.ndarray) -> np.ndarray:
    return L.eigenvectors @ _check_signal(L, s)


def dirichlet_energy(L: LaplacianView, a: np.ndarray) -> float:
    a = _check_signal(L, a)
    return float(a @ L.matrix @ a)


def filter_matrix(L: LaplacianView, f: GraphFilter, power: int = 1) -> np.ndarray:
    """``U h(Lambda)^power U^T``."""
    u = L.eigenvectors
    d = f.squared(L.eigenvalues) if power == 2 else transfer(f, L.eigenvalues) ** power
    out = (u * d) @ u.T
    return 0.5 * (out + out.T)


def smoothness_ratio(L: LaplacianView, f: GraphFilter) -> float:
    """Expected output/input Dirichlet energy for white Gaussian input.

    ``E[Q(h(L)x)] / E[Q(x)] = sum(lambda h^2(lambda)) / sum(lambda)``.
    """
    lam = L.eigenvalues
    total = float(np.sum(lam))
    if total <= 0:
        raise ValueError("smoothness ratio undefined for a graph without edges")
    return float(np.sum(lam * f.squared(lam))) / total


def pseudo_inverse(a: np.ndarray) -> np.ndarray:
    a = check_symmetric(a)
    w, u = sym_eigh(a, clamp=False)
    inv, _ = pinv_logpdet_from_eigs(w)
    out = (u * inv) @ u.T
    return 0.5 * (out + out.T)


def log_pseudo_det(a: np.ndarray) -> float:
    """Log of the product of nonzero eigenvalues of a symmetric PSD matrix."""
    a = check_symmetric(a)
    w, _ = sym_eigh(a, clamp=False)
    return pinv_logpdet_from_eigs(w)[1]


def pseudo_det(a: np.ndarray) -> float:
    return float(np.exp(log_pseudo_det(a)))
