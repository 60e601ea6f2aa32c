"""Filtered-white-noise measurements and their Gaussian likelihood.

Samples follow ``y[m] = h(L) x[m] + w[m]`` with ``x ~ N(0, sx2 I)`` and
``w ~ N(0, sw2 I)``. Batches are stored column-wise as an ``(N, M)`` array.

Randomness comes from numpy's PCG64. Samples are drawn in fixed blocks of
``BLOCK`` columns and block ``b`` uses ``SeedSequence(seed, spawn_key=(b,))``,
so a batch is reproducible regardless of how blocks are scheduled, and the
first ``m`` columns do not depend on the requested length.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._linalg import pinv_logpdet_from_eigs
from .graph import LaplacianView
from .spectral import GraphFilter, transfer

BLOCK = 1024


@dataclass(frozen=True, eq=False)
class SignalModel:
    laplacian: LaplacianView
    filter: GraphFilter
    sigma_x2: float = 1.0
    sigma_w2: float = 0.0

    def __post_init__(self):
        if self.sigma_x2 < 0 or self.sigma_w2 < 0:
            raise ValueError("variances must be nonnegative")

    def covariance_eigenvalues(self) -> np.ndarray:
        """Eigenvalues of the model covariance in the Laplacian eigenbasis."""
        return covariance_spectrum(self.laplacian, self.filter, self.sigma_x2, self.sigma_w2)


def covariance_spectrum(
    L: LaplacianView, filt: GraphFilter, sigma_x2: float, sigma_w2: float
) -> np.ndarray:
    return sigma_x2 * filt.squared(L.eigenvalues) + sigma_w2


@dataclass(frozen=True, eq=False)
class SignalBatch:
    samples: np.ndarray  # (N, M)

    def __post_init__(self):
        if self.samples.ndim != 2 or self.samples.shape[1] < 1:
            raise ValueError("samples must be an (N, M) array with M >= 1")

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def m_count(self) -> int:
        return self.samples.shape[1]

    def save_csv(self, path: str | Path) -> None:
        np.savetxt(path, self.samples, delimiter=",", fmt="%.17g")

    @classmethod
    def load_csv(cls, path: str | Path) -> "SignalBatch":
        return cls(np.atleast_2d(np.loadtxt(path, delimiter=",", ndmin=2)))


@dataclass(frozen=True, eq=False)
class SampleCovariance:
    matrix: np.ndarray
    m_count: int

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def save_csv(self, path: str | Path) -> None:
        np.savetxt(path, self.matrix, delimiter=",", fmt="%.17g")


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def generate(model: SignalModel, m: int, seed: int) -> SignalBatch:
    """Draw ``m`` measurements from ``model``; deterministic in ``seed``."""
    if m < 1:
        raise ValueError("need at least one sample")
    L = model.laplacian
    u = L.eigenvectors
    h = transfer(model.filter, L.eigenvalues)
    sx, sw = np.sqrt(model.sigma_x2), np.sqrt(model.sigma_w2)
    out = np.empty((L.n, m))
    for b, start in enumerate(range(0, m, BLOCK)):
        c = min(BLOCK, m - start)
        rng = block_rng(seed, b)
        # full blocks are always drawn so a shorter batch is a prefix of a longer one
        x = sx * rng.standard_normal((L.n, BLOCK))[:, :c]
        w = sw * rng.standard_normal((L.n, BLOCK))[:, :c]
        out[:, start : start + c] = u @ (h[:, None] * (u.T @ x)) + w
    return SignalBatch(out)


def model_covariance(model: SignalModel) -> np.ndarray:
    """``sx2 U h^2(Lambda) U^T + sw2 I``."""
    u = model.laplacian.eigenvectors
    out = (u * (model.sigma_x2 * model.filter.squared(model.laplacian.eigenvalues))) @ u.T
    out = 0.5 * (out + out.T)
    out[np.diag_indices_from(out)] += model.sigma_w2
    return out


def sample_covariance(batch: SignalBatch) -> SampleCovariance:
    y = batch.samples
    s = y @ y.T / y.shape[1]
    return SampleCovariance(0.5 * (s + s.T), y.shape[1])


def log_likelihood(s: SampleCovariance, model: SignalModel) -> float:
    """Gaussian log-likelihood of ``M`` samples with pseudo-inverse and pseudo-determinant."""
    if s.n != model.laplacian.n:
        raise ValueError("sample covariance and model dimensions differ")
    m, n = s.m_count, s.n
    d = model.covariance_eigenvalues()
    inv, logdet = pinv_logpdet_from_eigs(d)
    u = model.laplacian.eigenvectors
    quad = float(np.sum(inv * np.einsum("in,ij,jn->n", u, s.matrix, u)))
    return -0.5 * m * n * np.log(2 * np.pi) - 0.5 * m * logdet - 0.5 * m * quad
