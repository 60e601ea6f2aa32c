"""Small symmetric-eigen helpers shared by every module."""

from __future__ import annotations

import numpy as np

EPS = np.finfo(float).eps


def rank_tolerance(values: np.ndarray, n: int | None = None) -> float:
    """Threshold below which an eigenvalue counts as zero.

    Uses the usual numerical-rank rule ``n * eps * max|value|``.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0.0
    n = values.size if n is None else n
    return n * EPS * float(np.max(np.abs(values)))


def check_symmetric(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-10 * scale:
        raise ValueError(f"{name} is not symmetric")
    return a


def sym_eigh(a: np.ndarray, clamp: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigendecomposition of a symmetric matrix.

    With ``clamp`` every eigenvalue whose magnitude is under the rank
    tolerance is set to exactly zero, so downstream spectral functions
    (``1/sqrt(lambda)`` in particular) see a clean null space.
    """
    a = 0.5 * (a + a.T)
    try:
        w, u = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise np.linalg.LinAlgError(
            f"eigendecomposition failed for {a.shape[0]}x{a.shape[0]} matrix: {exc}"
        ) from exc
    if clamp:
        tol = rank_tolerance(w)
        w = np.where(np.abs(w) < tol, 0.0, w)
    return w, u


def pinv_logpdet_from_eigs(w: np.ndarray) -> tuple[np.ndarray, float]:
    """Inverted nonzero eigenvalues (zeros kept) and the log pseudo-determinant."""
    tol = rank_tolerance(w)
    keep = w > tol
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / w[keep]
    return inv, float(np.sum(np.log(w[keep])))
