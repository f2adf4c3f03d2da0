"""Symmetric-positive-definite helpers used by every analysis path.

All solves against covariance matrices go through :func:`solve_spd`, which
applies a bounded jitter ladder before giving up, so callers never hand-roll
their own retry logic and failures carry diagnostics.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_factor, cho_solve, eigh

from .errors import SingularCovarianceError

# Jitter ladder: start tiny, multiply by 10, stop after 1e-6.
_JITTER_START = 1e-10
_JITTER_STOP = 1e-6
_JITTER_FACTOR = 10.0


def sym(a: np.ndarray) -> np.ndarray:
    """Return the symmetric part (a + a.T) / 2."""
    return 0.5 * (a + a.T)


def solve_spd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``a @ x = b`` for symmetric positive (semi)definite ``a``.

    Uses a Cholesky factorization. If the factorization fails, retries with
    ``a + jitter * I`` for jitter in a fixed ladder (1e-10, 1e-9, ..., 1e-6).

    Args:
        a: (n, n) symmetric matrix.
        b: (n,) or (n, k) right-hand side.

    Returns:
        Solution with the same trailing shape as ``b``.

    Raises:
        SingularCovarianceError: if every rung of the ladder fails.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected square matrix, got shape {a.shape}")
    try:
        return cho_solve(cho_factor(a, lower=True), b)
    except np.linalg.LinAlgError:
        pass
    eye = np.eye(a.shape[0])
    jitter = _JITTER_START
    while jitter <= _JITTER_STOP * (1 + 1e-12):
        try:
            return cho_solve(cho_factor(a + jitter * eye, lower=True), b)
        except np.linalg.LinAlgError:
            jitter *= _JITTER_FACTOR
    # Exhausted. Gather diagnostics for the error message.
    smallest_eig = float(np.min(np.linalg.eigvalsh(sym(a))))
    pivot = _smallest_pivot(a)
    raise SingularCovarianceError(
        "covariance solve failed after jitter ladder "
        f"({_JITTER_START:g}..{_JITTER_STOP:g})",
        smallest_pivot=pivot,
        smallest_eigenvalue=smallest_eig,
    )


def _smallest_pivot(a: np.ndarray) -> float | None:
    """Smallest diagonal pivot reached by an unpivoted Cholesky attempt."""
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    smallest = np.inf
    for k in range(n):
        pivot = a[k, k]
        smallest = min(smallest, pivot)
        if pivot <= 0.0:
            return float(smallest)
        root = np.sqrt(pivot)
        a[k:, k] /= root
        a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], a[k + 1:, k])
    return float(smallest) if np.isfinite(smallest) else None


def spd_sqrt(a: np.ndarray) -> np.ndarray:
    """Symmetric square root of a symmetric PSD matrix.

    Eigenvalues below zero (roundoff) are clipped to zero, so mildly
    indefinite inputs produced by floating-point symmetrization still work.
    """
    w, v = eigh(sym(np.asarray(a, dtype=float)))
    w = np.clip(w, 0.0, None)
    return sym((v * np.sqrt(w)) @ v.T)


def max_rel_diff(a: np.ndarray, b: np.ndarray) -> float:
    """Largest absolute difference, normalized by the larger array scale.

    The denominator is max(max|a|, max|b|, tiny) so arrays containing
    near-zero entries do not blow up an elementwise relative error.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))), float(np.finfo(float).tiny))
    return float(np.max(np.abs(a - b)) / scale)
