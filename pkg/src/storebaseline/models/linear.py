"""Ordinary least squares with an intercept."""

from __future__ import annotations

import warnings

import numpy as np
from scipy.linalg import solve_triangular


class RankDeficientWarning(UserWarning):
    pass


def solve_ols(A: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Least-squares solution of ``A b ~ y``.

    Uses a Householder QR factorisation when ``A`` has full column rank and
    falls back to the minimum-norm solution otherwise.
    """
    n, p = A.shape
    if p == 0:
        return np.zeros(0)
    if n >= p:
        Q, R = np.linalg.qr(A, mode="reduced")
        diag = np.abs(np.diag(R))
        tol = max(n, p) * np.finfo(float).eps * diag.max() if diag.size else 0.0
        if diag.size and diag.min() > tol:
            return solve_triangular(R, Q.T @ y, lower=False)
    warnings.warn(
        f"rank-deficient design ({n} rows, {p} columns); using the least-norm solution",
        RankDeficientWarning,
        stacklevel=3,
    )
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return coef


def with_intercept(X: np.ndarray) -> np.ndarray:
    return np.column_stack([np.ones(len(X)), X])


def mlr_oracle(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Test oracle: ``[intercept, slopes...]`` through the Moore-Penrose pseudo-inverse.

    Works on the raw columns, with none of the scaling or level dropping
    that :func:`storebaseline.models.fit` applies.
    """
    X = np.asarray(X, dtype=float)
    return np.linalg.pinv(with_intercept(X)) @ np.asarray(y, dtype=float)
