"""Frechet distance between two embedded image sets.

    d^2 = ||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a S_b)^{1/2})

The matrix square root is taken through the symmetric form
sqrt(S_a) S_b sqrt(S_a): eigendecomposition with negative eigenvalues
clamped to zero and the product symmetrized, which keeps the result real
and the distance nonnegative for near-singular covariances.
"""
from __future__ import annotations

import numpy as np

from ..errors import DimensionError, ParameterError


def _validate(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    if a.shape[1] != b.shape[1]:
        raise DimensionError(
            f"feature dims disagree: {a.shape[1]} vs {b.shape[1]}"
        )
    if a.shape[0] < 2 or b.shape[0] < 2:
        raise ParameterError("covariance-based metrics need at least 2 samples per set")
    return a, b


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    sym = (mat + mat.T) / 2.0
    vals, vecs = np.linalg.eigh(sym)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def fid(a: np.ndarray, b: np.ndarray) -> float:
    """Frechet distance between feature sets a (N,d) and b (M,d)."""
    a, b = _validate(a, b)
    mu_a, mu_b = a.mean(axis=0), b.mean(axis=0)
    cov_a = np.cov(a, rowvar=False).reshape(a.shape[1], a.shape[1])
    cov_b = np.cov(b, rowvar=False).reshape(b.shape[1], b.shape[1])

    root_a = _psd_sqrt(cov_a)
    cross = _psd_sqrt(root_a @ cov_b @ root_a)
    mean_term = float(np.sum((mu_a - mu_b) ** 2))
    trace_term = float(np.trace(cov_a) + np.trace(cov_b) - 2.0 * np.trace(cross))
    total = mean_term + trace_term
    # the distance is nonnegative; eigensolver rounding can leave a tiny
    # negative residue on identical sets
    return 0.0 if -1e-6 < total < 0.0 else total
