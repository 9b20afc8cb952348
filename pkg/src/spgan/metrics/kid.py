"""Unbiased kernel distance between embedded image sets.

Squared MMD with the cubic polynomial kernel k(x, y) = (x.y / d + 1)^3,
using the unbiased estimator (diagonal terms excluded from the
within-set sums). Reported x100 in tables.
"""
from __future__ import annotations

import numpy as np

from ..errors import DimensionError, ParameterError


def polynomial_kernel(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape[1] != y.shape[1]:
        raise DimensionError(f"feature dims disagree: {x.shape[1]} vs {y.shape[1]}")
    return (x @ y.T / x.shape[1] + 1.0) ** 3


def kid(a: np.ndarray, b: np.ndarray) -> float:
    """Unbiased squared MMD between feature sets a (m,d) and b (n,d)."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    m, n = a.shape[0], b.shape[0]
    if m < 2 or n < 2:
        raise ParameterError("the unbiased estimator needs at least 2 samples per set")
    k_aa = polynomial_kernel(a, a)
    k_bb = polynomial_kernel(b, b)
    k_ab = polynomial_kernel(a, b)
    sum_aa = float(k_aa.sum() - np.trace(k_aa))
    sum_bb = float(k_bb.sum() - np.trace(k_bb))
    return (
        sum_aa / (m * (m - 1))
        + sum_bb / (n * (n - 1))
        - 2.0 * float(k_ab.mean())
    )


def kid_x100(a: np.ndarray, b: np.ndarray) -> float:
    return 100.0 * kid(a, b)
