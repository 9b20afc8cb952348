"""Overlap score for segmentation masks: 2|A&B| / (|A| + |B|)."""
from __future__ import annotations

import numpy as np

from ..errors import DimensionError


def dice(pred: np.ndarray, gt: np.ndarray) -> float:
    """Binary-mask overlap; two empty masks count as a perfect match."""
    pred = np.asarray(pred).astype(bool)
    gt = np.asarray(gt).astype(bool)
    if pred.shape != gt.shape:
        raise DimensionError(f"mask shapes disagree: {pred.shape} vs {gt.shape}")
    total = int(pred.sum()) + int(gt.sum())
    if total == 0:
        return 1.0
    return 2.0 * int((pred & gt).sum()) / total


def dice_per_class(
    pred: np.ndarray, gt: np.ndarray, num_classes: int, include_background: bool = False
) -> dict[int, float]:
    """Per-class overlap between two label grids."""
    start = 0 if include_background else 1
    return {c: dice(pred == c, gt == c) for c in range(start, num_classes)}
