"""Perceptual distance aggregated over multiple extractor layers.

For each tapped layer the feature maps are unit-normalized along the
channel axis; the squared channel distance is averaged over space and the
per-layer terms summed. Zero iff the tapped features agree. The layer set
is whatever the configured extractor exposes through `taps`.
"""
from __future__ import annotations

from typing import Optional

import numpy as np
import torch
from torch import nn

from ..errors import DimensionError
from ..fen import build_fen

_EPS = 1e-10

_default_fen: Optional[nn.Module] = None


def _get_fen(fen: Optional[nn.Module]) -> nn.Module:
    global _default_fen
    if fen is not None:
        return fen
    if _default_fen is None:
        _default_fen = build_fen("tiny")
    return _default_fen


def _unit_normalize(fmap: torch.Tensor) -> torch.Tensor:
    norm = torch.sqrt((fmap**2).sum(dim=1, keepdim=True) + _EPS)
    return fmap / norm


def lpips(x: np.ndarray, y: np.ndarray, fen: Optional[nn.Module] = None) -> float:
    """Perceptual distance between two [-1, 1] grayscale images."""
    x = np.asarray(x, dtype=np.float32)
    y = np.asarray(y, dtype=np.float32)
    if x.shape != y.shape:
        raise DimensionError(f"image shapes disagree: {x.shape} vs {y.shape}")
    if x.ndim != 2:
        raise DimensionError(f"expected 2-D images, got shape {x.shape}")
    extractor = _get_fen(fen)
    with torch.no_grad():
        tx = torch.from_numpy(x)[None, None]
        ty = torch.from_numpy(y)[None, None]
        total = 0.0
        for fa, fb in zip(extractor.taps(tx), extractor.taps(ty)):
            diff = _unit_normalize(fa) - _unit_normalize(fb)
            total += float((diff**2).sum(dim=1).mean())
    return total
