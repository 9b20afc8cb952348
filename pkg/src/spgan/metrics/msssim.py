"""Multi-scale structural similarity for paired grayscale images.

Standard construction: 11x11 Gaussian window (sigma 1.5), valid
convolution, contrast-structure terms over all scales, luminance only at
the coarsest, scale weights (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)
renormalized when fewer scales fit the image. Inputs in [-1, 1] are
mapped to [0, 1] so the usual stabilizers apply. Negative
contrast-structure responses are clamped at zero, keeping the score in
[0, 1].
"""
from __future__ import annotations

import numpy as np
from scipy.signal import convolve2d

from ..errors import DimensionError, ParameterError

WIN_SIZE = 11
WIN_SIGMA = 1.5
WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)
K1, K2 = 0.01, 0.03


def _gaussian_window(size: int = WIN_SIZE, sigma: float = WIN_SIGMA) -> np.ndarray:
    half = (size - 1) / 2.0
    coords = np.arange(size) - half
    g = np.exp(-0.5 * (coords / sigma) ** 2)
    kernel = np.outer(g, g)
    return kernel / kernel.sum()


def _ssim_terms(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """(luminance*cs mean, cs mean) of one scale, data range 1."""
    win = _gaussian_window()
    c1 = K1 * K1
    c2 = K2 * K2
    mu_x = convolve2d(x, win, mode="valid")
    mu_y = convolve2d(y, win, mode="valid")
    xx = convolve2d(x * x, win, mode="valid") - mu_x * mu_x
    yy = convolve2d(y * y, win, mode="valid") - mu_y * mu_y
    xy = convolve2d(x * y, win, mode="valid") - mu_x * mu_y
    lum = (2 * mu_x * mu_y + c1) / (mu_x**2 + mu_y**2 + c1)
    cs = (2 * xy + c2) / (xx + yy + c2)
    return float((lum * cs).mean()), float(cs.mean())


def _downsample(img: np.ndarray) -> np.ndarray:
    h, w = (img.shape[0] // 2) * 2, (img.shape[1] // 2) * 2
    img = img[:h, :w]
    return (img[0::2, 0::2] + img[1::2, 0::2] + img[0::2, 1::2] + img[1::2, 1::2]) / 4.0


def max_scales(shape: tuple[int, int], limit: int = len(WEIGHTS)) -> int:
    """Largest scale count the image supports (min side >= 11 * 2^(s-1))."""
    side = min(shape)
    s = 0
    while s < limit and side >= WIN_SIZE:
        s += 1
        side //= 2
    return s


def ms_ssim(x: np.ndarray, y: np.ndarray, scales: int = len(WEIGHTS)) -> float:
    """Multi-scale similarity of two [-1, 1] images, in [0, 1]."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise DimensionError(f"image shapes disagree: {x.shape} vs {y.shape}")
    if x.ndim != 2:
        raise DimensionError(f"expected 2-D images, got shape {x.shape}")
    if not 1 <= scales <= len(WEIGHTS):
        raise ParameterError(f"scales must be in 1..{len(WEIGHTS)}, got {scales}")
    if min(x.shape) < WIN_SIZE * 2 ** (scales - 1):
        raise ParameterError(
            f"min side {min(x.shape)} too small for {scales} scales "
            f"(needs {WIN_SIZE * 2 ** (scales - 1)})"
        )
    weights = np.asarray(WEIGHTS[:scales])
    weights = weights / weights.sum()

    x = (x + 1.0) / 2.0
    y = (y + 1.0) / 2.0
    score = 1.0
    for level in range(scales):
        ssim_mean, cs_mean = _ssim_terms(x, y)
        if level < scales - 1:
            score *= max(cs_mean, 0.0) ** weights[level]
            x, y = _downsample(x), _downsample(y)
        else:
            score *= max(ssim_mean, 0.0) ** weights[level]
    return float(min(max(score, 0.0), 1.0))
