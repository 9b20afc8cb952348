"""Edge-sketch extraction from grayscale images.

The detector is gradient based and runs on float images directly, so its
output is invariant to constant intensity offsets. Default thresholds are
picked per image: high = Otsu threshold of the smoothed gradient
magnitude, low = 0.5 * high.
"""
from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.ndimage import gaussian_filter, sobel
from skimage.feature import canny
from skimage.filters import threshold_otsu

from ..errors import ParameterError
from .types import EdgeSketch, validate_image

DEFAULT_SIGMA = 1.0


def gradient_magnitude(image: np.ndarray, sigma: float = DEFAULT_SIGMA) -> np.ndarray:
    """Gaussian-smoothed Sobel gradient magnitude of a 2-D image."""
    smoothed = gaussian_filter(np.asarray(image, dtype=np.float64), sigma)
    gx = sobel(smoothed, axis=1)
    gy = sobel(smoothed, axis=0)
    return np.hypot(gx, gy)


def default_thresholds(image: np.ndarray, sigma: float = DEFAULT_SIGMA) -> tuple[float, float]:
    """Otsu-based (low, high) hysteresis thresholds for `extract_sketch`."""
    mag = gradient_magnitude(image, sigma)
    if mag.size == 0 or mag.max() <= mag.min():
        # flat gradient field: no threshold separates anything
        return 0.0, 0.0
    high = float(threshold_otsu(mag))
    return 0.5 * high, high


def extract_sketch(
    image: np.ndarray,
    low: Optional[float] = None,
    high: Optional[float] = None,
    sigma: float = DEFAULT_SIGMA,
) -> EdgeSketch:
    """Extract the binary background-edge sketch of a grayscale image.

    Parameters
    ----------
    image : (H, W) float array with finite values in [-1, 1]
    low, high : hysteresis thresholds; both default to the Otsu rule.
        Passing only one of the two is rejected.
    sigma : Gaussian smoothing width of the underlying detector.

    Returns
    -------
    EdgeSketch with the thresholds actually used recorded on it.
    """
    arr = validate_image(image).astype(np.float64)
    if (low is None) != (high is None):
        raise ParameterError("pass both thresholds or neither")
    if low is None:
        low, high = default_thresholds(arr, sigma)
    low = float(low)
    high = float(high)
    if low < 0 or low > high:
        raise ParameterError(f"need 0 <= low <= high, got low={low} high={high}")
    if high == 0.0:
        edges = np.zeros(arr.shape, dtype=bool)
    else:
        edges = canny(arr, sigma=sigma, low_threshold=low, high_threshold=high)
    return EdgeSketch(edges.astype(np.uint8), canny_low=low, canny_high=high)
