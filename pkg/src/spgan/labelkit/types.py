"""Core grid types: label maps, edge sketches, structure masks, composites.

Conventions used throughout:
  * grids are 2-D numpy arrays indexed [row, col] (H x W)
  * label grids hold uint8 class indices, 0 = background
  * sketches and masks are uint8 arrays restricted to {0, 1}
  * images are float32 arrays in [-1, 1]
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import DimensionError, ParameterError

LABEL_DTYPE = np.uint8


def _as_grid(grid: np.ndarray, name: str) -> np.ndarray:
    arr = np.asarray(grid)
    if arr.ndim != 2:
        raise DimensionError(f"{name} grid must be 2-D, got shape {arr.shape}")
    return arr


def _check_binary(grid: np.ndarray, name: str) -> np.ndarray:
    arr = _as_grid(grid, name)
    if not np.isin(arr, (0, 1)).all():
        raise ParameterError(f"{name} grid must be strictly binary")
    return arr.astype(LABEL_DTYPE)


@dataclass(eq=False)
class LabelMap:
    """Integer class-index grid over C classes; index 0 is background."""

    grid: np.ndarray
    class_names: tuple[str, ...]

    def __post_init__(self) -> None:
        self.grid = _as_grid(self.grid, "label").astype(LABEL_DTYPE)
        self.class_names = tuple(self.class_names)
        if len(self.class_names) < 2:
            raise ParameterError(
                "a LabelMap needs background plus at least one structure class"
            )
        if self.grid.size and int(self.grid.max()) >= self.num_classes:
            raise ParameterError(
                f"label grid holds index {int(self.grid.max())} "
                f"but only {self.num_classes} classes are declared"
            )

    @property
    def num_classes(self) -> int:
        return len(self.class_names)

    @property
    def height(self) -> int:
        return self.grid.shape[0]

    @property
    def width(self) -> int:
        return self.grid.shape[1]

    def copy(self) -> "LabelMap":
        return LabelMap(self.grid.copy(), self.class_names)


@dataclass(eq=False)
class EdgeSketch:
    """Binary background-edge grid plus the thresholds that produced it."""

    grid: np.ndarray
    canny_low: float = 0.0
    canny_high: float = 0.0

    def __post_init__(self) -> None:
        self.grid = _check_binary(self.grid, "sketch")
        if self.canny_low < 0 or self.canny_low > self.canny_high:
            raise ParameterError(
                f"need 0 <= low <= high, got low={self.canny_low} high={self.canny_high}"
            )

    @property
    def height(self) -> int:
        return self.grid.shape[0]

    @property
    def width(self) -> int:
        return self.grid.shape[1]

    def copy(self) -> "EdgeSketch":
        return EdgeSketch(self.grid.copy(), self.canny_low, self.canny_high)


@dataclass(eq=False)
class StructureMask:
    """Binary indicator of annotated structure area."""

    grid: np.ndarray

    def __post_init__(self) -> None:
        self.grid = _check_binary(self.grid, "mask")


@dataclass(eq=False)
class CompositeLabel:
    """Label grid with the edge sketch painted into background as class C.

    Values run 0..C where C == len(class_names) is the dedicated sketch
    index; structure pixels keep their original class index.
    """

    grid: np.ndarray
    class_names: tuple[str, ...]
    source_label: Optional[LabelMap] = field(default=None, repr=False)
    source_sketch: Optional[EdgeSketch] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.grid = _as_grid(self.grid, "composite").astype(LABEL_DTYPE)
        self.class_names = tuple(self.class_names)
        if len(self.class_names) < 2:
            raise ParameterError("composite needs at least two structure classes")
        if self.grid.size and int(self.grid.max()) > self.sketch_index:
            raise ParameterError(
                f"composite grid holds index {int(self.grid.max())} "
                f"above the sketch index {self.sketch_index}"
            )

    @property
    def sketch_index(self) -> int:
        return len(self.class_names)

    @property
    def num_planes(self) -> int:
        """One-hot depth: C structure/background classes plus the sketch."""
        return len(self.class_names) + 1

    @property
    def height(self) -> int:
        return self.grid.shape[0]

    @property
    def width(self) -> int:
        return self.grid.shape[1]


def check_same_shape(*grids: np.ndarray) -> tuple[int, int]:
    shapes = {g.shape for g in grids}
    if len(shapes) != 1:
        raise DimensionError(f"grids disagree on shape: {sorted(shapes)}")
    return grids[0].shape


def validate_image(image: np.ndarray, name: str = "image") -> np.ndarray:
    """Check an image array is 2-D, finite and inside [-1, 1]."""
    arr = np.asarray(image, dtype=np.float32)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ParameterError(f"{name} contains non-finite pixels")
    if arr.size and (arr.min() < -1.0 - 1e-5 or arr.max() > 1.0 + 1e-5):
        raise ParameterError(f"{name} values must lie in [-1, 1]")
    return arr
