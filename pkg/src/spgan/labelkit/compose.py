"""Composite-label construction and one-hot encoding.

A composite keeps annotated structures untouched and paints the edge
sketch into the remaining background as a dedicated extra class:

    composite = mask * label + (1 - mask) * sketch * C

with C the sketch index (= number of ordinary classes). The arithmetic is
pure integer elementwise work, no tolerances involved.
"""
from __future__ import annotations

import numpy as np

from ..errors import DimensionError, ParameterError
from .types import (
    LABEL_DTYPE,
    CompositeLabel,
    EdgeSketch,
    LabelMap,
    StructureMask,
    check_same_shape,
)


def make_structure_mask(label: LabelMap) -> StructureMask:
    """Binary indicator of all non-background pixels of a label map."""
    return StructureMask((label.grid > 0).astype(LABEL_DTYPE))


def compose(label: LabelMap, mask: StructureMask, sketch: EdgeSketch) -> CompositeLabel:
    """Superpose a background edge sketch onto a label map.

    Inside the mask the label wins; outside it sketch pixels map to the
    dedicated sketch index and everything else stays background.
    """
    check_same_shape(label.grid, mask.grid, sketch.grid)
    m = mask.grid.astype(np.int64)
    o = label.grid.astype(np.int64)
    s = sketch.grid.astype(np.int64)
    sketch_index = label.num_classes
    grid = m * o + (1 - m) * s * sketch_index
    return CompositeLabel(
        grid.astype(LABEL_DTYPE),
        label.class_names,
        source_label=label,
        source_sketch=sketch,
    )


def encode_onehot(comp: CompositeLabel) -> np.ndarray:
    """One-hot planes of a composite, shape (C+1, H, W) float32.

    Plane c is the indicator of grid == c; the last plane is the sketch.
    Every pixel column sums to exactly 1.
    """
    planes = np.zeros((comp.num_planes, comp.height, comp.width), dtype=np.float32)
    for c in range(comp.num_planes):
        planes[c] = comp.grid == c
    return planes


def decode_onehot(planes: np.ndarray, class_names: tuple[str, ...]) -> CompositeLabel:
    """Inverse of `encode_onehot`; rejects columns that are not one-hot."""
    arr = np.asarray(planes)
    if arr.ndim != 3:
        raise DimensionError(f"expected (C+1, H, W) planes, got shape {arr.shape}")
    if arr.shape[0] != len(class_names) + 1:
        raise ParameterError(
            f"{arr.shape[0]} planes do not match {len(class_names)} classes + sketch"
        )
    col_sums = arr.sum(axis=0)
    if not np.allclose(col_sums, 1.0):
        raise ParameterError("plane columns must sum to 1 at every pixel")
    return CompositeLabel(arr.argmax(axis=0).astype(LABEL_DTYPE), class_names)
