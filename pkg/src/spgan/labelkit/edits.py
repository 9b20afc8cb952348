"""Editing operations over label maps and edge sketches.

All edits are pure: they return a new object and leave pixels outside the
affected region untouched. Coordinates are (row, col); anything falling
outside the frame is clamped or dropped, never an error. When structures
end up overlapping, the class painted last wins.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from PIL import Image, ImageDraw
from scipy import ndimage

from ..errors import ParameterError
from .types import LABEL_DTYPE, EdgeSketch, LabelMap

LABEL_KINDS = ("translate", "scale", "dilate", "erode", "add_region", "remove_region")
SKETCH_KINDS = ("translate", "scale", "draw_sketch", "erase_sketch")
ALL_KINDS = tuple(dict.fromkeys(LABEL_KINDS + SKETCH_KINDS))


@dataclass(frozen=True)
class EditOp:
    """One editing action; which fields matter depends on `kind`.

    translate      target_class (labels), offset=(dy, dx)
    scale          target_class (labels), factor about the region centroid
    dilate/erode   target_class, radius of a square structuring element
    add_region     target_class, points = polygon vertices (row, col)
    remove_region  target_class
    draw_sketch    points = stroke polyline, thickness
    erase_sketch   points = stroke polyline, thickness
    """

    kind: str
    target_class: Optional[int] = None
    offset: tuple[int, int] = (0, 0)
    factor: float = 1.0
    radius: int = 1
    points: tuple[tuple[int, int], ...] = field(default=())
    thickness: int = 1

    def __post_init__(self) -> None:
        if self.kind not in ALL_KINDS:
            raise ParameterError(
                f"unknown edit kind {self.kind!r}; valid kinds: {', '.join(ALL_KINDS)}"
            )


def _require_class(op: EditOp) -> int:
    if op.target_class is None or op.target_class <= 0:
        raise ParameterError(f"edit {op.kind!r} needs a structure class index > 0")
    return int(op.target_class)


def _shift_region(region: np.ndarray, dy: int, dx: int) -> np.ndarray:
    """Shift a binary region, dropping pixels pushed outside the frame."""
    out = np.zeros_like(region)
    h, w = region.shape
    ys, xs = np.nonzero(region)
    ys = ys + dy
    xs = xs + dx
    keep = (ys >= 0) & (ys < h) & (xs >= 0) & (xs < w)
    out[ys[keep], xs[keep]] = 1
    return out


def _zoom_region(region: np.ndarray, factor: float, center: tuple[float, float]) -> np.ndarray:
    """Nearest-neighbor zoom of a binary region about a fixed point."""
    h, w = region.shape
    cy, cx = center
    yy, xx = np.mgrid[0:h, 0:w]
    src_y = np.rint((yy - cy) / factor + cy).astype(np.int64)
    src_x = np.rint((xx - cx) / factor + cx).astype(np.int64)
    inside = (src_y >= 0) & (src_y < h) & (src_x >= 0) & (src_x < w)
    out = np.zeros_like(region)
    out[inside] = region[src_y[inside], src_x[inside]]
    return out


def _draw_stroke(shape: tuple[int, int], points: Sequence[tuple[int, int]], thickness: int) -> np.ndarray:
    """Rasterize a polyline (row, col) into a binary grid."""
    if len(points) == 0:
        return np.zeros(shape, dtype=LABEL_DTYPE)
    h, w = shape
    xy = [(min(max(int(c), 0), w - 1), min(max(int(r), 0), h - 1)) for r, c in points]
    img = Image.new("L", (w, h), 0)
    draw = ImageDraw.Draw(img)
    if len(xy) == 1:
        draw.point(xy, fill=1)
    else:
        draw.line(xy, fill=1, width=max(1, int(thickness)), joint="curve")
    return np.asarray(img, dtype=LABEL_DTYPE)


def _fill_polygon(shape: tuple[int, int], points: Sequence[tuple[int, int]]) -> np.ndarray:
    if len(points) < 3:
        raise ParameterError("add_region needs at least three polygon vertices")
    h, w = shape
    xy = [(min(max(int(c), 0), w - 1), min(max(int(r), 0), h - 1)) for r, c in points]
    img = Image.new("L", (w, h), 0)
    ImageDraw.Draw(img).polygon(xy, fill=1, outline=1)
    return np.asarray(img, dtype=LABEL_DTYPE)


def _edit_label(label: LabelMap, op: EditOp) -> LabelMap:
    grid = label.grid.copy()
    if op.kind == "remove_region":
        cls = _require_class(op)
        grid[grid == cls] = 0
        return LabelMap(grid, label.class_names)

    if op.kind == "add_region":
        cls = _require_class(op)
        if cls >= label.num_classes:
            raise ParameterError(
                f"class {cls} outside the declared {label.num_classes} classes"
            )
        region = _fill_polygon(grid.shape, op.points)
        grid[region == 1] = cls
        return LabelMap(grid, label.class_names)

    cls = _require_class(op)
    region = (grid == cls).astype(LABEL_DTYPE)
    if op.kind == "translate":
        dy, dx = int(op.offset[0]), int(op.offset[1])
        moved = _shift_region(region, dy, dx)
    elif op.kind == "scale":
        if op.factor <= 0:
            raise ParameterError(f"scale factor must be positive, got {op.factor}")
        if not region.any():
            return LabelMap(grid, label.class_names)
        cy, cx = ndimage.center_of_mass(region)
        moved = _zoom_region(region, float(op.factor), (cy, cx))
    elif op.kind == "dilate":
        if op.radius < 0:
            raise ParameterError("radius must be >= 0")
        se = np.ones((2 * op.radius + 1, 2 * op.radius + 1), dtype=bool)
        moved = ndimage.binary_dilation(region, structure=se).astype(LABEL_DTYPE)
    elif op.kind == "erode":
        if op.radius < 0:
            raise ParameterError("radius must be >= 0")
        se = np.ones((2 * op.radius + 1, 2 * op.radius + 1), dtype=bool)
        moved = ndimage.binary_erosion(region, structure=se).astype(LABEL_DTYPE)
    else:
        raise ParameterError(f"edit kind {op.kind!r} does not apply to a LabelMap")
    grid[region == 1] = 0
    grid[moved == 1] = cls
    return LabelMap(grid, label.class_names)


def _edit_sketch(sketch: EdgeSketch, op: EditOp) -> EdgeSketch:
    grid = sketch.grid.copy()
    if op.kind == "draw_sketch":
        stroke = _draw_stroke(grid.shape, op.points, op.thickness)
        grid[stroke == 1] = 1
    elif op.kind == "erase_sketch":
        stroke = _draw_stroke(grid.shape, op.points, op.thickness)
        grid[stroke == 1] = 0
    elif op.kind == "translate":
        dy, dx = int(op.offset[0]), int(op.offset[1])
        grid = _shift_region(grid, dy, dx)
    elif op.kind == "scale":
        if op.factor <= 0:
            raise ParameterError(f"scale factor must be positive, got {op.factor}")
        h, w = grid.shape
        grid = _zoom_region(grid, float(op.factor), ((h - 1) / 2.0, (w - 1) / 2.0))
    else:
        raise ParameterError(f"edit kind {op.kind!r} does not apply to an EdgeSketch")
    return EdgeSketch(grid, sketch.canny_low, sketch.canny_high)


def apply_edit(target: Union[LabelMap, EdgeSketch], op: EditOp) -> Union[LabelMap, EdgeSketch]:
    """Apply one EditOp, returning a new object of the same type."""
    if isinstance(target, LabelMap):
        return _edit_label(target, op)
    if isinstance(target, EdgeSketch):
        return _edit_sketch(target, op)
    raise ParameterError(f"cannot edit object of type {type(target).__name__}")
