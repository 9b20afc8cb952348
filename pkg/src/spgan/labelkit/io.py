"""Persistence: grids as single-channel 8-bit PNG plus a JSON sidecar.

The PNG carries raw class indices (or {0,1} for sketches); the sidecar
`<name>.json` records what the indices mean. Round trips are bit-exact.
Images in [-1, 1] are quantized to uint8 with a fixed affine map shared
by every interface, so identical inputs produce identical bytes.
"""
from __future__ import annotations

import io
import json
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..errors import FormatError
from .types import LABEL_DTYPE, CompositeLabel, EdgeSketch, LabelMap

PathLike = Union[str, Path]


def encode_png(grid: np.ndarray) -> bytes:
    """Canonical PNG bytes of a uint8 grid (single channel, no extras)."""
    buf = io.BytesIO()
    Image.fromarray(np.asarray(grid, dtype=np.uint8), mode="L").save(buf, format="PNG")
    return buf.getvalue()


def decode_png(data: bytes) -> np.ndarray:
    """Read a PNG byte string into a uint8 grid; reject anything malformed."""
    try:
        with Image.open(io.BytesIO(data)) as img:
            img.load()
            if img.mode != "L":
                img = img.convert("L")
            return np.asarray(img, dtype=np.uint8)
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise FormatError(f"not a readable PNG: {exc}") from exc


def image_to_uint8(image: np.ndarray) -> np.ndarray:
    """Quantize a [-1, 1] image to uint8 levels."""
    arr = np.asarray(image, dtype=np.float64)
    return np.clip(np.rint((arr + 1.0) * 127.5), 0, 255).astype(np.uint8)


def uint8_to_image(grid: np.ndarray) -> np.ndarray:
    """Inverse of `image_to_uint8` up to quantization."""
    return (np.asarray(grid, dtype=np.float32) / 127.5 - 1.0).astype(np.float32)


def _write(path: Path, png: bytes, manifest: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(png)
    path.with_suffix(".json").write_text(json.dumps(manifest, indent=2) + "\n")


def _read(path: Path) -> tuple[np.ndarray, dict]:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    grid = decode_png(data)
    sidecar = path.with_suffix(".json")
    try:
        manifest = json.loads(sidecar.read_text())
    except OSError as exc:
        raise FormatError(f"missing sidecar manifest {sidecar}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed manifest {sidecar}: {exc}") from exc
    return grid, manifest


def _manifest_field(manifest: dict, key: str, path: PathLike):
    if key not in manifest:
        raise FormatError(f"manifest for {path} lacks required field {key!r}")
    return manifest[key]


def save_label(label: LabelMap, path: PathLike) -> None:
    manifest = {"kind": "label", "class_names": list(label.class_names)}
    _write(Path(path), encode_png(label.grid), manifest)


def load_label(path: PathLike) -> LabelMap:
    grid, manifest = _read(Path(path))
    if _manifest_field(manifest, "kind", path) != "label":
        raise FormatError(f"{path} is a {manifest['kind']!r} file, expected a label")
    names = tuple(_manifest_field(manifest, "class_names", path))
    if grid.max(initial=0) >= len(names):
        raise FormatError(
            f"{path} holds class index {int(grid.max())} "
            f"but declares only {len(names)} classes"
        )
    return LabelMap(grid.astype(LABEL_DTYPE), names)


def save_sketch(sketch: EdgeSketch, path: PathLike) -> None:
    manifest = {
        "kind": "sketch",
        "canny_low": sketch.canny_low,
        "canny_high": sketch.canny_high,
    }
    _write(Path(path), encode_png(sketch.grid), manifest)


def load_sketch(path: PathLike) -> EdgeSketch:
    grid, manifest = _read(Path(path))
    if _manifest_field(manifest, "kind", path) != "sketch":
        raise FormatError(f"{path} is a {manifest['kind']!r} file, expected a sketch")
    if not np.isin(grid, (0, 1)).all():
        raise FormatError(f"{path} holds non-binary sketch values")
    return EdgeSketch(
        grid.astype(LABEL_DTYPE),
        canny_low=float(_manifest_field(manifest, "canny_low", path)),
        canny_high=float(_manifest_field(manifest, "canny_high", path)),
    )


def save_composite(comp: CompositeLabel, path: PathLike) -> None:
    manifest = {"kind": "composite", "class_names": list(comp.class_names)}
    _write(Path(path), encode_png(comp.grid), manifest)


def load_composite(path: PathLike) -> CompositeLabel:
    grid, manifest = _read(Path(path))
    if _manifest_field(manifest, "kind", path) != "composite":
        raise FormatError(f"{path} is a {manifest['kind']!r} file, expected a composite")
    names = tuple(_manifest_field(manifest, "class_names", path))
    if grid.max(initial=0) > len(names):
        raise FormatError(
            f"{path} holds index {int(grid.max())} above the sketch index {len(names)}"
        )
    return CompositeLabel(grid.astype(LABEL_DTYPE), names)


def save_image(image: np.ndarray, path: PathLike) -> None:
    """Store a [-1, 1] image as quantized 8-bit PNG (no sidecar)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_png(image_to_uint8(image)))


def load_image(path: PathLike) -> np.ndarray:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    return uint8_to_image(decode_png(data))
