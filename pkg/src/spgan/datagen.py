"""Seeded synthetic phantoms: label map + speckled grayscale image pairs.

These stand in for clinical scans so training and evaluation can run at
desk scale. Each phantom places random elliptical structures over a
speckle-textured background with a depth attenuation gradient. This is a
texture generator, not a physics simulation: the point is that classes
have distinct mean intensities and the background carries enough grain
for the edge detector to find structure.

Everything is driven by integer seeds through `numpy.random.default_rng`,
so a spec maps to a bit-identical pair on every run and platform.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterator, Union

import numpy as np
from scipy.ndimage import gaussian_filter

from .errors import DataError, FormatError, ParameterError
from .labelkit import LabelMap, load_image, load_label, save_image, save_label
from .labelkit.types import LABEL_DTYPE

PathLike = Union[str, Path]

MAX_STRUCTURES = 4
DEFAULT_CONTRAST = (0.30, -0.18, 0.45, -0.30)

MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class PhantomSpec:
    """Parameters pinning down one phantom exactly."""

    seed: int = 0
    resolution: int = 128
    num_structures: int = 2
    contrast: tuple[float, ...] = DEFAULT_CONTRAST
    background_level: float = 0.35
    speckle_sigma: float = 0.22
    grain: float = 1.2
    attenuation: float = 0.10

    def __post_init__(self) -> None:
        if self.resolution <= 0 or self.resolution % 64 != 0:
            raise ParameterError(
                f"resolution must be a positive multiple of 64, got {self.resolution}"
            )
        if not 0 <= self.num_structures <= MAX_STRUCTURES:
            raise ParameterError(
                f"num_structures must be in 0..{MAX_STRUCTURES}, got {self.num_structures}"
            )
        if len(self.contrast) < self.num_structures:
            raise ParameterError(
                f"{self.num_structures} structures need {self.num_structures} "
                f"contrast entries, got {len(self.contrast)}"
            )

    @property
    def class_names(self) -> tuple[str, ...]:
        # a label map always declares at least one structure class, even
        # if no pixel carries it (num_structures=0 phantoms)
        return ("background",) + tuple(
            f"structure_{i + 1}" for i in range(max(1, self.num_structures))
        )


def _ellipse_mask(res: int, rng: np.random.Generator) -> np.ndarray:
    cy, cx = rng.uniform(0.25 * res, 0.75 * res, size=2)
    a = rng.uniform(0.08 * res, 0.26 * res)
    b = rng.uniform(0.08 * res, 0.26 * res)
    theta = rng.uniform(0.0, np.pi)
    yy, xx = np.mgrid[0:res, 0:res]
    u = (xx - cx) * np.cos(theta) + (yy - cy) * np.sin(theta)
    v = -(xx - cx) * np.sin(theta) + (yy - cy) * np.cos(theta)
    return (u / a) ** 2 + (v / b) ** 2 <= 1.0


def generate_phantom(spec: PhantomSpec) -> tuple[LabelMap, np.ndarray]:
    """Render one (label, image) pair; image is float32 in [-1, 1]."""
    res = spec.resolution
    rng = np.random.default_rng(spec.seed)

    grid = np.zeros((res, res), dtype=LABEL_DTYPE)
    for i in range(spec.num_structures):
        grid[_ellipse_mask(res, rng)] = i + 1  # painter's order: later class wins
    label = LabelMap(grid, spec.class_names)

    intensity = np.full((res, res), spec.background_level, dtype=np.float64)
    for i in range(spec.num_structures):
        intensity[grid == i + 1] = spec.background_level + spec.contrast[i]
    depth = np.linspace(0.0, 1.0, res)[:, None]
    intensity = intensity * (1.0 - spec.attenuation * depth)

    noise = rng.standard_normal((res, res))
    noise = gaussian_filter(noise, spec.grain)
    noise /= max(noise.std(), 1e-12)
    speckle = 1.0 + spec.speckle_sigma * noise

    image = np.clip(2.0 * np.clip(intensity * speckle, 0.0, 1.0) - 1.0, -1.0, 1.0)
    return label, image.astype(np.float32)


def generate_corpus(n: int, base_spec: PhantomSpec, out_dir: PathLike) -> dict:
    """Write n phantom pairs (seeds base..base+n-1) plus a manifest.

    Layout: images/phantom_NNNN.png, labels/phantom_NNNN.png (+ .json
    sidecars), manifest.json. Re-running with the same arguments yields a
    byte-identical corpus.
    """
    if n < 1:
        raise ParameterError(f"corpus size must be >= 1, got {n}")
    out = Path(out_dir)
    entries = []
    for i in range(n):
        spec = replace(base_spec, seed=base_spec.seed + i)
        label, image = generate_phantom(spec)
        name = f"phantom_{i:04d}.png"
        save_label(label, out / "labels" / name)
        save_image(image, out / "images" / name)
        entries.append(
            {
                "id": f"phantom_{i:04d}",
                "seed": spec.seed,
                "label": f"labels/{name}",
                "image": f"images/{name}",
            }
        )
    manifest = {
        "resolution": base_spec.resolution,
        "num_structures": base_spec.num_structures,
        "class_names": list(base_spec.class_names),
        "base_seed": base_spec.seed,
        "count": n,
        "spec": {
            "contrast": list(base_spec.contrast[: base_spec.num_structures]),
            "background_level": base_spec.background_level,
            "speckle_sigma": base_spec.speckle_sigma,
            "grain": base_spec.grain,
            "attenuation": base_spec.attenuation,
        },
        "entries": entries,
    }
    (out / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def load_manifest(corpus_dir: PathLike) -> dict:
    path = Path(corpus_dir) / MANIFEST_NAME
    try:
        manifest = json.loads(path.read_text())
    except OSError as exc:
        raise DataError(f"no corpus manifest at {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed corpus manifest {path}: {exc}") from exc
    if not manifest.get("entries"):
        raise DataError(f"corpus at {corpus_dir} lists no entries")
    return manifest


def iter_pairs(corpus_dir: PathLike) -> Iterator[tuple[LabelMap, np.ndarray, dict]]:
    """Yield (label, image, manifest entry) for every phantom in a corpus."""
    root = Path(corpus_dir)
    manifest = load_manifest(root)
    for entry in manifest["entries"]:
        label = load_label(root / entry["label"])
        image = load_image(root / entry["image"])
        yield label, image, entry
