"""Augmentation policies and the two augmentation branches.

Online augmentation fires with a fixed probability per draw. When it
fires, traditional mode picks one op uniformly (rotation, translation,
scaling, blur, gamma, additive noise); geometric ops hit image and label
identically, labels interpolated nearest-neighbor. The GAN branch edits
the label map with a random morphological operation, rebuilds the
composite (reusing the source sketch, transformed along with geometric
edits) and synthesizes a new image from the checkpoint.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
from scipy import ndimage

from ..errors import ConfigurationError, ParameterError
from ..labelkit import (
    EdgeSketch,
    EditOp,
    LabelMap,
    apply_edit,
    compose,
    make_structure_mask,
)
from ..netcore import CheckpointBundle
from ..trainer import synthesize

PathLike = Union[str, Path]

MODES = ("none", "trad", "trad_gan")
TRAD_OPS = ("rotate", "translate", "scale", "blur", "gamma", "noise")
GAN_EDITS = ("translate", "scale", "dilate", "erode")


@dataclass
class AugPolicy:
    mode: str = "none"
    probability: float = 0.3
    rotation_deg: float = 15.0
    translate_frac: float = 0.10
    scale_low: float = 0.9
    scale_high: float = 1.1
    blur_sigma_max: float = 1.5
    noise_sigma_max: float = 0.02
    gamma_low: float = 0.7
    gamma_high: float = 1.5
    edit_translate_px: int = 6
    edit_scale_low: float = 0.9
    edit_scale_high: float = 1.15
    edit_radius_max: int = 2
    checkpoint: Optional[str] = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ParameterError(f"unknown policy mode {self.mode!r}; valid: {MODES}")
        if not 0.0 <= self.probability <= 1.0:
            raise ParameterError(f"probability must be in [0, 1], got {self.probability}")
        if self.mode == "trad_gan" and not self.checkpoint:
            raise ConfigurationError("trad_gan mode needs a generator checkpoint")


def fires(policy: AugPolicy, rng: np.random.Generator) -> bool:
    """The Bernoulli gate every augmentation draw goes through."""
    if policy.mode == "none":
        return False
    return bool(rng.random() < policy.probability)


def apply_rotation(image, grid, angle_deg):
    img = ndimage.rotate(image, angle_deg, reshape=False, order=1, mode="nearest")
    lab = ndimage.rotate(grid, angle_deg, reshape=False, order=0, mode="nearest")
    return np.clip(img, -1.0, 1.0), lab


def apply_translation(image, grid, dy, dx):
    img = ndimage.shift(image, (dy, dx), order=1, mode="nearest")
    lab = ndimage.shift(grid, (dy, dx), order=0, mode="nearest")
    return np.clip(img, -1.0, 1.0), lab


def apply_scaling(image, grid, factor):
    h, w = image.shape
    center = np.array([(h - 1) / 2.0, (w - 1) / 2.0])
    matrix = np.diag([1.0 / factor, 1.0 / factor])
    offset = center - matrix @ center
    img = ndimage.affine_transform(image, matrix, offset=offset, order=1, mode="nearest")
    lab = ndimage.affine_transform(grid, matrix, offset=offset, order=0, mode="nearest")
    return np.clip(img, -1.0, 1.0), lab


def apply_gamma(image, gamma):
    pos = np.clip((image + 1.0) / 2.0, 0.0, 1.0)
    return (2.0 * pos**gamma - 1.0).astype(np.float32)


def traditional_augment(
    image: np.ndarray,
    label: LabelMap,
    rng: np.random.Generator,
    policy: AugPolicy,
) -> tuple[np.ndarray, LabelMap]:
    """With probability p, apply one randomly chosen traditional op."""
    if not fires(policy, rng):
        return image, label
    op = TRAD_OPS[rng.integers(len(TRAD_OPS))]
    grid = label.grid
    if op == "rotate":
        angle = rng.uniform(-policy.rotation_deg, policy.rotation_deg)
        image, grid = apply_rotation(image, grid, angle)
    elif op == "translate":
        h, w = image.shape
        dy = rng.uniform(-policy.translate_frac, policy.translate_frac) * h
        dx = rng.uniform(-policy.translate_frac, policy.translate_frac) * w
        image, grid = apply_translation(image, grid, dy, dx)
    elif op == "scale":
        factor = rng.uniform(policy.scale_low, policy.scale_high)
        image, grid = apply_scaling(image, grid, factor)
    elif op == "blur":
        sigma = rng.uniform(0.3, policy.blur_sigma_max)
        image = ndimage.gaussian_filter(image, sigma)
    elif op == "gamma":
        image = apply_gamma(image, rng.uniform(policy.gamma_low, policy.gamma_high))
    else:  # noise
        sigma = rng.uniform(0.0, policy.noise_sigma_max)
        image = np.clip(image + rng.normal(0.0, max(sigma, 1e-12), image.shape), -1, 1)
    return image.astype(np.float32), LabelMap(grid, label.class_names)


def _random_edit(label: LabelMap, policy: AugPolicy, rng: np.random.Generator) -> EditOp:
    present = sorted(int(c) for c in np.unique(label.grid) if c > 0)
    target = int(rng.choice(present)) if present else 1
    kind = GAN_EDITS[rng.integers(len(GAN_EDITS))]
    if kind == "translate":
        span = policy.edit_translate_px
        off = (int(rng.integers(-span, span + 1)), int(rng.integers(-span, span + 1)))
        return EditOp("translate", target_class=target, offset=off)
    if kind == "scale":
        return EditOp(
            "scale",
            target_class=target,
            factor=float(rng.uniform(policy.edit_scale_low, policy.edit_scale_high)),
        )
    radius = int(rng.integers(1, policy.edit_radius_max + 1)) if policy.edit_radius_max else 0
    return EditOp(kind, target_class=target, radius=radius)


def gan_augment(
    label: LabelMap,
    sketch: EdgeSketch,
    policy: AugPolicy,
    bundle: CheckpointBundle,
    rng: np.random.Generator,
) -> tuple[np.ndarray, LabelMap]:
    """Edit the label, mirror geometric edits onto the sketch, synthesize."""
    if len(label.class_names) != bundle.num_classes:
        raise ConfigurationError(
            f"checkpoint expects {bundle.num_classes} classes, "
            f"label declares {len(label.class_names)}"
        )
    # resample a few times so nonzero ranges actually change the label
    # (a draw can still land on the identity, e.g. translate by (0, 0))
    for _ in range(8):
        op = _random_edit(label, policy, rng)
        edited = apply_edit(label, op)
        if (edited.grid != label.grid).any():
            break
    if op.kind in ("translate", "scale"):
        sketch = apply_edit(sketch, op)
    comp = compose(edited, make_structure_mask(edited), sketch)
    image = synthesize(bundle, comp)
    return image, edited
