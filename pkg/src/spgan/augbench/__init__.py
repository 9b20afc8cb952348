"""Augmentation benchmark: baseline vs traditional vs traditional+GAN."""
from .experiment import SegRunReport, run_seg_experiment, split_corpus
from .policy import (
    GAN_EDITS,
    MODES,
    TRAD_OPS,
    AugPolicy,
    fires,
    gan_augment,
    traditional_augment,
)
from .unet import SmallUNet

__all__ = [
    "AugPolicy",
    "GAN_EDITS",
    "MODES",
    "SegRunReport",
    "SmallUNet",
    "TRAD_OPS",
    "fires",
    "gan_augment",
    "run_seg_experiment",
    "split_corpus",
    "traditional_augment",
]
