"""Evaluation metrics with oracle-checkable contracts."""
from .dice import dice, dice_per_class
from .embed import FeatureSet, embed_images
from .fid import fid
from .kid import kid, kid_x100, polynomial_kernel
from .lpips import lpips
from .msssim import max_scales, ms_ssim
from .report import CSV_COLUMNS, MetricReport, evaluate_dirs

__all__ = [
    "CSV_COLUMNS",
    "FeatureSet",
    "MetricReport",
    "dice",
    "dice_per_class",
    "embed_images",
    "evaluate_dirs",
    "fid",
    "kid",
    "kid_x100",
    "lpips",
    "max_scales",
    "ms_ssim",
    "polynomial_kernel",
]
