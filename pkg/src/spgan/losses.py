"""Training objectives: adversarial terms, L1, and the feature loss.

Patch scores are raw logits; probabilities appear only inside clamped
log-sigmoid terms so every loss stays finite for any finite input. The
generator objective is

    L_G = E[log(1 - D(x, G(x)))] + lambda1 * L1 + lambda2 * L_F

and the discriminator maximizes E[log D(x,y)] + E[log(1 - D(x,G(x)))]
(the trainer minimizes its negation). The feature loss compares
per-channel mean and variance of deep features of real vs generated
images, each reduced with an L1 norm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import torch
import torch.nn.functional as F
from torch import Tensor, nn

from .errors import ConfigurationError, DimensionError, ParameterError

PROB_EPS = 1e-7
_LOG_MIN = math.log(PROB_EPS)
_LOG_MAX = math.log1p(-PROB_EPS)


@dataclass(frozen=True)
class LossWeights:
    lambda1: float = 1.0
    lambda2: float = 0.0

    def __post_init__(self) -> None:
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ParameterError("loss weights must be nonnegative")


def _log_prob_real(scores: Tensor) -> Tensor:
    """log sigma(s), with sigma clamped to [eps, 1-eps]."""
    return torch.clamp(F.logsigmoid(scores), min=_LOG_MIN, max=_LOG_MAX)


def _log_prob_fake(scores: Tensor) -> Tensor:
    """log(1 - sigma(s)) = log sigma(-s), same clamping."""
    return torch.clamp(F.logsigmoid(-scores), min=_LOG_MIN, max=_LOG_MAX)


def loss_g_adv(scores_fake: Tensor) -> Tensor:
    """Generator adversarial term: mean over patch units of log(1 - D)."""
    return _log_prob_fake(scores_fake).mean()


def loss_d(scores_real: Tensor, scores_fake: Tensor) -> Tensor:
    """Discriminator objective, to be maximized (0 at the optimum)."""
    return _log_prob_real(scores_real).mean() + _log_prob_fake(scores_fake).mean()


def loss_l1(y: Tensor, g: Tensor) -> Tensor:
    """Mean absolute difference between target and generated images."""
    if y.shape != g.shape:
        raise DimensionError(f"L1 inputs disagree: {tuple(y.shape)} vs {tuple(g.shape)}")
    return (y - g).abs().mean()


@dataclass
class FeatureStats:
    """Per-channel spatial mean and (population) variance, per batch item."""

    mean: Tensor  # (B, C)
    var: Tensor  # (B, C)


def feature_stats(img: Tensor, fen: nn.Module) -> FeatureStats:
    """Channel statistics of the deep feature map of an image batch."""
    if fen is None:
        raise ConfigurationError("no feature extractor configured")
    if img.ndim != 4:
        raise DimensionError(f"expected (B, 1, H, W) image, got {tuple(img.shape)}")
    fmap = fen.features(img)
    flat = fmap.flatten(2)
    return FeatureStats(mean=flat.mean(dim=2), var=flat.var(dim=2, unbiased=False))


def loss_feature(real: Tensor, fake: Tensor, fen: nn.Module) -> Tensor:
    """L1 distance between feature means plus feature variances."""
    if real.shape != fake.shape:
        raise DimensionError(
            f"feature-loss inputs disagree: {tuple(real.shape)} vs {tuple(fake.shape)}"
        )
    a = feature_stats(real, fen)
    b = feature_stats(fake, fen)
    per_item = (a.mean - b.mean).abs().sum(dim=1) + (a.var - b.var).abs().sum(dim=1)
    return per_item.mean()


def loss_g_total(adv: Tensor, l1: Tensor, feat: Tensor, weights: LossWeights) -> Tensor:
    """Weighted generator objective; lambda2 = 0 drops the feature term."""
    total = adv + weights.lambda1 * l1
    if weights.lambda2 != 0.0:
        total = total + weights.lambda2 * feat
    return total
