"""Building blocks: conv/residual blocks and the two-branch fade-in units.

A fade-in unit mixes a freshly added convolutional path (main) with a
resize-only skip path (side) as out = alpha * main + (1 - alpha) * side.
At alpha = 0 the unit is a pure average-pool (down) or bilinear resize
(up), which is what makes progressive growth start from the behavior of
the already-trained backbone.
"""
from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn.functional as F
from torch import Tensor, nn

from ..errors import DimensionError, ParameterError


@dataclass
class FadeInState:
    """Fade-in weight of one module, ramped by the trainer."""

    alpha: float = 0.0
    alpha_max: float = 1.0
    step: float = 1.0 / 50.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha_max <= 1.0:
            raise ParameterError(f"alpha_max must be in [0, 1], got {self.alpha_max}")
        self._check(self.alpha)

    def _check(self, alpha: float) -> None:
        if not 0.0 <= alpha <= self.alpha_max + 1e-12:
            raise ParameterError(
                f"alpha must stay in [0, {self.alpha_max}], got {alpha}"
            )

    def set_progress(self, steps_taken: int) -> float:
        """alpha after `steps_taken` ramp steps: min(k * step, alpha_max)."""
        self.alpha = min(steps_taken * self.step, self.alpha_max)
        return self.alpha


def fib_blend(main: Tensor, side: Tensor, alpha: float) -> Tensor:
    """Weighted sum of the two fade-in branches."""
    if main.shape != side.shape:
        raise DimensionError(
            f"fade-in branches disagree: main {tuple(main.shape)} vs side {tuple(side.shape)}"
        )
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError(f"alpha must be in [0, 1], got {alpha}")
    return alpha * main + (1.0 - alpha) * side


def avg_pool_half(x: Tensor) -> Tensor:
    """Halve H and W by 2x2 average pooling; spatial size must be even."""
    if x.shape[-1] % 2 or x.shape[-2] % 2:
        raise DimensionError(f"cannot halve odd spatial size {tuple(x.shape[-2:])}")
    return F.avg_pool2d(x, kernel_size=2)


def bilinear_double(x: Tensor) -> Tensor:
    """Double H and W by bilinear interpolation."""
    return F.interpolate(x, scale_factor=2, mode="bilinear", align_corners=False)


def conv_block(channels: int) -> nn.Sequential:
    """Two 3x3 convolutions with instance norm, the main-branch block."""
    return nn.Sequential(
        nn.Conv2d(channels, channels, 3, padding=1),
        nn.InstanceNorm2d(channels),
        nn.ReLU(inplace=True),
        nn.Conv2d(channels, channels, 3, padding=1),
        nn.InstanceNorm2d(channels),
        nn.ReLU(inplace=True),
    )


class FibDown(nn.Module):
    """Channel-preserving fade-in block that halves resolution."""

    def __init__(self, channels: int):
        super().__init__()
        self.main = conv_block(channels)

    def forward(self, x: Tensor, alpha: float) -> Tensor:
        return fib_blend(avg_pool_half(self.main(x)), avg_pool_half(x), alpha)


class FibUp(nn.Module):
    """Channel-preserving fade-in block that doubles resolution."""

    def __init__(self, channels: int):
        super().__init__()
        self.main = conv_block(channels)

    def forward(self, x: Tensor, alpha: float) -> Tensor:
        up = bilinear_double(x)
        return fib_blend(self.main(up), up, alpha)


class ResidualBlock(nn.Module):
    """conv-IN-ReLU-conv-IN with identity skip, stride 1 throughout."""

    def __init__(self, channels: int):
        super().__init__()
        self.body = nn.Sequential(
            nn.Conv2d(channels, channels, 3, padding=1),
            nn.InstanceNorm2d(channels),
            nn.ReLU(inplace=True),
            nn.Conv2d(channels, channels, 3, padding=1),
            nn.InstanceNorm2d(channels),
        )

    def forward(self, x: Tensor) -> Tensor:
        return x + self.body(x)


def down_block(in_ch: int, out_ch: int) -> nn.Sequential:
    """Stride-2 conv + IN + ReLU."""
    return nn.Sequential(
        nn.Conv2d(in_ch, out_ch, 3, stride=2, padding=1),
        nn.InstanceNorm2d(out_ch),
        nn.ReLU(inplace=True),
    )


def up_block(in_ch: int, out_ch: int) -> nn.Sequential:
    """Stride-2 deconv + IN + ReLU."""
    return nn.Sequential(
        nn.ConvTranspose2d(in_ch, out_ch, 3, stride=2, padding=1, output_padding=1),
        nn.InstanceNorm2d(out_ch),
        nn.ReLU(inplace=True),
    )


def init_fresh(module: nn.Module, gain: float = 0.02) -> nn.Module:
    """Small-variance normal init for layers added at growth time."""
    for m in module.modules():
        if isinstance(m, (nn.Conv2d, nn.ConvTranspose2d)):
            nn.init.normal_(m.weight, 0.0, gain)
            if m.bias is not None:
                nn.init.zeros_(m.bias)
    return module
