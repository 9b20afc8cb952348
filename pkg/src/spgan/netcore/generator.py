"""Encoder-residual-decoder generator with progressive growth.

Low stage: 1x1 stem -> 3 stride-2 down blocks -> n residual blocks ->
3 stride-2 up blocks -> 1x1 head -> tanh, producing images at the base
resolution. Growing to the high stage doubles input/output resolution by
wrapping the shared backbone between two fade-in units:

  input side   main: stem -> two 3x3 convs at 2R -> avg-pool
               side: avg-pool -> stem                (stem shared)
  output side  main: bilinear x2 -> two 3x3 convs -> fresh 1x1 -> tanh
               side: shared 1x1 head -> tanh -> bilinear x2

With alpha = 0 the grown network therefore reproduces the low-stage
network run on the pooled input, bit for bit, and its output stays a
convex combination of two tanh images, hence inside [-1, 1].
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import torch
from torch import Tensor, nn

from ..errors import DimensionError, ParameterError, StateError
from .blocks import (
    FadeInState,
    avg_pool_half,
    bilinear_double,
    conv_block,
    down_block,
    fib_blend,
    init_fresh,
    up_block,
    ResidualBlock,
)

STAGE_LOW = "low"
STAGE_HIGH = "high"

ALPHA_MAX_G = 0.5


@dataclass
class GeneratorConfig:
    input_planes: int
    num_residual_blocks: int = 2
    base_channels: int = 32
    base_resolution: int = 64
    stage: str = STAGE_LOW
    alpha_step: float = 1.0 / 50.0

    def __post_init__(self) -> None:
        if self.num_residual_blocks < 0:
            raise ParameterError("num_residual_blocks must be >= 0")
        if self.input_planes < 2:
            raise ParameterError("generator needs at least two input planes")
        if self.base_resolution % 8 != 0:
            raise ParameterError("base_resolution must be divisible by 8 (3 halvings)")
        if self.stage not in (STAGE_LOW, STAGE_HIGH):
            raise ParameterError(f"unknown stage {self.stage!r}")

    @property
    def input_resolution(self) -> int:
        return self.base_resolution * (2 if self.stage == STAGE_HIGH else 1)


class Generator(nn.Module):
    def __init__(self, cfg: GeneratorConfig):
        super().__init__()
        self.cfg = cfg
        bc = cfg.base_channels
        self.stem = nn.Conv2d(cfg.input_planes, bc, 1)
        self.down = nn.Sequential(
            down_block(bc, 2 * bc),
            down_block(2 * bc, 4 * bc),
            down_block(4 * bc, 8 * bc),
        )
        self.res = nn.Sequential(
            *[ResidualBlock(8 * bc) for _ in range(cfg.num_residual_blocks)]
        )
        self.up = nn.Sequential(
            up_block(8 * bc, 4 * bc),
            up_block(4 * bc, 2 * bc),
            up_block(2 * bc, bc),
        )
        self.head = nn.Conv2d(bc, 1, 1)
        self.fade = FadeInState(alpha=0.0, alpha_max=ALPHA_MAX_G, step=cfg.alpha_step)
        if cfg.stage == STAGE_HIGH:
            self.fib_in = init_fresh(conv_block(bc))
            self.fib_out = init_fresh(conv_block(bc))
            self.head_high = init_fresh(nn.Conv2d(bc, 1, 1))

    def _check_input(self, x: Tensor) -> None:
        if x.ndim != 4:
            raise DimensionError(f"expected (B, C, H, W) input, got shape {tuple(x.shape)}")
        if x.shape[1] != self.cfg.input_planes:
            raise DimensionError(
                f"expected {self.cfg.input_planes} input planes, got {x.shape[1]}"
            )
        r = self.cfg.input_resolution
        if x.shape[2] != r or x.shape[3] != r:
            raise DimensionError(
                f"stage={self.cfg.stage} expects {r}x{r} input, got {x.shape[2]}x{x.shape[3]}"
            )

    def _backbone(self, h: Tensor) -> Tensor:
        h = self.down(h)
        h = self.res(h)
        return self.up(h)

    def forward(self, x: Tensor) -> Tensor:
        self._check_input(x)
        if self.cfg.stage == STAGE_LOW:
            h = self._backbone(self.stem(x))
            return torch.tanh(self.head(h))

        alpha = self.fade.alpha
        side_in = self.stem(avg_pool_half(x))
        main_in = avg_pool_half(self.fib_in(self.stem(x)))
        h = self._backbone(fib_blend(main_in, side_in, alpha))
        side_out = bilinear_double(torch.tanh(self.head(h)))
        main_out = torch.tanh(self.head_high(self.fib_out(bilinear_double(h))))
        return fib_blend(main_out, side_out, alpha)


def grow_to_high(gen: Generator) -> Generator:
    """Grow a converged low-stage generator to the high stage.

    The backbone modules are carried over as the same objects, so shared
    weights are preserved bit-exactly; only the fade-in convolutions and
    the high-resolution head are fresh.
    """
    if gen.cfg.stage == STAGE_HIGH:
        raise StateError("generator is already at the high stage")
    cfg = replace(gen.cfg, stage=STAGE_HIGH)
    grown = Generator(cfg)
    grown.stem = gen.stem
    grown.down = gen.down
    grown.res = gen.res
    grown.up = gen.up
    grown.head = gen.head
    grown.fade = FadeInState(alpha=0.0, alpha_max=ALPHA_MAX_G, step=cfg.alpha_step)
    return grown
