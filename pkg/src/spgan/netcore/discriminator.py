"""Patch discriminator with a solved layer plan and progressive growth.

The backbone is five convolution layers scoring patches of the
label+image concatenation. Stride/padding of each layer are derived from
the requested output size by `patch_plan`, so the published sweep sizes
map to these plans at 256 input (kernel 3 everywhere, channels
bc,2bc,4bc,8bc,1):

    output   plan (stride/padding per layer)
    1x1      s2p1 s2p1 s2p1 s2p1 + full-kernel valid conv
    30x30    s2p1 s2p1 s2p1 s1p0 s1p1
    60x60    s2p1 s2p1 s1p0 s1p0 s1p1
    120x120  s2p1 s1p0 s1p0 s1p0 s1p0
    256x256  s1p1 s1p1 s1p1 s1p1 s1p1

Growth keeps the patch grid fixed: a fade-in front end maps the doubled
input down to what the first backbone layer produces, with the side
branch being avg-pool followed by that same first layer.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import torch
from torch import Tensor, nn

from ..errors import DimensionError, ParameterError, StateError
from .blocks import FadeInState, avg_pool_half, fib_blend, init_fresh

STAGE_LOW = "low"
STAGE_HIGH = "high"

ALPHA_MAX_D = 1.0

NUM_LAYERS = 5


@dataclass(frozen=True)
class LayerPlan:
    kernel: int
    stride: int
    padding: int

    def out_size(self, in_size: int) -> int:
        return (in_size + 2 * self.padding - self.kernel) // self.stride + 1


def patch_plan(input_resolution: int, output_size: int) -> list[LayerPlan]:
    """Solve for the 5-layer stride/padding plan hitting `output_size`.

    Uses as many stride-2 halvings as possible, then 3x3 valid convs to
    shave the remainder, padding-1 convs to keep size. output_size=1 is
    the whole-image case: four halvings plus one full-kernel conv.
    """
    if output_size < 1 or output_size > input_resolution:
        raise ParameterError(
            f"output size {output_size} unreachable from input {input_resolution}"
        )
    if output_size == 1:
        rest = input_resolution // 16
        if rest < 1:
            raise ParameterError(f"input {input_resolution} too small for 1x1 output")
        return [LayerPlan(3, 2, 1)] * 4 + [LayerPlan(rest, 1, 0)]
    for halvings in range(4, -1, -1):
        size = input_resolution >> halvings
        if size < output_size or input_resolution % (1 << halvings):
            continue
        shave = size - output_size
        if shave % 2:
            continue
        shaves = shave // 2
        keeps = NUM_LAYERS - halvings - shaves
        if keeps < 0:
            continue
        return (
            [LayerPlan(3, 2, 1)] * halvings
            + [LayerPlan(3, 1, 0)] * shaves
            + [LayerPlan(3, 1, 1)] * keeps
        )
    raise ParameterError(
        f"no 5-layer plan reaches {output_size} from input {input_resolution}"
    )


def receptive_field(plan: list[LayerPlan]) -> tuple[int, int, int]:
    """(size, stride, offset) of one output unit's receptive field.

    Output unit i covers input pixels [i * stride - offset,
    i * stride - offset + size - 1], clipped to the frame.
    """
    size, jump, offset = 1, 1, 0
    for layer in plan:
        size += (layer.kernel - 1) * jump
        offset += layer.padding * jump
        jump *= layer.stride
    return size, jump, offset


@dataclass
class DiscriminatorConfig:
    input_planes: int  # label planes + 1 image channel
    output_size: int = 30
    base_channels: int = 64
    base_resolution: int = 256
    stage: str = STAGE_LOW
    alpha_step: float = 1.0 / 50.0

    def __post_init__(self) -> None:
        if self.input_planes < 3:
            raise ParameterError("discriminator input needs label planes plus image")
        if self.stage not in (STAGE_LOW, STAGE_HIGH):
            raise ParameterError(f"unknown stage {self.stage!r}")
        patch_plan(self.base_resolution, self.output_size)  # validate early


class PatchDiscriminator(nn.Module):
    def __init__(self, cfg: DiscriminatorConfig):
        super().__init__()
        self.cfg = cfg
        self.plan = patch_plan(cfg.base_resolution, cfg.output_size)
        bc = cfg.base_channels
        widths = [cfg.input_planes, bc, 2 * bc, 4 * bc, 8 * bc, 1]
        layers: list[nn.Module] = []
        # no normalization anywhere: spatial-statistics norms (instance,
        # batch-in-train) would couple every pixel into every patch score
        # and break the analytic receptive-field contract
        for i, p in enumerate(self.plan):
            conv = nn.Conv2d(widths[i], widths[i + 1], p.kernel, p.stride, p.padding)
            if i < NUM_LAYERS - 1:
                layers.append(nn.Sequential(conv, nn.LeakyReLU(0.2, inplace=True)))
            else:
                layers.append(conv)  # raw patch logits
        self.layers = nn.ModuleList(layers)
        self.fade = FadeInState(alpha=0.0, alpha_max=ALPHA_MAX_D, step=cfg.alpha_step)
        if cfg.stage == STAGE_HIGH:
            self.fib_in = self._fresh_front()

    def _fresh_front(self) -> nn.Module:
        """New high-res front end: 1x1 projection plus two 3x3 convs whose
        combined stride matches avg-pool followed by the first layer."""
        bc = self.cfg.base_channels
        first = self.plan[0]
        return init_fresh(
            nn.Sequential(
                nn.Conv2d(self.cfg.input_planes, bc, 1),
                nn.LeakyReLU(0.2, inplace=True),
                nn.Conv2d(bc, bc, 3, stride=2, padding=1),
                nn.LeakyReLU(0.2, inplace=True),
                nn.Conv2d(bc, bc, first.kernel, first.stride, first.padding),
                nn.LeakyReLU(0.2, inplace=True),
            )
        )

    @property
    def input_resolution(self) -> int:
        return self.cfg.base_resolution * (2 if self.cfg.stage == STAGE_HIGH else 1)

    def forward(self, label_planes: Tensor, image: Tensor) -> Tensor:
        if label_planes.ndim != 4 or image.ndim != 4:
            raise DimensionError("discriminator inputs must be (B, C, H, W)")
        if label_planes.shape[-2:] != image.shape[-2:]:
            raise DimensionError(
                f"label {tuple(label_planes.shape[-2:])} and image "
                f"{tuple(image.shape[-2:])} are not aligned"
            )
        x = torch.cat([label_planes, image], dim=1)
        if x.shape[1] != self.cfg.input_planes:
            raise DimensionError(
                f"expected {self.cfg.input_planes} concatenated planes, got {x.shape[1]}"
            )
        r = self.input_resolution
        if x.shape[2] != r or x.shape[3] != r:
            raise DimensionError(
                f"stage={self.cfg.stage} expects {r}x{r} input, got {x.shape[2]}x{x.shape[3]}"
            )
        if self.cfg.stage == STAGE_HIGH:
            side = self.layers[0](avg_pool_half(x))
            main = self.fib_in(x)
            h = fib_blend(main, side, self.fade.alpha)
            start = 1
        else:
            h = x
            start = 0
        for layer in list(self.layers)[start:]:
            h = layer(h)
        return h


def grow_to_high(disc: PatchDiscriminator) -> PatchDiscriminator:
    """Grow a low-stage discriminator; backbone layers are shared objects."""
    if disc.cfg.stage == STAGE_HIGH:
        raise StateError("discriminator is already at the high stage")
    cfg = replace(disc.cfg, stage=STAGE_HIGH)
    grown = PatchDiscriminator(cfg)
    grown.layers = disc.layers
    grown.fade = FadeInState(alpha=0.0, alpha_max=ALPHA_MAX_D, step=cfg.alpha_step)
    return grown
