"""Feature-extraction backends for the feature loss and perceptual metrics.

The reference backend is a 50-layer residual classifier with features read
at its stage-4 output; it needs pretrained weights on disk or a download,
so two self-contained fallbacks exist for desk-scale work:

  resnet50         torchvision ResNet-50, pretrained (network/cache needed)
  resnet50_random  same architecture, seed-initialized, deterministic
  tiny             small seeded conv net, fast enough for tests

All backends are frozen: parameters never receive gradients, but the
graph stays differentiable so generator gradients flow through.

Extractors consume (B, 1, H, W) images in [-1, 1]. `features` returns the
single deep map used by the feature loss; `taps` returns the multi-layer
list used by the perceptual distance.
"""
from __future__ import annotations

import torch
from torch import Tensor, nn

from .errors import ConfigurationError, ParameterError

BACKENDS = ("tiny", "resnet50", "resnet50_random")


def _freeze(module: nn.Module) -> nn.Module:
    for p in module.parameters():
        p.requires_grad_(False)
    return module.eval()


class TinyFeatureNet(nn.Module):
    """Four strided conv stages with fixed seeded weights."""

    def __init__(self, seed: int = 0):
        super().__init__()
        gen = torch.Generator().manual_seed(seed)
        widths = (1, 12, 24, 48, 64)
        # replicate padding keeps constant inputs spatially constant, so
        # their feature variance is exactly zero
        self.stages = nn.ModuleList(
            nn.Sequential(
                nn.Conv2d(
                    widths[i], widths[i + 1], 3, stride=2, padding=1,
                    padding_mode="replicate",
                ),
                nn.LeakyReLU(0.2),
            )
            for i in range(4)
        )
        with torch.no_grad():
            for m in self.modules():
                if isinstance(m, nn.Conv2d):
                    nn.init.kaiming_normal_(m.weight, generator=gen)
                    nn.init.zeros_(m.bias)
        _freeze(self)

    def taps(self, img: Tensor) -> list[Tensor]:
        h = img
        out = []
        for stage in self.stages:
            h = stage(h)
            out.append(h)
        return out

    def features(self, img: Tensor) -> Tensor:
        return self.taps(img)[-1]

    forward = features


class ResNetFeatures(nn.Module):
    """ResNet-50 trunk; stage-4 (layer3) output is the feature map."""

    def __init__(self, pretrained: bool, seed: int = 0):
        super().__init__()
        try:
            from torchvision.models import resnet50
        except ImportError as exc:
            raise ConfigurationError(f"torchvision unavailable: {exc}") from exc
        if pretrained:
            try:
                from torchvision.models import ResNet50_Weights

                net = resnet50(weights=ResNet50_Weights.IMAGENET1K_V2)
            except Exception as exc:
                raise ConfigurationError(
                    "pretrained resnet50 weights unavailable "
                    f"(no cache and no reachable host): {exc}"
                ) from exc
        else:
            torch.manual_seed(seed)
            net = resnet50(weights=None)
        self.stem = nn.Sequential(net.conv1, net.bn1, net.relu, net.maxpool)
        self.layer1 = net.layer1
        self.layer2 = net.layer2
        self.layer3 = net.layer3
        self.layer4 = net.layer4
        _freeze(self)

    @staticmethod
    def _to_rgb(img: Tensor) -> Tensor:
        # grayscale [-1,1] replicated to three channels in [0,1]
        return ((img + 1.0) * 0.5).repeat(1, 3, 1, 1)

    def taps(self, img: Tensor) -> list[Tensor]:
        h = self.stem(self._to_rgb(img))
        h1 = self.layer1(h)
        h2 = self.layer2(h1)
        h3 = self.layer3(h2)
        h4 = self.layer4(h3)
        return [h, h1, h2, h3, h4]

    def features(self, img: Tensor) -> Tensor:
        h = self.stem(self._to_rgb(img))
        return self.layer3(self.layer2(self.layer1(h)))

    forward = features


def build_fen(backend: str = "tiny", seed: int = 0) -> nn.Module:
    """Instantiate a frozen feature extractor by backend name."""
    if backend == "tiny":
        return TinyFeatureNet(seed=seed)
    if backend == "resnet50":
        return ResNetFeatures(pretrained=True)
    if backend == "resnet50_random":
        return ResNetFeatures(pretrained=False, seed=seed)
    raise ParameterError(
        f"unknown fen backend {backend!r}; choose one of {', '.join(BACKENDS)}"
    )
