"""Small encoder-decoder segmentation net with skip connections."""
from __future__ import annotations

import torch
from torch import Tensor, nn


def _double_conv(in_ch: int, out_ch: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(in_ch, out_ch, 3, padding=1),
        nn.ReLU(inplace=True),
        nn.Conv2d(out_ch, out_ch, 3, padding=1),
        nn.ReLU(inplace=True),
    )


class SmallUNet(nn.Module):
    """Two-level U-Net sized so desk-scale runs finish in minutes."""

    def __init__(self, num_classes: int, base: int = 16):
        super().__init__()
        self.enc1 = _double_conv(1, base)
        self.enc2 = _double_conv(base, 2 * base)
        self.bottleneck = _double_conv(2 * base, 4 * base)
        self.pool = nn.MaxPool2d(2)
        self.up1 = nn.ConvTranspose2d(4 * base, 2 * base, 2, stride=2)
        self.dec1 = _double_conv(4 * base, 2 * base)
        self.up2 = nn.ConvTranspose2d(2 * base, base, 2, stride=2)
        self.dec2 = _double_conv(2 * base, base)
        self.out = nn.Conv2d(base, num_classes, 1)

    def forward(self, x: Tensor) -> Tensor:
        e1 = self.enc1(x)
        e2 = self.enc2(self.pool(e1))
        b = self.bottleneck(self.pool(e2))
        d1 = self.dec1(torch.cat([self.up1(b), e2], dim=1))
        d2 = self.dec2(torch.cat([self.up2(d1), e1], dim=1))
        return self.out(d2)
