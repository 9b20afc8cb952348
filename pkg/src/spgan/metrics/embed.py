"""Image sets to embedding matrices for the distributional metrics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from ..errors import ConfigurationError, ParameterError
from ..fen import BACKENDS, build_fen


@dataclass
class FeatureSet:
    """N x d embedding matrix plus the extractor that produced it."""

    vectors: np.ndarray
    extractor: str

    def __post_init__(self) -> None:
        self.vectors = np.atleast_2d(np.asarray(self.vectors, dtype=np.float64))

    @property
    def count(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def _inception_embedder():
    try:
        from torchvision.models import Inception_V3_Weights, inception_v3
    except ImportError as exc:
        raise ConfigurationError(f"torchvision unavailable: {exc}") from exc
    try:
        net = inception_v3(weights=Inception_V3_Weights.IMAGENET1K_V1)
    except Exception as exc:
        raise ConfigurationError(
            f"pretrained inception weights unavailable: {exc}"
        ) from exc
    net.fc = torch.nn.Identity()
    net.eval()
    for p in net.parameters():
        p.requires_grad_(False)

    def embed(batch: torch.Tensor) -> torch.Tensor:
        rgb = ((batch + 1.0) * 0.5).repeat(1, 3, 1, 1)
        rgb = torch.nn.functional.interpolate(
            rgb, size=(299, 299), mode="bilinear", align_corners=False
        )
        return net(rgb)

    return embed


def embed_images(
    images: list[np.ndarray], backend: str = "tiny", batch_size: int = 16
) -> FeatureSet:
    """Embed [-1, 1] grayscale images; pooled deep features per image."""
    if not images:
        raise ParameterError("cannot embed an empty image list")
    if backend == "inception":
        embedder = _inception_embedder()
    elif backend in BACKENDS:
        fen = build_fen(backend)

        def embedder(batch: torch.Tensor) -> torch.Tensor:
            return fen.features(batch).mean(dim=(2, 3))

    else:
        raise ParameterError(
            f"unknown embedding backend {backend!r}; "
            f"choose one of {', '.join(BACKENDS + ('inception',))}"
        )
    rows = []
    with torch.no_grad():
        for i in range(0, len(images), batch_size):
            chunk = np.stack(
                [np.asarray(im, dtype=np.float32) for im in images[i : i + batch_size]]
            )
            rows.append(embedder(torch.from_numpy(chunk)[:, None]).numpy())
    return FeatureSet(np.concatenate(rows, axis=0), extractor=backend)
