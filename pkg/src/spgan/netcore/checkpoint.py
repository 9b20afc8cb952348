"""Versioned checkpoint files with checksums.

A checkpoint stores both network state dicts, their configs, fade-in
states, the training phase tag and the class names of the labels it was
trained on. A `.sha256` sidecar carries the file digest so the model
registry can reject corrupt files without parsing them.
"""
from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Union

import torch
from torch import nn

from ..errors import ConfigurationError, FormatError
from .blocks import FadeInState
from .discriminator import DiscriminatorConfig, PatchDiscriminator
from .generator import Generator, GeneratorConfig

PathLike = Union[str, Path]

CHECKPOINT_VERSION = 1


def weight_checksum(module: nn.Module, keys: Optional[list[str]] = None) -> str:
    """Deterministic sha256 over (sorted) state-dict entries."""
    state = module.state_dict()
    names = sorted(keys if keys is not None else state.keys())
    h = hashlib.sha256()
    for name in names:
        h.update(name.encode())
        h.update(state[name].detach().cpu().contiguous().numpy().tobytes())
    return h.hexdigest()


def file_checksum(path: PathLike) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class CheckpointBundle:
    generator: Generator
    discriminator: PatchDiscriminator
    phase: int
    class_names: tuple[str, ...]
    meta: dict

    @property
    def num_classes(self) -> int:
        return len(self.class_names)


def save_checkpoint(
    path: PathLike,
    generator: Generator,
    discriminator: PatchDiscriminator,
    phase: int,
    class_names: tuple[str, ...],
    meta: Optional[dict] = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "version": CHECKPOINT_VERSION,
        "phase": int(phase),
        "class_names": list(class_names),
        "gen_cfg": asdict(generator.cfg),
        "gen_state": generator.state_dict(),
        "gen_fade": asdict(generator.fade),
        "disc_cfg": asdict(discriminator.cfg),
        "disc_state": discriminator.state_dict(),
        "disc_fade": asdict(discriminator.fade),
        "meta": dict(meta or {}),
    }
    torch.save(payload, path)
    path.with_suffix(path.suffix + ".sha256").write_text(file_checksum(path) + "\n")
    return path


def load_checkpoint(
    path: PathLike,
    expected_num_classes: Optional[int] = None,
) -> CheckpointBundle:
    path = Path(path)
    try:
        payload = torch.load(path, map_location="cpu", weights_only=False)
    except Exception as exc:  # torch raises a zoo of types on bad files
        raise FormatError(f"cannot load checkpoint {path}: {exc}") from exc
    if not isinstance(payload, dict) or "version" not in payload:
        raise FormatError(f"{path} is not a spgan checkpoint")
    if payload["version"] != CHECKPOINT_VERSION:
        raise FormatError(
            f"{path} has checkpoint version {payload['version']}, "
            f"this build reads version {CHECKPOINT_VERSION}"
        )
    class_names = tuple(payload["class_names"])
    if expected_num_classes is not None and len(class_names) != expected_num_classes:
        raise ConfigurationError(
            f"checkpoint {path} was trained with {len(class_names)} classes, "
            f"request carries {expected_num_classes}"
        )
    generator = Generator(GeneratorConfig(**payload["gen_cfg"]))
    generator.load_state_dict(payload["gen_state"])
    generator.fade = FadeInState(**payload["gen_fade"])
    discriminator = PatchDiscriminator(DiscriminatorConfig(**payload["disc_cfg"]))
    discriminator.load_state_dict(payload["disc_state"])
    discriminator.fade = FadeInState(**payload["disc_fade"])
    generator.eval()
    discriminator.eval()
    return CheckpointBundle(
        generator=generator,
        discriminator=discriminator,
        phase=payload["phase"],
        class_names=class_names,
        meta=payload.get("meta", {}),
    )


def verify_checkpoint_file(path: PathLike) -> bool:
    """True iff the sidecar digest exists and matches the file bytes."""
    path = Path(path)
    sidecar = path.with_suffix(path.suffix + ".sha256")
    if not sidecar.exists():
        return False
    return sidecar.read_text().strip() == file_checksum(path)
