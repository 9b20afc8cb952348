"""Training schedules: presets, config files and dotted overrides."""
from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional, Union

import yaml

from ..errors import ConfigurationError, ParameterError

PathLike = Union[str, Path]

PRESET_NAMES = ("desk", "covid19", "hip_joint", "ovary")


@dataclass
class TrainSchedule:
    """Every knob of the four-phase run, resolved from a preset."""

    preset: str
    base_resolution: int
    batch_size: int
    lr_g: float
    lr_d: float
    beta1: float
    beta2: float
    epochs_phase1: int
    epochs_phase2: int
    epochs_phase3: int
    epochs_phase4: int
    alpha_step: float
    lambda1: float
    lambda2: float
    num_residual_blocks: int
    patch_output: int
    gen_channels: int
    disc_channels: int
    fen_backend: str
    embed_backend: str
    early_stop_patience: int
    checkpoint_every: int
    seed: int

    def __post_init__(self) -> None:
        if self.base_resolution % 64 != 0:
            raise ParameterError("base_resolution must be a multiple of 64")
        if self.alpha_step <= 0 or self.alpha_step > 1:
            raise ParameterError(f"alpha_step must be in (0, 1], got {self.alpha_step}")
        for name in ("epochs_phase1", "epochs_phase2", "epochs_phase3", "epochs_phase4"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be >= 0")

    @property
    def high_resolution(self) -> int:
        return self.base_resolution * 2

    def epochs_for(self, phase: int) -> int:
        return getattr(self, f"epochs_phase{phase}")


def _coerce(raw: str, target_type: type):
    if target_type is bool:
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ParameterError(f"cannot read {raw!r} as a boolean")
    return target_type(raw)


def load_presets(config_path: Optional[PathLike] = None) -> dict:
    """Read the preset table from a config file or the bundled default."""
    if config_path is not None:
        text = Path(config_path).read_text()
    else:
        text = (
            importlib.resources.files("spgan").joinpath("data/presets.yaml").read_text()
        )
    data = yaml.safe_load(text)
    if not isinstance(data, dict) or not data:
        raise ConfigurationError("preset file holds no preset table")
    return data


def valid_keys() -> tuple[str, ...]:
    return tuple(f.name for f in fields(TrainSchedule) if f.name != "preset")


def build_schedule(
    preset: str,
    overrides: Optional[dict[str, str]] = None,
    config_path: Optional[PathLike] = None,
) -> TrainSchedule:
    """Look up a preset and apply `key=value` overrides.

    Unknown keys are rejected with the full list of valid keys, so typos
    fail loudly instead of silently training the wrong run.
    """
    presets = load_presets(config_path)
    if preset not in presets:
        raise ConfigurationError(
            f"unknown preset {preset!r}; available: {', '.join(sorted(presets))}"
        )
    values = dict(presets[preset])
    unknown = set(values) - set(valid_keys())
    if unknown:
        raise ConfigurationError(
            f"preset {preset!r} carries unknown keys {sorted(unknown)}"
        )
    field_types = {f.name: f.type for f in fields(TrainSchedule)}
    type_map = {"int": int, "float": float, "str": str, "bool": bool}
    for key, raw in (overrides or {}).items():
        if key not in valid_keys():
            raise ParameterError(
                f"unknown config key {key!r}; valid keys: {', '.join(sorted(valid_keys()))}"
            )
        target = field_types[key]
        target = type_map.get(target, target) if isinstance(target, str) else target
        values[key] = _coerce(str(raw), target)
    missing = set(valid_keys()) - set(values)
    if missing:
        raise ConfigurationError(f"preset {preset!r} lacks keys {sorted(missing)}")
    return TrainSchedule(preset=preset, **values)
