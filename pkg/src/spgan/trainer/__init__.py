"""Four-phase progressive training, schedules and the event log."""
from .config import PRESET_NAMES, TrainSchedule, build_schedule, load_presets, valid_keys
from .events import ALPHA_MAX, TrainEventLog, validate_schedule
from .loop import (
    PhantomPairs,
    run_phase1,
    run_phase2,
    run_phase3,
    run_phase4,
    run_phases,
    synthesize,
)

__all__ = [
    "ALPHA_MAX",
    "PRESET_NAMES",
    "PhantomPairs",
    "TrainEventLog",
    "TrainSchedule",
    "build_schedule",
    "validate_schedule",
    "load_presets",
    "run_phase1",
    "run_phase2",
    "run_phase3",
    "run_phase4",
    "run_phases",
    "synthesize",
    "valid_keys",
]
