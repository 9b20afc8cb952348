"""Append-only training event log plus the schedule replay validator.

Record kinds:
  phase_start   {phase}
  alpha_update  {phase, epoch, module ("G"|"D"), step_index, alpha}
  step          {phase, epoch, iter, module, loss}
  epoch         {phase, epoch, alpha_g, alpha_d, loss_d, loss_g, loss_l1,
                 loss_adv, loss_feat}
  checkpoint    {phase, path}

Epoch counters are global and monotone. The validator replays a log
against its schedule and returns every violation it finds; an empty list
is the pass condition used by the acceptance suite.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from ..errors import FormatError, StateError
from .config import TrainSchedule

PathLike = Union[str, Path]

ALPHA_MAX = {"G": 0.5, "D": 1.0}


class TrainEventLog:
    def __init__(self) -> None:
        self.records: list[dict] = []
        self._last_epoch = 0

    def append(self, kind: str, **payload) -> dict:
        record = {"kind": kind, **payload}
        epoch = payload.get("epoch")
        if epoch is not None:
            if epoch < self._last_epoch:
                raise StateError(
                    f"epoch counter moved backwards: {epoch} after {self._last_epoch}"
                )
            self._last_epoch = epoch
        self.records.append(record)
        return record

    def of_kind(self, kind: str) -> list[dict]:
        return [r for r in self.records if r["kind"] == kind]

    def phase_sequence(self) -> list[int]:
        return [r["phase"] for r in self.of_kind("phase_start")]

    def save(self, path: PathLike) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w") as fh:
            for record in self.records:
                fh.write(json.dumps(record, sort_keys=True) + "\n")
        return path

    @classmethod
    def load(cls, path: PathLike) -> "TrainEventLog":
        log = cls()
        try:
            lines = Path(path).read_text().splitlines()
        except OSError as exc:
            raise FormatError(f"cannot read event log {path}: {exc}") from exc
        for line in lines:
            if line.strip():
                log.records.append(json.loads(line))
        if log.records:
            epochs = [r["epoch"] for r in log.records if "epoch" in r]
            log._last_epoch = max(epochs) if epochs else 0
        return log


def validate_schedule(log: TrainEventLog, schedule: TrainSchedule) -> list[str]:
    """Replay a full run's log; every returned string is one violation."""
    violations: list[str] = []

    phases = log.phase_sequence()
    if phases != sorted(phases):
        violations.append(f"phases out of order: {phases}")
    expected_phases = [p for p in (1, 2, 3, 4) if schedule.epochs_for(p) > 0]
    if phases != expected_phases:
        violations.append(f"phase sequence {phases}, expected {expected_phases}")

    epochs = [r["epoch"] for r in log.records if "epoch" in r]
    if any(b < a for a, b in zip(epochs, epochs[1:])):
        violations.append("epoch counter not monotone")

    per_phase: dict[int, set[int]] = {}
    for r in log.of_kind("epoch"):
        per_phase.setdefault(r["phase"], set()).add(r["epoch"])
    for phase in expected_phases:
        want = schedule.epochs_for(phase)
        got = len(per_phase.get(phase, ()))
        if schedule.early_stop_patience > 0 and phase == 1:
            if got > want:
                violations.append(f"phase 1 overran: {got} epochs > {want}")
        elif got != want:
            violations.append(f"phase {phase} ran {got} epochs, schedule says {want}")

    # alpha ramp: value must equal min(step_index * step, alpha_max), the
    # two modules never update in the same training step, and each ramp
    # is non-decreasing
    last_alpha = {"G": 0.0, "D": 0.0}
    seen_at: dict[tuple[int, int], set[str]] = {}
    for r in log.of_kind("alpha_update"):
        module = r["module"]
        expect = min(r["step_index"] * schedule.alpha_step, ALPHA_MAX[module])
        if r["alpha"] != expect:
            violations.append(
                f"alpha_update {module} step {r['step_index']}: "
                f"alpha {r['alpha']} != {expect}"
            )
        if r["alpha"] < last_alpha[module]:
            violations.append(f"alpha of {module} decreased to {r['alpha']}")
        last_alpha[module] = r["alpha"]
        key = (r["phase"], r["epoch"])
        seen_at.setdefault(key, set()).add(module)
    for key, modules in sorted(seen_at.items()):
        if len(modules) > 1:
            violations.append(f"G and D alpha updated in the same step at {key}")

    for r in log.of_kind("epoch"):
        if r["alpha_g"] > ALPHA_MAX["G"] + 1e-12:
            violations.append(f"alpha_g {r['alpha_g']} above its maximum")
        if r["alpha_d"] > ALPHA_MAX["D"] + 1e-12:
            violations.append(f"alpha_d {r['alpha_d']} above its maximum")
        if r["phase"] == 4:
            if r["alpha_g"] != ALPHA_MAX["G"] or r["alpha_d"] != ALPHA_MAX["D"]:
                violations.append(
                    f"phase 4 epoch {r['epoch']}: alphas not frozen at maxima "
                    f"({r['alpha_g']}, {r['alpha_d']})"
                )

    # D/G optimizer steps alternate inside joint-training epochs
    steps_by_epoch: dict[tuple[int, int], list[str]] = {}
    for r in log.of_kind("step"):
        steps_by_epoch.setdefault((r["phase"], r["epoch"]), []).append(r["module"])
    for (phase, epoch), modules in sorted(steps_by_epoch.items()):
        if phase in (1, 4):
            expect = ["D", "G"] * (len(modules) // 2)
            if modules != expect:
                violations.append(
                    f"phase {phase} epoch {epoch}: steps {modules} do not alternate D/G"
                )
    return violations
