"""Four-phase progressive training over a phantom corpus.

Phase 1  backbone G and D at the base resolution
Phase 2  D grown; its alpha ramps to 1.0 while G stays frozen (the
         high-res fakes are bilinearly upsampled low-stage outputs,
         which is exactly a grown generator at alpha 0)
Phase 3  G grown; its alpha ramps to 0.5 against the frozen grown D
Phase 4  joint fine-tune at high resolution, alphas frozen at maxima

Each phase gets fresh Adam optimizers (parameter sets change at growth).
Alpha advances once per epoch by the configured step, and only one
module's alpha ever moves in a given step. Every run is reproducible
from (corpus, schedule): all shuffles and inits derive from the master
seed.
"""
from __future__ import annotations

import time
from pathlib import Path
from typing import Optional, Union

import numpy as np
import torch

from ..datagen import iter_pairs
from ..errors import ConfigurationError, DataError, DimensionError, StateError
from ..labelkit import (
    CompositeLabel,
    LabelMap,
    compose,
    encode_onehot,
    extract_sketch,
    make_structure_mask,
)
from ..losses import (
    LossWeights,
    loss_d,
    loss_feature,
    loss_g_adv,
    loss_g_total,
    loss_l1,
)
from ..fen import build_fen
from ..netcore import (
    CheckpointBundle,
    DiscriminatorConfig,
    Generator,
    GeneratorConfig,
    PatchDiscriminator,
    bilinear_double,
    grow_discriminator,
    grow_generator,
    load_checkpoint,
    save_checkpoint,
)
from .config import TrainSchedule
from .events import ALPHA_MAX, TrainEventLog

PathLike = Union[str, Path]


def _downsample_image(image: np.ndarray) -> np.ndarray:
    return (
        image[0::2, 0::2] + image[1::2, 0::2] + image[0::2, 1::2] + image[1::2, 1::2]
    ) / 4.0


def _pair_tensors(label: LabelMap, image: np.ndarray) -> tuple[torch.Tensor, torch.Tensor]:
    sketch = extract_sketch(image)
    comp = compose(label, make_structure_mask(label), sketch)
    x = torch.from_numpy(encode_onehot(comp))
    y = torch.from_numpy(np.asarray(image, dtype=np.float32))[None]
    return x, y


class PhantomPairs:
    """Corpus loaded into memory with base- and high-resolution views.

    High resolution is the stored phantom; the base view re-renders the
    label at half size (nearest) and re-extracts the sketch from the
    downsampled image, so each stage sees natively rendered labels.
    """

    def __init__(self, corpus_dir: PathLike):
        xs_lo, ys_lo, xs_hi, ys_hi = [], [], [], []
        class_names: Optional[tuple[str, ...]] = None
        for label, image, _ in iter_pairs(corpus_dir):
            if class_names is None:
                class_names = label.class_names
            elif class_names != label.class_names:
                raise DataError("corpus mixes label maps with different classes")
            x_hi, y_hi = _pair_tensors(label, image)
            label_lo = LabelMap(label.grid[0::2, 0::2], label.class_names)
            image_lo = _downsample_image(image.astype(np.float64)).astype(np.float32)
            x_lo, y_lo = _pair_tensors(label_lo, image_lo)
            xs_lo.append(x_lo), ys_lo.append(y_lo)
            xs_hi.append(x_hi), ys_hi.append(y_hi)
        if class_names is None:
            raise DataError(f"corpus at {corpus_dir} is empty")
        self.class_names = class_names
        self.x_lo = torch.stack(xs_lo)
        self.y_lo = torch.stack(ys_lo)
        self.x_hi = torch.stack(xs_hi)
        self.y_hi = torch.stack(ys_hi)

    def __len__(self) -> int:
        return self.x_lo.shape[0]

    @property
    def num_planes(self) -> int:
        return len(self.class_names) + 1

    @property
    def base_resolution(self) -> int:
        return self.x_lo.shape[-1]

    def batches(self, batch_size: int, rng_key: tuple) -> list[torch.Tensor]:
        order = np.random.default_rng(rng_key).permutation(len(self))
        return [
            torch.from_numpy(order[i : i + batch_size].copy())
            for i in range(0, len(self), batch_size)
        ]


def _adam(params, lr: float, schedule: TrainSchedule) -> torch.optim.Adam:
    return torch.optim.Adam(params, lr=lr, betas=(schedule.beta1, schedule.beta2))


def _build_nets(corpus: PhantomPairs, schedule: TrainSchedule):
    torch.manual_seed(schedule.seed)
    gen = Generator(
        GeneratorConfig(
            input_planes=corpus.num_planes,
            num_residual_blocks=schedule.num_residual_blocks,
            base_channels=schedule.gen_channels,
            base_resolution=schedule.base_resolution,
            alpha_step=schedule.alpha_step,
        )
    )
    disc = PatchDiscriminator(
        DiscriminatorConfig(
            input_planes=corpus.num_planes + 1,
            output_size=schedule.patch_output,
            base_channels=schedule.disc_channels,
            base_resolution=schedule.base_resolution,
            alpha_step=schedule.alpha_step,
        )
    )
    return gen, disc


class _EpochMeter:
    def __init__(self) -> None:
        self.sums: dict[str, float] = {}
        self.n = 0

    def add(self, **losses: float) -> None:
        for key, val in losses.items():
            self.sums[key] = self.sums.get(key, 0.0) + val
        self.n += 1

    def mean(self, key: str) -> Optional[float]:
        if key not in self.sums or self.n == 0:
            return None
        return self.sums[key] / self.n


def _log_epoch(log, phase, epoch, gen, disc, meter):
    log.append(
        "epoch",
        phase=phase,
        epoch=epoch,
        alpha_g=gen.fade.alpha,
        alpha_d=disc.fade.alpha,
        loss_d=meter.mean("loss_d"),
        loss_g=meter.mean("loss_g"),
        loss_l1=meter.mean("loss_l1"),
        loss_adv=meter.mean("loss_adv"),
        loss_feat=meter.mean("loss_feat"),
    )


def _maybe_checkpoint(
    schedule, out_dir, gen, disc, phase, local, epoch, class_names, log
) -> None:
    every = schedule.checkpoint_every
    if every > 0 and local % every == 0 and local < schedule.epochs_for(phase):
        path = save_checkpoint(
            Path(out_dir) / f"phase{phase}_epoch{epoch:05d}.ckpt",
            gen, disc, phase, class_names,
            meta={"preset": schedule.preset, "epoch": epoch, "interim": True},
        )
        log.append("checkpoint", phase=phase, epoch=epoch, path=str(path))


def _train_joint_epochs(
    corpus, schedule, gen, disc, fen, log, phase, start_epoch, high: bool,
    out_dir=None,
) -> int:
    """Alternating D/G steps per batch, used by phases 1 and 4."""
    weights = LossWeights(schedule.lambda1, schedule.lambda2)
    opt_g = _adam(gen.parameters(), schedule.lr_g, schedule)
    opt_d = _adam(disc.parameters(), schedule.lr_d, schedule)
    xs = corpus.x_hi if high else corpus.x_lo
    ys = corpus.y_hi if high else corpus.y_lo
    epochs = schedule.epochs_for(phase)
    best_l1, stale = float("inf"), 0
    epoch = start_epoch
    gen.train(), disc.train()
    for local in range(1, epochs + 1):
        epoch = start_epoch + local
        meter = _EpochMeter()
        for idx in corpus.batches(schedule.batch_size, (schedule.seed, phase, local)):
            x, y = xs[idx], ys[idx]

            opt_d.zero_grad()
            with torch.no_grad():
                fake = gen(x)
            d_obj = loss_d(disc(x, y), disc(x, fake))
            (-d_obj).backward()  # maximize the objective
            opt_d.step()
            log.append("step", phase=phase, epoch=epoch, module="D", loss=float(d_obj.detach()))

            opt_g.zero_grad()
            fake = gen(x)
            adv = loss_g_adv(disc(x, fake))
            l1 = loss_l1(y, fake)
            feat = loss_feature(y, fake, fen)
            total = loss_g_total(adv, l1, feat, weights)
            total.backward()
            opt_g.step()
            log.append("step", phase=phase, epoch=epoch, module="G", loss=float(total.detach()))
            meter.add(
                loss_d=float(d_obj.detach()),
                loss_g=float(total.detach()),
                loss_l1=float(l1.detach()),
                loss_adv=float(adv.detach()),
                loss_feat=float(feat.detach()),
            )
        _log_epoch(log, phase, epoch, gen, disc, meter)
        if out_dir is not None:
            _maybe_checkpoint(
                schedule, out_dir, gen, disc, phase, local, epoch,
                corpus.class_names, log,
            )

        if schedule.early_stop_patience > 0 and phase == 1:
            l1_now = meter.mean("loss_l1")
            if l1_now is not None and l1_now < best_l1 - 1e-4:
                best_l1, stale = l1_now, 0
            else:
                stale += 1
                if stale >= schedule.early_stop_patience:
                    break
    gen.eval(), disc.eval()
    return epoch


def run_phase1(
    corpus: PhantomPairs,
    schedule: TrainSchedule,
    out_dir: PathLike,
    log: TrainEventLog,
) -> Path:
    """Warm-up training of the backbone at base resolution."""
    if len(corpus) == 0:
        raise DataError("cannot train on an empty corpus")
    gen, disc = _build_nets(corpus, schedule)
    fen = build_fen(schedule.fen_backend, seed=schedule.seed)
    log.append("phase_start", phase=1, epoch=0)
    last = _train_joint_epochs(
        corpus, schedule, gen, disc, fen, log, 1, 0, high=False, out_dir=out_dir
    )
    path = save_checkpoint(
        Path(out_dir) / "phase1.ckpt", gen, disc, 1, corpus.class_names,
        meta={"preset": schedule.preset, "epoch": last},
    )
    log.append("checkpoint", phase=1, epoch=last, path=str(path))
    return path


def _resume(ckpt_path: PathLike, expected_phase: int) -> CheckpointBundle:
    bundle = load_checkpoint(ckpt_path)
    if bundle.phase != expected_phase:
        raise StateError(
            f"need a phase-{expected_phase} checkpoint, got phase {bundle.phase}"
        )
    return bundle


def run_phase2(
    ckpt_path: PathLike,
    corpus: PhantomPairs,
    schedule: TrainSchedule,
    out_dir: PathLike,
    log: TrainEventLog,
) -> Path:
    """Discriminator growth: alpha_D ramps to 1.0, generator frozen."""
    bundle = _resume(ckpt_path, 1)
    torch.manual_seed(schedule.seed + 2)
    gen, disc = bundle.generator, grow_discriminator(bundle.discriminator)
    start_epoch = int(bundle.meta.get("epoch", 0))
    opt_d = _adam(disc.parameters(), schedule.lr_d, schedule)
    log.append("phase_start", phase=2, epoch=start_epoch)
    disc.train()
    epoch = start_epoch
    for k in range(1, schedule.epochs_for(2) + 1):
        epoch = start_epoch + k
        alpha = disc.fade.set_progress(k)
        log.append(
            "alpha_update", phase=2, epoch=epoch, module="D", step_index=k, alpha=alpha
        )
        meter = _EpochMeter()
        for idx in corpus.batches(schedule.batch_size, (schedule.seed, 2, k)):
            x_hi, y_hi, x_lo = corpus.x_hi[idx], corpus.y_hi[idx], corpus.x_lo[idx]
            with torch.no_grad():
                fake_hi = bilinear_double(gen(x_lo))
            opt_d.zero_grad()
            d_obj = loss_d(disc(x_hi, y_hi), disc(x_hi, fake_hi))
            (-d_obj).backward()
            opt_d.step()
            log.append("step", phase=2, epoch=epoch, module="D", loss=float(d_obj.detach()))
            meter.add(loss_d=float(d_obj.detach()))
        _log_epoch(log, 2, epoch, gen, disc, meter)
        _maybe_checkpoint(schedule, out_dir, gen, disc, 2, k, epoch, corpus.class_names, log)
    disc.eval()
    path = save_checkpoint(
        Path(out_dir) / "phase2.ckpt", gen, disc, 2, corpus.class_names,
        meta={"preset": schedule.preset, "epoch": epoch},
    )
    log.append("checkpoint", phase=2, epoch=epoch, path=str(path))
    return path


def run_phase3(
    ckpt_path: PathLike,
    corpus: PhantomPairs,
    schedule: TrainSchedule,
    out_dir: PathLike,
    log: TrainEventLog,
) -> Path:
    """Generator growth: alpha_G ramps to 0.5 against the frozen D."""
    bundle = _resume(ckpt_path, 2)
    torch.manual_seed(schedule.seed + 3)
    gen, disc = grow_generator(bundle.generator), bundle.discriminator
    start_epoch = int(bundle.meta.get("epoch", 0))
    weights = LossWeights(schedule.lambda1, schedule.lambda2)
    fen = build_fen(schedule.fen_backend, seed=schedule.seed)
    opt_g = _adam(gen.parameters(), schedule.lr_g, schedule)
    for p in disc.parameters():
        p.requires_grad_(False)
    log.append("phase_start", phase=3, epoch=start_epoch)
    gen.train()
    epoch = start_epoch
    for k in range(1, schedule.epochs_for(3) + 1):
        epoch = start_epoch + k
        alpha = gen.fade.set_progress(k)
        log.append(
            "alpha_update", phase=3, epoch=epoch, module="G", step_index=k, alpha=alpha
        )
        meter = _EpochMeter()
        for idx in corpus.batches(schedule.batch_size, (schedule.seed, 3, k)):
            x_hi, y_hi = corpus.x_hi[idx], corpus.y_hi[idx]
            opt_g.zero_grad()
            fake = gen(x_hi)
            adv = loss_g_adv(disc(x_hi, fake))
            l1 = loss_l1(y_hi, fake)
            feat = loss_feature(y_hi, fake, fen)
            total = loss_g_total(adv, l1, feat, weights)
            total.backward()
            opt_g.step()
            log.append("step", phase=3, epoch=epoch, module="G", loss=float(total.detach()))
            meter.add(
                loss_g=float(total.detach()), loss_l1=float(l1.detach()),
                loss_adv=float(adv.detach()), loss_feat=float(feat.detach()),
            )
        _log_epoch(log, 3, epoch, gen, disc, meter)
        _maybe_checkpoint(schedule, out_dir, gen, disc, 3, k, epoch, corpus.class_names, log)
    gen.eval()
    for p in disc.parameters():
        p.requires_grad_(True)
    path = save_checkpoint(
        Path(out_dir) / "phase3.ckpt", gen, disc, 3, corpus.class_names,
        meta={"preset": schedule.preset, "epoch": epoch},
    )
    log.append("checkpoint", phase=3, epoch=epoch, path=str(path))
    return path


def run_phase4(
    ckpt_path: PathLike,
    corpus: PhantomPairs,
    schedule: TrainSchedule,
    out_dir: PathLike,
    log: TrainEventLog,
) -> Path:
    """Joint high-resolution fine-tune with both alphas at their maxima."""
    bundle = _resume(ckpt_path, 3)
    torch.manual_seed(schedule.seed + 4)
    gen, disc = bundle.generator, bundle.discriminator
    gen.fade.alpha = ALPHA_MAX["G"]  # ramps complete when phase 4 begins
    disc.fade.alpha = ALPHA_MAX["D"]
    fen = build_fen(schedule.fen_backend, seed=schedule.seed)
    start_epoch = int(bundle.meta.get("epoch", 0))
    log.append("phase_start", phase=4, epoch=start_epoch)
    last = _train_joint_epochs(
        corpus, schedule, gen, disc, fen, log, 4, start_epoch, high=True,
        out_dir=out_dir,
    )
    path = save_checkpoint(
        Path(out_dir) / "phase4.ckpt", gen, disc, 4, corpus.class_names,
        meta={"preset": schedule.preset, "epoch": last},
    )
    log.append("checkpoint", phase=4, epoch=last, path=str(path))
    return path


PHASE_RUNNERS = {2: run_phase2, 3: run_phase3, 4: run_phase4}


def run_phases(
    corpus_dir: PathLike,
    schedule: TrainSchedule,
    out_dir: PathLike,
    phases: tuple[int, ...] = (1, 2, 3, 4),
    resume_from: Optional[PathLike] = None,
) -> dict:
    """Run consecutive phases, returning checkpoint paths and the log path."""
    phases = tuple(sorted(phases))
    if phases != tuple(range(phases[0], phases[-1] + 1)):
        raise StateError(f"phases must be consecutive, got {phases}")
    if phases[0] != 1 and resume_from is None:
        raise StateError(f"starting at phase {phases[0]} needs a checkpoint to resume")
    corpus = PhantomPairs(corpus_dir)
    if corpus.base_resolution != schedule.base_resolution:
        raise ConfigurationError(
            f"corpus renders at base {corpus.base_resolution}, "
            f"schedule expects {schedule.base_resolution}"
        )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = time.monotonic()
    log = TrainEventLog()
    checkpoints: dict[int, str] = {}
    current = Path(resume_from) if resume_from else None
    for phase in phases:
        if phase == 1:
            current = run_phase1(corpus, schedule, out, log)
        else:
            current = PHASE_RUNNERS[phase](current, corpus, schedule, out, log)
        checkpoints[phase] = str(current)
    log_path = log.save(out / "events.jsonl")
    return {
        "checkpoints": checkpoints,
        "final": str(current),
        "events": str(log_path),
        "classes": list(corpus.class_names),
        "wall_seconds": round(time.monotonic() - started, 3),
    }


def synthesize(
    ckpt: Union[CheckpointBundle, PathLike], comp: CompositeLabel
) -> np.ndarray:
    """Deterministic image for a composite label under a checkpoint."""
    bundle = ckpt if isinstance(ckpt, CheckpointBundle) else load_checkpoint(ckpt)
    if len(comp.class_names) != bundle.num_classes:
        raise ConfigurationError(
            f"checkpoint expects {bundle.num_classes} classes, "
            f"composite declares {len(comp.class_names)}"
        )
    gen = bundle.generator.eval()
    r = gen.cfg.input_resolution
    if comp.height != r or comp.width != r:
        raise DimensionError(
            f"checkpoint stage wants {r}x{r} labels, got {comp.height}x{comp.width}"
        )
    x = torch.from_numpy(encode_onehot(comp))[None]
    with torch.no_grad():
        img = gen(x)[0, 0].numpy()
    return img.astype(np.float32)
