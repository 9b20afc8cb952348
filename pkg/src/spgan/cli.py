"""Command-line entry point binding all modules.

Exit codes: 0 success, 1 domain error (invalid inputs, violated
invariants, broken files), 2 usage error (unknown command or flags).
Every artifact-producing command writes a manifest next to its outputs
recording the exact parameters, seed and source revision, so any run can
be reproduced from the manifest alone.
"""
from __future__ import annotations

import functools
import json
import subprocess
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .errors import FormatError, SpganError
from .labelkit import (
    EditOp,
    apply_edit,
    extract_sketch,
    load_composite,
    load_image,
    load_label,
    load_sketch,
    save_composite,
    save_image,
    save_label,
    save_sketch,
    compose,
    make_structure_mask,
)


def git_describe() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True,
            text=True,
            timeout=10,
        )
        return out.stdout.strip() or "unknown"
    except (OSError, subprocess.TimeoutExpired):
        return "unknown"


def write_run_manifest(anchor: Path, command: str, params: dict) -> Path:
    """Drop `<anchor>.manifest.json` (or run_manifest.json in a dir)."""
    if anchor.is_dir():
        path = anchor / "run_manifest.json"
    else:
        path = anchor.with_name(anchor.name + ".manifest.json")
    payload = {
        "command": command,
        "params": params,
        "argv": sys.argv[1:],
        "version": __version__,
        "revision": git_describe(),
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def domain_errors(fn):
    """Map SpganError to exit code 1 through click's error machinery."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except SpganError as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def _parse_overrides(pairs: tuple[str, ...]) -> dict[str, str]:
    overrides = {}
    for pair in pairs:
        if "=" not in pair:
            raise click.UsageError(f"--set expects key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        overrides[key.strip()] = value.strip()
    return overrides


@click.group()
@click.version_option(__version__)
def cli():
    """Sketch-guided progressive GAN toolbox."""


@cli.command("compose")
@click.option("--label", "label_path", required=True, type=click.Path(exists=True))
@click.option("--sketch", "sketch_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@domain_errors
def compose_cmd(label_path, sketch_path, out_path):
    """Superpose a sketch onto a label map (both PNG + sidecar)."""
    label = load_label(label_path)
    sketch = load_sketch(sketch_path)
    comp = compose(label, make_structure_mask(label), sketch)
    out = Path(out_path)
    save_composite(comp, out)
    write_run_manifest(out, "compose", {"label": str(label_path), "sketch": str(sketch_path)})
    click.echo(f"composite written to {out}")


@cli.command("sketch")
@click.option("--image", "image_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--low", type=float, default=None, help="hysteresis low threshold")
@click.option("--high", type=float, default=None, help="hysteresis high threshold")
@click.option("--sigma", type=float, default=1.0, show_default=True)
@domain_errors
def sketch_cmd(image_path, out_path, low, high, sigma):
    """Extract the edge sketch of a grayscale PNG image."""
    image = load_image(image_path)
    sk = extract_sketch(image, low=low, high=high, sigma=sigma)
    out = Path(out_path)
    save_sketch(sk, out)
    write_run_manifest(
        out,
        "sketch",
        {"image": str(image_path), "low": sk.canny_low, "high": sk.canny_high, "sigma": sigma},
    )
    click.echo(f"sketch written to {out} (thresholds {sk.canny_low:.4g}/{sk.canny_high:.4g})")


def _load_editable(path: str):
    kind = json.loads(Path(path).with_suffix(".json").read_text()).get("kind")
    if kind == "label":
        return load_label(path), save_label
    if kind == "sketch":
        return load_sketch(path), save_sketch
    raise FormatError(f"{path} is a {kind!r} file; edit works on labels and sketches")


@cli.command("edit")
@click.option("--target", "target_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--kind", required=True, help="translate|scale|dilate|erode|add_region|remove_region|draw_sketch|erase_sketch")
@click.option("--target-class", type=int, default=None)
@click.option("--offset", default="0,0", help="dy,dx in pixels")
@click.option("--factor", type=float, default=1.0)
@click.option("--radius", type=int, default=1)
@click.option("--points", default="", help="polygon/stroke vertices 'y,x;y,x;...'")
@click.option("--thickness", type=int, default=1)
@domain_errors
def edit_cmd(target_path, out_path, kind, target_class, offset, factor, radius, points, thickness):
    """Apply one editing operation to a label map or sketch."""
    obj, saver = _load_editable(target_path)
    dy, dx = (int(v) for v in offset.split(","))
    pts = tuple(
        tuple(int(v) for v in pair.split(",")) for pair in points.split(";") if pair
    )
    op = EditOp(
        kind=kind,
        target_class=target_class,
        offset=(dy, dx),
        factor=factor,
        radius=radius,
        points=pts,
        thickness=thickness,
    )
    edited = apply_edit(obj, op)
    out = Path(out_path)
    saver(edited, out)
    write_run_manifest(
        out,
        "edit",
        {"target": str(target_path), "kind": kind, "target_class": target_class,
         "offset": [dy, dx], "factor": factor, "radius": radius,
         "points": [list(p) for p in pts], "thickness": thickness},
    )
    click.echo(f"edited {kind} -> {out}")


@cli.command("datagen")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--count", type=int, default=8, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--resolution", type=int, default=128, show_default=True)
@click.option("--structures", type=int, default=2, show_default=True)
@domain_errors
def datagen_cmd(out_dir, count, seed, resolution, structures):
    """Generate a seeded phantom corpus."""
    from .datagen import PhantomSpec, generate_corpus

    spec = PhantomSpec(seed=seed, resolution=resolution, num_structures=structures)
    generate_corpus(count, spec, out_dir)
    out = Path(out_dir)
    write_run_manifest(
        out,
        "datagen",
        {"count": count, "seed": seed, "resolution": resolution, "structures": structures},
    )
    click.echo(f"{count} phantoms written to {out}")


def _parse_phases(spec: str) -> tuple[int, ...]:
    if "-" in spec:
        lo, hi = spec.split("-", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(p) for p in spec.split(","))


@cli.command("train")
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--preset", default="desk", show_default=True)
@click.option("--phases", default="1-4", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--set", "overrides", multiple=True, help="override key=value")
@click.option("--resume", "resume_from", type=click.Path(exists=True), default=None)
@click.option("--seed", type=int, default=None, help="override the preset seed")
@domain_errors
def train_cmd(corpus_dir, out_dir, preset, phases, config_path, overrides, resume_from, seed):
    """Run the progressive training phases on a corpus."""
    from .trainer import build_schedule, run_phases

    parsed = _parse_overrides(overrides)
    if seed is not None:
        parsed["seed"] = str(seed)
    schedule = build_schedule(preset, parsed, config_path)
    result = run_phases(corpus_dir, schedule, out_dir, _parse_phases(phases), resume_from)
    out = Path(out_dir)
    write_run_manifest(
        out,
        "train",
        {"corpus": str(corpus_dir), "preset": preset, "phases": phases,
         "overrides": parsed, "schedule": schedule.__dict__, "result": result},
    )
    click.echo(f"training done; final checkpoint {result['final']}")


@cli.command("synth")
@click.option("--checkpoint", "ckpt_path", required=True, type=click.Path(exists=True))
@click.option("--composite", "composite_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@domain_errors
def synth_cmd(ckpt_path, composite_path, out_path):
    """Synthesize an image from a composite label."""
    from .trainer import synthesize

    comp = load_composite(composite_path)
    image = synthesize(ckpt_path, comp)
    out = Path(out_path)
    save_image(image, out)
    write_run_manifest(
        out, "synth", {"checkpoint": str(ckpt_path), "composite": str(composite_path)}
    )
    click.echo(f"image written to {out}")


@cli.command("eval")
@click.option("--real", "real_dir", required=True, type=click.Path(exists=True))
@click.option("--fake", "fake_dir", required=True, type=click.Path(exists=True))
@click.option("--report", "report_path", required=True, type=click.Path())
@click.option("--csv", "csv_path", type=click.Path(), default=None)
@click.option("--backend", default="tiny", show_default=True)
@domain_errors
def eval_cmd(real_dir, fake_dir, report_path, csv_path, backend):
    """Compute FID / KIDx100 / MS-SSIM / LPIPS between two image dirs."""
    from .metrics import evaluate_dirs

    report = evaluate_dirs(real_dir, fake_dir, backend=backend)
    out = Path(report_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report.to_json() + "\n")
    if csv_path:
        Path(csv_path).write_text(report.to_csv())
    write_run_manifest(
        out, "eval", {"real": str(real_dir), "fake": str(fake_dir), "backend": backend}
    )
    click.echo(report.to_csv().strip())


@cli.command("augbench")
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True))
@click.option("--policy", default="none", show_default=True,
              type=click.Choice(["none", "trad", "trad_gan"]))
@click.option("--fraction", type=float, default=1.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--checkpoint", "ckpt_path", type=click.Path(exists=True), default=None)
@click.option("--probability", type=float, default=0.3, show_default=True)
@click.option("--epochs", type=int, default=40, show_default=True)
@domain_errors
def augbench_cmd(corpus_dir, policy, fraction, seed, out_path, ckpt_path, probability, epochs):
    """Train the segmentation model under a policy and report DICE."""
    from .augbench import AugPolicy, run_seg_experiment

    aug_policy = AugPolicy(mode=policy, probability=probability, checkpoint=ckpt_path)
    report = run_seg_experiment(corpus_dir, aug_policy, fraction, seed, epochs=epochs)
    out = report.save(out_path)
    write_run_manifest(
        out,
        "augbench",
        {"corpus": str(corpus_dir), "policy": policy, "fraction": fraction,
         "seed": seed, "checkpoint": ckpt_path, "probability": probability,
         "epochs": epochs},
    )
    click.echo(json.dumps(report.dice, indent=2, sort_keys=True))
    if not report.audit_clean:
        raise click.ClickException("path audit failed: test split was touched")


@cli.command("serve")
@click.option("--models-dir", envvar="SPGAN_MODELS_DIR", type=click.Path(), default=None)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--ui", "with_ui", is_flag=True, help="serve the bundled editor UI")
@click.option("--ui-dir", type=click.Path(), default=None)
@domain_errors
def serve_cmd(models_dir, port, host, with_ui, ui_dir):
    """Start the HTTP inference service."""
    import uvicorn

    from .service import create_app

    resolved_ui = None
    if with_ui or ui_dir:
        resolved_ui = Path(ui_dir) if ui_dir else Path(__file__).resolve().parents[2] / "frontend" / "dist"
        if not resolved_ui.exists():
            raise click.ClickException(
                f"UI bundle not found at {resolved_ui}; build the frontend first"
            )
    app = create_app(models_dir=models_dir, ui_dir=resolved_ui)
    uvicorn.run(app, host=host, port=port, log_level="info")


def main() -> int:
    return cli(standalone_mode=True)


if __name__ == "__main__":
    sys.exit(main())
