import base64
import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from spgan.cli import cli
from spgan.datagen import iter_pairs
from spgan.labelkit import (
    encode_png,
    extract_sketch,
    load_composite,
    load_label,
    load_sketch,
    save_sketch,
)
from spgan.service import create_app


@pytest.fixture()
def runner():
    return CliRunner()


class TestBasics:
    def test_help_exits_zero(self, runner):
        assert runner.invoke(cli, ["compose", "--help"]).exit_code == 0
        assert runner.invoke(cli, ["--help"]).exit_code == 0

    def test_unknown_subcommand_exits_two(self, runner):
        assert runner.invoke(cli, ["frobnicate"]).exit_code == 2

    def test_missing_required_flag_exits_two(self, runner):
        assert runner.invoke(cli, ["compose"]).exit_code == 2

    def test_domain_error_exits_one(self, runner, tmp_path):
        (tmp_path / "junk.png").write_bytes(b"not a png")
        (tmp_path / "junk.json").write_text('{"kind": "label", "class_names": ["a","b"]}')
        result = runner.invoke(
            cli,
            ["compose", "--label", str(tmp_path / "junk.png"),
             "--sketch", str(tmp_path / "junk.png"), "--out", str(tmp_path / "o.png")],
        )
        assert result.exit_code == 1


class TestDatagen:
    def test_generates_corpus_and_manifest(self, runner, tmp_path):
        out = tmp_path / "corpus"
        result = runner.invoke(
            cli, ["datagen", "--out", str(out), "--count", "2", "--resolution", "64"]
        )
        assert result.exit_code == 0, result.output
        assert (out / "manifest.json").exists()
        assert (out / "run_manifest.json").exists()
        manifest = json.loads((out / "run_manifest.json").read_text())
        assert manifest["command"] == "datagen"
        assert manifest["params"]["count"] == 2
        assert "revision" in manifest


class TestPipelineFlow:
    def test_sketch_compose_edit_flow(self, runner, tmp_path, micro_corpus):
        label, image, entry = next(iter_pairs(micro_corpus))
        label_path = Path(micro_corpus) / entry["label"]
        image_path = Path(micro_corpus) / entry["image"]

        sketch_path = tmp_path / "sketch.png"
        result = runner.invoke(
            cli, ["sketch", "--image", str(image_path), "--out", str(sketch_path)]
        )
        assert result.exit_code == 0, result.output
        sk = load_sketch(sketch_path)
        assert set(np.unique(sk.grid)) <= {0, 1}

        comp_path = tmp_path / "comp.png"
        result = runner.invoke(
            cli,
            ["compose", "--label", str(label_path), "--sketch", str(sketch_path),
             "--out", str(comp_path)],
        )
        assert result.exit_code == 0, result.output
        comp = load_composite(comp_path)
        inside = label.grid > 0
        assert (comp.grid[inside] == label.grid[inside]).all()

        edited_path = tmp_path / "edited.png"
        result = runner.invoke(
            cli,
            ["edit", "--target", str(label_path), "--out", str(edited_path),
             "--kind", "translate", "--target-class", "1", "--offset", "3,-2"],
        )
        assert result.exit_code == 0, result.output
        edited = load_label(edited_path)
        assert edited.grid.shape == label.grid.shape

    def test_synth_matches_library(self, runner, tmp_path, micro_run):
        from spgan.labelkit import compose as compose_fn
        from spgan.labelkit import make_structure_mask, save_composite
        from spgan.trainer import synthesize

        label, image, _ = next(iter_pairs(micro_run["corpus"]))
        comp = compose_fn(label, make_structure_mask(label), extract_sketch(image))
        comp_path = tmp_path / "comp.png"
        save_composite(comp, comp_path)
        ckpt = micro_run["result"]["final"]
        out_path = tmp_path / "synth.png"
        result = runner.invoke(
            cli,
            ["synth", "--checkpoint", ckpt, "--composite", str(comp_path),
             "--out", str(out_path)],
        )
        assert result.exit_code == 0, result.output
        from spgan.labelkit import image_to_uint8, load_image

        expect = synthesize(ckpt, comp)
        got = load_image(out_path)
        assert np.array_equal(image_to_uint8(got), image_to_uint8(expect))

    def test_eval_writes_report(self, runner, tmp_path, micro_corpus):
        from spgan.labelkit import save_image

        real = tmp_path / "real"
        fake = tmp_path / "fake"
        for i, (_, image, _) in enumerate(iter_pairs(micro_corpus)):
            save_image(image, real / f"p{i}.png")
            save_image(np.clip(image + 0.05, -1, 1), fake / f"p{i}.png")
        report_path = tmp_path / "report.json"
        result = runner.invoke(
            cli,
            ["eval", "--real", str(real), "--fake", str(fake),
             "--report", str(report_path), "--csv", str(tmp_path / "report.csv")],
        )
        assert result.exit_code == 0, result.output
        report = json.loads(report_path.read_text())
        for key in ("fid", "kid_x100", "ms_ssim", "lpips"):
            assert key in report
        header = (tmp_path / "report.csv").read_text().splitlines()[0]
        assert header == "fid,kid_x100,ms_ssim,lpips"


class TestCrossInterfaceEquality:
    def test_compose_bytes_match_service(self, runner, tmp_path, micro_corpus):
        label, image, entry = next(iter_pairs(micro_corpus))
        label_path = Path(micro_corpus) / entry["label"]
        sketch = extract_sketch(image)
        sketch_path = tmp_path / "sketch.png"
        save_sketch(sketch, sketch_path)

        comp_path = tmp_path / "comp.png"
        result = runner.invoke(
            cli,
            ["compose", "--label", str(label_path), "--sketch", str(sketch_path),
             "--out", str(comp_path)],
        )
        assert result.exit_code == 0, result.output
        cli_bytes = comp_path.read_bytes()

        app = create_app(models_dir=None)
        with TestClient(app) as client:
            resp = client.post(
                "/v1/compose",
                json={
                    "label_png": base64.b64encode(encode_png(label.grid)).decode(),
                    "sketch_png": base64.b64encode(encode_png(sketch.grid)).decode(),
                    "class_names": list(label.class_names),
                },
            )
        service_bytes = base64.b64decode(resp.json()["composite_png"])
        assert cli_bytes == service_bytes

    def test_synth_bytes_match_service(self, runner, tmp_path, micro_run):
        from spgan.labelkit import compose as compose_fn
        from spgan.labelkit import make_structure_mask, save_composite

        label, image, _ = next(iter_pairs(micro_run["corpus"]))
        comp = compose_fn(label, make_structure_mask(label), extract_sketch(image))
        comp_path = tmp_path / "comp.png"
        save_composite(comp, comp_path)
        out_path = tmp_path / "synth.png"
        result = runner.invoke(
            cli,
            ["synth", "--checkpoint", micro_run["result"]["final"],
             "--composite", str(comp_path), "--out", str(out_path)],
        )
        assert result.exit_code == 0, result.output

        app = create_app(models_dir=micro_run["out"])
        with TestClient(app) as client:
            resp = client.post(
                "/v1/synthesize",
                json={
                    "checkpoint": "phase4",
                    "composite_png": base64.b64encode(encode_png(comp.grid)).decode(),
                },
            )
        service_bytes = base64.b64decode(resp.json()["image_png"])
        assert out_path.read_bytes() == service_bytes


class TestManifests:
    def test_every_artifact_command_writes_manifest(self, runner, tmp_path, micro_corpus):
        label, image, entry = next(iter_pairs(micro_corpus))
        image_path = Path(micro_corpus) / entry["image"]
        out = tmp_path / "s.png"
        runner.invoke(cli, ["sketch", "--image", str(image_path), "--out", str(out)])
        manifest = json.loads((tmp_path / "s.png.manifest.json").read_text())
        assert manifest["command"] == "sketch"
        assert manifest["params"]["image"] == str(image_path)
        assert manifest["version"]
