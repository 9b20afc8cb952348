import base64
import json
import shutil

import numpy as np
import pytest
from fastapi.testclient import TestClient

from spgan.datagen import iter_pairs
from spgan.labelkit import (
    EditOp,
    apply_edit,
    compose,
    decode_png,
    encode_png,
    extract_sketch,
    make_structure_mask,
    uint8_to_image,
)
from spgan.service import create_app


def b64(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


@pytest.fixture(scope="module")
def served(micro_run):
    app = create_app(models_dir=micro_run["out"])
    with TestClient(app) as client:
        yield client, micro_run


@pytest.fixture(scope="module")
def sample(micro_run):
    label, image, _ = next(iter_pairs(micro_run["corpus"]))
    sketch = extract_sketch(image)
    return label, sketch, image


class TestHealthAndModels:
    def test_healthz(self, served):
        client, _ = served
        resp = client.get("/v1/healthz")
        assert resp.status_code == 200
        assert resp.json()["status"] == "ok"

    def test_models_listed_with_metadata(self, served):
        client, _ = served
        entries = client.get("/v1/models").json()
        ids = {e["id"] for e in entries}
        assert {"phase1", "phase2", "phase3", "phase4"} <= ids
        phase4 = next(e for e in entries if e["id"] == "phase4")
        assert phase4["stage"] == "high"
        assert phase4["resolution"] == 128
        assert phase4["num_classes"] == 3
        assert len(phase4["checksum"]) == 64

    def test_empty_registry(self, tmp_path):
        app = create_app(models_dir=tmp_path)
        with TestClient(app) as client:
            assert client.get("/v1/models").json() == []

    def test_corrupted_checkpoint_excluded(self, micro_run, tmp_path):
        models = tmp_path / "models"
        models.mkdir()
        src = micro_run["result"]["checkpoints"][4]
        shutil.copy(src, models / "good.ckpt")
        shutil.copy(src + ".sha256", models / "good.ckpt.sha256")
        data = (models / "good.ckpt").read_bytes()
        (models / "bad.ckpt").write_bytes(data[: len(data) // 2])
        (models / "bad.ckpt.sha256").write_text("0" * 64 + "\n")
        app = create_app(models_dir=models)
        with TestClient(app) as client:
            ids = {e["id"] for e in client.get("/v1/models").json()}
        assert ids == {"good"}


class TestCompose:
    def test_valid_pair(self, served, sample):
        client, _ = served
        label, sketch, _ = sample
        resp = client.post(
            "/v1/compose",
            json={
                "label_png": b64(encode_png(label.grid)),
                "sketch_png": b64(encode_png(sketch.grid)),
                "class_names": list(label.class_names),
            },
        )
        assert resp.status_code == 200
        grid = decode_png(base64.b64decode(resp.json()["composite_png"]))
        inside = label.grid > 0
        assert (grid[inside] == label.grid[inside]).all()
        outside = ~inside
        assert set(np.unique(grid[outside])) <= {0, label.num_classes}

    def test_dimension_mismatch_400(self, served, sample):
        client, _ = served
        label, sketch, _ = sample
        resp = client.post(
            "/v1/compose",
            json={
                "label_png": b64(encode_png(label.grid)),
                "sketch_png": b64(encode_png(sketch.grid[:64, :64])),
                "class_names": list(label.class_names),
            },
        )
        assert resp.status_code == 400
        assert "shape" in resp.json()["error"] or "Dimension" in resp.json()["invariant"]

    def test_nonbinary_sketch_400(self, served, sample):
        client, _ = served
        label, _, _ = sample
        junk = np.full_like(label.grid, 7)
        resp = client.post(
            "/v1/compose",
            json={
                "label_png": b64(encode_png(label.grid)),
                "sketch_png": b64(encode_png(junk)),
                "class_names": list(label.class_names),
            },
        )
        assert resp.status_code == 400
        assert "binary" in resp.json()["error"]

    def test_bad_base64_400(self, served, sample):
        client, _ = served
        label, _, _ = sample
        resp = client.post(
            "/v1/compose",
            json={
                "label_png": "@@not-base64@@",
                "sketch_png": b64(encode_png(label.grid)),
                "class_names": list(label.class_names),
            },
        )
        assert resp.status_code == 400

    def test_sketch_255_convention_accepted(self, served, sample):
        client, _ = served
        label, sketch, _ = sample
        resp = client.post(
            "/v1/compose",
            json={
                "label_png": b64(encode_png(label.grid)),
                "sketch_png": b64(encode_png(sketch.grid * 255)),
                "class_names": list(label.class_names),
            },
        )
        assert resp.status_code == 200


class TestSynthesize:
    def composite_png(self, sample):
        label, sketch, _ = sample
        comp = compose(label, make_structure_mask(label), sketch)
        return comp, b64(encode_png(comp.grid))

    def test_basic_synthesis(self, served, sample):
        client, _ = served
        _, png = self.composite_png(sample)
        resp = client.post(
            "/v1/synthesize", json={"checkpoint": "phase4", "composite_png": png}
        )
        assert resp.status_code == 200
        img = uint8_to_image(decode_png(base64.b64decode(resp.json()["image_png"])))
        assert img.shape == (128, 128)
        assert img.min() >= -1.0 and img.max() <= 1.0

    def test_deterministic_bytes(self, served, sample):
        client, _ = served
        _, png = self.composite_png(sample)
        body = {"checkpoint": "phase4", "composite_png": png}
        a = client.post("/v1/synthesize", json=body).json()["image_png"]
        b = client.post("/v1/synthesize", json=body).json()["image_png"]
        assert a == b

    def test_unknown_checkpoint_404(self, served, sample):
        client, _ = served
        _, png = self.composite_png(sample)
        resp = client.post(
            "/v1/synthesize", json={"checkpoint": "nonexistent", "composite_png": png}
        )
        assert resp.status_code == 404

    def test_class_count_mismatch_409(self, served, sample):
        client, _ = served
        _, png = self.composite_png(sample)
        resp = client.post(
            "/v1/synthesize",
            json={
                "checkpoint": "phase4",
                "composite_png": png,
                "class_names": ["a", "b", "c", "d", "e"],
            },
        )
        assert resp.status_code == 409

    def test_edit_changes_output_in_region(self, served, sample):
        client, _ = served
        label, sketch, _ = sample
        comp = compose(label, make_structure_mask(label), sketch)
        cls = int(label.grid.max())
        edited_label = apply_edit(label, EditOp("dilate", target_class=cls, radius=3))
        edited = compose(edited_label, make_structure_mask(edited_label), sketch)

        def synth(grid):
            resp = client.post(
                "/v1/synthesize",
                json={"checkpoint": "phase4", "composite_png": b64(encode_png(grid))},
            )
            assert resp.status_code == 200
            return uint8_to_image(decode_png(base64.b64decode(resp.json()["image_png"])))

        base_img = synth(comp.grid)
        edit_img = synth(edited.grid)
        region = (edited_label.grid == cls) | (label.grid == cls)
        assert np.abs(base_img - edit_img)[region].max() > 0

    def test_inline_grid_accepted(self, served, sample):
        client, _ = served
        comp, _ = self.composite_png(sample)
        resp = client.post(
            "/v1/synthesize",
            json={"checkpoint": "phase4", "grid": comp.grid.tolist()},
        )
        assert resp.status_code == 200

    def test_both_payloads_rejected(self, served, sample):
        client, _ = served
        comp, png = self.composite_png(sample)
        resp = client.post(
            "/v1/synthesize",
            json={"checkpoint": "phase4", "composite_png": png, "grid": comp.grid.tolist()},
        )
        assert resp.status_code == 400


class TestStatelessness:
    def test_request_order_independent(self, served, sample):
        client, _ = served
        label, sketch, _ = sample
        compose_body = {
            "label_png": b64(encode_png(label.grid)),
            "sketch_png": b64(encode_png(sketch.grid)),
            "class_names": list(label.class_names),
        }
        comp = compose(label, make_structure_mask(label), sketch)
        synth_body = {"checkpoint": "phase4", "composite_png": b64(encode_png(comp.grid))}
        first = (
            client.post("/v1/compose", json=compose_body).json(),
            client.post("/v1/synthesize", json=synth_body).json(),
        )
        second = (
            client.post("/v1/synthesize", json=synth_body).json(),
            client.post("/v1/compose", json=compose_body).json(),
        )
        assert first[0] == second[1]
        assert first[1] == second[0]

    def test_reload_endpoint(self, served):
        client, _ = served
        resp = client.post("/v1/reload")
        assert resp.status_code == 200
        assert resp.json()["models"] >= 4
