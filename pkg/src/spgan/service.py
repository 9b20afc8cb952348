"""HTTP inference service: composition, synthesis and the model registry.

Transport is JSON with base64 PNG payloads under /v1/. The registry
loads every checkpoint under the models directory eagerly at startup,
verifying the sha256 sidecar first; corrupt files are excluded and
logged. Requests never mutate weights; reload is an explicit admin
endpoint guarded by a lock.

Error mapping: violated grid/shape invariants are 400 with the failed
invariant named, unknown checkpoints 404, class-count mismatches 409.
"""
from __future__ import annotations

import base64
import binascii
import logging
import threading
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import (
    ConfigurationError,
    DimensionError,
    FormatError,
    ParameterError,
    SpganError,
)
from .labelkit import (
    CompositeLabel,
    EdgeSketch,
    LabelMap,
    compose,
    decode_png,
    encode_png,
    image_to_uint8,
    make_structure_mask,
)
from .netcore import CheckpointBundle, file_checksum, load_checkpoint, verify_checkpoint_file
from .trainer import synthesize

PathLike = Union[str, Path]

log = logging.getLogger("spgan.service")


@dataclass
class ModelRegistryEntry:
    id: str
    class_names: tuple[str, ...]
    num_classes: int
    stage: str
    resolution: int
    phase: int
    path: str
    checksum: str


class ModelRegistry:
    """Immutable view over the checkpoint directory, reloaded explicitly."""

    def __init__(self, models_dir: Optional[PathLike]):
        self.models_dir = Path(models_dir) if models_dir else None
        self._lock = threading.Lock()
        self._entries: dict[str, ModelRegistryEntry] = {}
        self._bundles: dict[str, CheckpointBundle] = {}
        self.reload()

    def reload(self) -> None:
        with self._lock:
            self._entries, self._bundles = {}, {}
            if self.models_dir is None or not self.models_dir.exists():
                return
            for path in sorted(self.models_dir.glob("*.ckpt")):
                if not verify_checkpoint_file(path):
                    log.warning("excluding %s: checksum failure", path)
                    continue
                try:
                    bundle = load_checkpoint(path)
                except SpganError as exc:
                    log.warning("excluding %s: %s", path, exc)
                    continue
                gen_cfg = bundle.generator.cfg
                entry = ModelRegistryEntry(
                    id=path.stem,
                    class_names=bundle.class_names,
                    num_classes=bundle.num_classes,
                    stage=gen_cfg.stage,
                    resolution=gen_cfg.input_resolution,
                    phase=bundle.phase,
                    path=str(path),
                    checksum=file_checksum(path),
                )
                self._entries[entry.id] = entry
                self._bundles[entry.id] = bundle

    def entries(self) -> list[ModelRegistryEntry]:
        with self._lock:
            return list(self._entries.values())

    def get(self, checkpoint_id: str) -> tuple[ModelRegistryEntry, CheckpointBundle]:
        with self._lock:
            if checkpoint_id not in self._entries:
                raise KeyError(checkpoint_id)
            return self._entries[checkpoint_id], self._bundles[checkpoint_id]


class ComposeRequest(BaseModel):
    label_png: str
    sketch_png: str
    class_names: list[str]


class SynthesisRequest(BaseModel):
    checkpoint: str
    composite_png: Optional[str] = None
    grid: Optional[list[list[int]]] = None
    class_names: Optional[list[str]] = None
    seed: Optional[int] = None


def _b64_decode(data: str, what: str) -> bytes:
    try:
        return base64.b64decode(data, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise FormatError(f"{what} is not valid base64: {exc}") from exc


def _b64_png(grid: np.ndarray) -> str:
    return base64.b64encode(encode_png(grid)).decode("ascii")


def parse_sketch_grid(grid: np.ndarray) -> np.ndarray:
    """Accept {0,1} or {0,255} sketch PNGs, reject anything non-binary."""
    values = set(np.unique(grid).tolist())
    if values <= {0, 1}:
        return grid.astype(np.uint8)
    if values <= {0, 255}:
        return (grid > 0).astype(np.uint8)
    raise ParameterError(
        f"sketch grid must be binary (found values {sorted(values)[:6]})"
    )


def create_app(
    models_dir: Optional[PathLike] = None, ui_dir: Optional[PathLike] = None
) -> FastAPI:
    app = FastAPI(title="spgan inference service", version="1")
    registry = ModelRegistry(models_dir)
    app.state.registry = registry

    @app.exception_handler(SpganError)
    async def domain_error(request: Request, exc: SpganError):
        status = 409 if isinstance(exc, ConfigurationError) else 400
        return JSONResponse(
            status_code=status,
            content={"error": str(exc), "invariant": type(exc).__name__},
        )

    @app.get("/v1/healthz")
    def healthz():
        return {"status": "ok", "models": len(registry.entries())}

    @app.get("/v1/models")
    def models():
        return [asdict(e) for e in registry.entries()]

    @app.post("/v1/reload")
    def reload_models():
        registry.reload()
        return {"status": "reloaded", "models": len(registry.entries())}

    @app.post("/v1/compose")
    def compose_labels(req: ComposeRequest):
        label_grid = decode_png(_b64_decode(req.label_png, "label_png"))
        sketch_grid = decode_png(_b64_decode(req.sketch_png, "sketch_png"))
        label = LabelMap(label_grid, tuple(req.class_names))
        sketch = EdgeSketch(parse_sketch_grid(sketch_grid))
        comp = compose(label, make_structure_mask(label), sketch)
        return {
            "composite_png": _b64_png(comp.grid),
            "manifest": {"kind": "composite", "class_names": list(comp.class_names)},
        }

    @app.post("/v1/synthesize")
    def synthesize_image(req: SynthesisRequest):
        try:
            entry, bundle = registry.get(req.checkpoint)
        except KeyError:
            return JSONResponse(
                status_code=404,
                content={"error": f"unknown checkpoint {req.checkpoint!r}"},
            )
        if req.class_names is not None and len(req.class_names) != entry.num_classes:
            raise ConfigurationError(
                f"checkpoint {entry.id} was trained with {entry.num_classes} "
                f"classes, request carries {len(req.class_names)}"
            )
        if (req.composite_png is None) == (req.grid is None):
            raise ParameterError("provide exactly one of composite_png or grid")
        if req.composite_png is not None:
            grid = decode_png(_b64_decode(req.composite_png, "composite_png"))
        else:
            grid = np.asarray(req.grid, dtype=np.int64)
            if grid.ndim != 2:
                raise DimensionError("inline grid must be two-dimensional")
            if grid.size and (grid.min() < 0 or grid.max() > 255):
                raise ParameterError("inline grid values must fit uint8")
            grid = grid.astype(np.uint8)
        comp = CompositeLabel(grid, entry.class_names)
        started = time.monotonic()
        image = synthesize(bundle, comp)
        # latency budget is recorded (log only): responses must be
        # byte-identical across request permutations
        log.info(
            "synthesize %s %dpx took %.0f ms",
            entry.id, entry.resolution, (time.monotonic() - started) * 1000.0,
        )
        return {
            "image_png": _b64_png(image_to_uint8(image)),
            "checkpoint": entry.id,
            "seed": req.seed,
        }

    if ui_dir is not None and Path(ui_dir).exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
