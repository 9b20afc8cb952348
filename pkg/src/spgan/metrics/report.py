"""Aggregate metric reports over real/generated image directories."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from ..errors import DataError
from ..fen import build_fen
from ..labelkit import load_image
from .embed import embed_images
from .fid import fid
from .kid import kid_x100
from .lpips import lpips
from .msssim import max_scales, ms_ssim

PathLike = Union[str, Path]

CSV_COLUMNS = ("fid", "kid_x100", "ms_ssim", "lpips")  # table column order


@dataclass
class MetricReport:
    fid: float
    kid_x100: float
    ms_ssim: float
    lpips: float
    count: int
    extractor: str
    msssim_scales: int
    per_pair: list[dict] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not 0.0 <= self.ms_ssim <= 1.0:
            raise DataError(f"ms_ssim {self.ms_ssim} escaped [0, 1]")
        if self.fid < 0:
            raise DataError(f"fid {self.fid} escaped [0, inf)")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(CSV_COLUMNS)
        writer.writerow([f"{getattr(self, c):.6f}" for c in CSV_COLUMNS])
        return buf.getvalue()


def _load_dir(path: Path) -> dict[str, np.ndarray]:
    files = sorted(p for p in path.glob("*.png"))
    if not files:
        raise DataError(f"no PNG images under {path}")
    return {p.stem: load_image(p) for p in files}


def evaluate_dirs(
    real_dir: PathLike,
    fake_dir: PathLike,
    backend: str = "tiny",
    keep_pairs: bool = False,
) -> MetricReport:
    """Compute the four table metrics between two image directories.

    Distribution metrics use all images of each side; the paired metrics
    match files by name and skip unmatched ones.
    """
    real = _load_dir(Path(real_dir))
    fake = _load_dir(Path(fake_dir))
    shared = sorted(set(real) & set(fake))
    if not shared:
        raise DataError("no filenames shared between the two directories")

    feats_real = embed_images(list(real.values()), backend=backend)
    feats_fake = embed_images(list(fake.values()), backend=backend)
    fid_val = fid(feats_real.vectors, feats_fake.vectors)
    kid_val = kid_x100(feats_real.vectors, feats_fake.vectors)

    fen = build_fen(backend if backend != "inception" else "tiny")
    scales = min(max_scales(next(iter(real.values())).shape), 5)
    pairs = []
    for name in shared:
        pairs.append(
            {
                "name": name,
                "ms_ssim": ms_ssim(real[name], fake[name], scales=scales),
                "lpips": lpips(real[name], fake[name], fen=fen),
            }
        )
    report = MetricReport(
        fid=fid_val,
        kid_x100=kid_val,
        ms_ssim=float(np.mean([p["ms_ssim"] for p in pairs])),
        lpips=float(np.mean([p["lpips"] for p in pairs])),
        count=len(pairs),
        extractor=backend,
        msssim_scales=scales,
        per_pair=pairs if keep_pairs else [],
    )
    return report
