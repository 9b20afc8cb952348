"""Segmentation benchmark: train a small U-Net under an augmentation
policy and report per-class overlap on a held-out test split.

The split is deterministic: the last 20% of corpus entries (by manifest
order) are the test set; the training pool is subsampled to the requested
fraction through a seeded permutation. Augmented samples are logged by
path so the report can prove the test split was never touched.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Union

import numpy as np
import torch
from torch import nn

from ..datagen import load_manifest
from ..errors import ParameterError
from ..labelkit import extract_sketch, load_image, load_label
from ..metrics import dice_per_class
from ..netcore import load_checkpoint
from .policy import AugPolicy, fires, gan_augment, traditional_augment
from .unet import SmallUNet

PathLike = Union[str, Path]

TEST_FRACTION = 0.2


@dataclass
class SegRunReport:
    policy_mode: str
    fraction: float
    seed: int
    dice: dict[str, float]
    train_count: int
    test_count: int
    train_paths: list[str]
    test_paths: list[str]
    augmented_paths: list[str]
    audit_clean: bool
    epochs: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    def save(self, path: PathLike) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json() + "\n")
        return path


def split_corpus(entries: list[dict]) -> tuple[list[dict], list[dict]]:
    """Deterministic train-pool/test split: last 20% of entries test."""
    n_test = max(1, math.ceil(TEST_FRACTION * len(entries)))
    return entries[:-n_test], entries[-n_test:]


def run_seg_experiment(
    corpus_dir: PathLike,
    policy: AugPolicy,
    fraction: float = 1.0,
    seed: int = 0,
    epochs: int = 40,
    lr: float = 1e-3,
    batch_size: int = 4,
) -> SegRunReport:
    if not 0.0 < fraction <= 1.0:
        raise ParameterError(f"fraction must be in (0, 1], got {fraction}")
    root = Path(corpus_dir)
    manifest = load_manifest(root)
    class_names = tuple(manifest["class_names"])
    num_classes = len(class_names)

    pool, test_entries = split_corpus(manifest["entries"])
    take = math.ceil(fraction * len(pool))
    order = np.random.default_rng(seed).permutation(len(pool))
    train_entries = [pool[i] for i in sorted(order[:take])]

    def load_pair(entry):
        label = load_label(root / entry["label"])
        image = load_image(root / entry["image"])
        return image, label

    train_pairs = [load_pair(e) for e in train_entries]
    test_pairs = [load_pair(e) for e in test_entries]

    bundle = None
    if policy.mode == "trad_gan":
        bundle = load_checkpoint(policy.checkpoint, expected_num_classes=num_classes)
        sketches = [extract_sketch(img) for img, _ in train_pairs]

    torch.manual_seed(seed)
    net = SmallUNet(num_classes)
    opt = torch.optim.Adam(net.parameters(), lr=lr)
    ce = nn.CrossEntropyLoss()
    augmented: list[str] = []

    net.train()
    for epoch in range(epochs):
        rng_epoch = np.random.default_rng((seed, epoch))
        order = rng_epoch.permutation(len(train_pairs))
        for start in range(0, len(order), batch_size):
            imgs, labs = [], []
            for j in order[start : start + batch_size]:
                image, label = train_pairs[j]
                if policy.mode != "none" and fires(policy, rng_epoch):
                    augmented.append(train_entries[j]["image"])
                    use_gan = policy.mode == "trad_gan" and rng_epoch.random() < 0.5
                    if use_gan:
                        image, label = gan_augment(
                            label, sketches[j], policy, bundle, rng_epoch
                        )
                    else:
                        forced = AugPolicy(
                            mode="trad", probability=1.0, checkpoint=None
                        )
                        image, label = traditional_augment(
                            image, label, rng_epoch, forced
                        )
                imgs.append(torch.from_numpy(np.asarray(image, dtype=np.float32)))
                labs.append(torch.from_numpy(label.grid.astype(np.int64)))
            x = torch.stack(imgs)[:, None]
            t = torch.stack(labs)
            opt.zero_grad()
            loss = ce(net(x), t)
            loss.backward()
            opt.step()

    net.eval()
    per_class_scores: dict[int, list[float]] = {c: [] for c in range(1, num_classes)}
    with torch.no_grad():
        for image, label in test_pairs:
            x = torch.from_numpy(np.asarray(image, dtype=np.float32))[None, None]
            pred = net(x).argmax(dim=1)[0].numpy()
            for c, val in dice_per_class(pred, label.grid, num_classes).items():
                per_class_scores[c].append(val)
    dice_values = {
        class_names[c]: float(np.mean(vals)) for c, vals in per_class_scores.items()
    }

    test_paths = [e["image"] for e in test_entries]
    audit_clean = not (set(augmented) & set(test_paths)) and not (
        {e["image"] for e in train_entries} & set(test_paths)
    )
    return SegRunReport(
        policy_mode=policy.mode,
        fraction=fraction,
        seed=seed,
        dice=dice_values,
        train_count=len(train_entries),
        test_count=len(test_entries),
        train_paths=[e["image"] for e in train_entries],
        test_paths=test_paths,
        augmented_paths=sorted(set(augmented)),
        audit_clean=audit_clean,
        epochs=epochs,
    )
