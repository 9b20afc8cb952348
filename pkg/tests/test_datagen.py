import numpy as np
import pytest

from spgan.datagen import (
    PhantomSpec,
    generate_corpus,
    generate_phantom,
    iter_pairs,
    load_manifest,
)
from spgan.errors import DataError, ParameterError


class TestGeneratePhantom:
    def test_same_seed_identical(self):
        spec = PhantomSpec(seed=42, resolution=64)
        l1, i1 = generate_phantom(spec)
        l2, i2 = generate_phantom(spec)
        assert (l1.grid == l2.grid).all()
        assert (i1 == i2).all()

    def test_zero_structures(self):
        label, image = generate_phantom(PhantomSpec(seed=1, resolution=64, num_structures=0))
        assert label.grid.sum() == 0
        assert image.std() > 0.01  # pure speckle, not flat

    def test_image_range(self):
        for seed in range(20):
            _, image = generate_phantom(PhantomSpec(seed=seed, resolution=64))
            assert image.min() >= -1.0 and image.max() <= 1.0

    def test_resolution_must_be_multiple_of_64(self):
        with pytest.raises(ParameterError):
            PhantomSpec(seed=0, resolution=100)

    def test_too_many_structures(self):
        with pytest.raises(ParameterError):
            PhantomSpec(seed=0, num_structures=5)

    def test_class_mean_ordering_matches_contrast(self):
        # contrast (+0.30, -0.18): class1 brighter than background,
        # class2 darker; aggregate over many seeded phantoms
        sums = np.zeros(3)
        counts = np.zeros(3)
        for seed in range(1000):
            label, image = generate_phantom(
                PhantomSpec(seed=seed, resolution=64, num_structures=2)
            )
            for c in range(3):
                sel = label.grid == c
                sums[c] += image[sel].sum()
                counts[c] += sel.sum()
        means = sums / counts
        assert means[1] > means[0] > means[2]


class TestCorpus:
    def test_single_entry(self, tmp_path):
        manifest = generate_corpus(1, PhantomSpec(seed=5, resolution=64), tmp_path)
        assert len(manifest["entries"]) == 1
        pairs = list(iter_pairs(tmp_path))
        assert len(pairs) == 1

    def test_eight_distinct_phantoms(self, tmp_path):
        generate_corpus(8, PhantomSpec(seed=100, resolution=64), tmp_path)
        labels = [label.grid for label, _, _ in iter_pairs(tmp_path)]
        for i in range(8):
            for j in range(i + 1, 8):
                assert (labels[i] != labels[j]).sum() > 0

    def test_rerun_byte_identical(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        generate_corpus(3, PhantomSpec(seed=7, resolution=64), a)
        generate_corpus(3, PhantomSpec(seed=7, resolution=64), b)
        for rel in sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file()):
            assert (a / rel).read_bytes() == (b / rel).read_bytes(), rel

    def test_bad_count(self, tmp_path):
        with pytest.raises(ParameterError):
            generate_corpus(0, PhantomSpec(), tmp_path)

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(DataError):
            load_manifest(tmp_path)

    def test_loaded_images_in_range(self, tmp_path):
        generate_corpus(2, PhantomSpec(seed=3, resolution=64), tmp_path)
        for _, image, _ in iter_pairs(tmp_path):
            assert image.min() >= -1.0 and image.max() <= 1.0
