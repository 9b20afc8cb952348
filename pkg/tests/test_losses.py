import math

import numpy as np
import pytest
import torch
from hypothesis import given, settings
from hypothesis import strategies as st

from spgan.errors import DimensionError, ParameterError
from spgan.fen import TinyFeatureNet, build_fen
from spgan.losses import (
    LossWeights,
    feature_stats,
    loss_d,
    loss_feature,
    loss_g_adv,
    loss_g_total,
    loss_l1,
)

SIGMA_HALF = 0.0  # logit of sigma = 0.5
SIGMA_QUARTER = math.log(0.25 / 0.75)  # logit of sigma = 0.25


def elementwise_adv_oracle(scores):
    """Independent numpy oracle for E[log(1 - sigma(s))] with clamping."""
    p = 1.0 / (1.0 + np.exp(-np.asarray(scores, dtype=np.float64)))
    p = np.clip(p, 1e-7, 1 - 1e-7)
    return float(np.mean(np.log(1.0 - p)))


def elementwise_real_oracle(scores):
    p = 1.0 / (1.0 + np.exp(-np.asarray(scores, dtype=np.float64)))
    p = np.clip(p, 1e-7, 1 - 1e-7)
    return float(np.mean(np.log(p)))


class TestAdversarial:
    def test_sigma_half_closed_form(self):
        scores = torch.full((1, 1, 6, 6), SIGMA_HALF)
        assert loss_g_adv(scores).item() == pytest.approx(math.log(0.5), abs=1e-6)

    def test_sigma_quarter_closed_form(self):
        scores = torch.full((1, 1, 6, 6), SIGMA_QUARTER)
        assert loss_g_adv(scores).item() == pytest.approx(math.log(0.75), abs=1e-6)

    def test_confident_fake_limit(self):
        scores = torch.full((1, 1, 4, 4), -50.0)  # sigma -> 0
        val = loss_g_adv(scores).item()
        assert -1e-6 < val <= 0.0

    def test_matches_elementwise_oracle(self):
        rng = np.random.default_rng(0)
        scores = rng.normal(0, 3, (2, 1, 5, 5))
        got = loss_g_adv(torch.tensor(scores)).item()
        assert got == pytest.approx(elementwise_adv_oracle(scores), abs=1e-6)


class TestDiscriminatorLoss:
    def test_optimal_discriminator_approaches_zero(self):
        real = torch.full((1, 1, 4, 4), 60.0)  # sigma -> 1
        fake = torch.full((1, 1, 4, 4), -60.0)  # sigma -> 0
        assert abs(loss_d(real, fake).item()) < 1e-6

    def test_sigma_half_both(self):
        s = torch.full((1, 1, 3, 3), SIGMA_HALF)
        assert loss_d(s, s).item() == pytest.approx(2 * math.log(0.5), abs=1e-6)

    def test_matches_elementwise_oracle(self):
        rng = np.random.default_rng(1)
        real = rng.normal(0, 2, (3, 1, 4, 4))
        fake = rng.normal(0, 2, (3, 1, 4, 4))
        expect = elementwise_real_oracle(real) + elementwise_adv_oracle(fake)
        got = loss_d(torch.tensor(real), torch.tensor(fake)).item()
        assert got == pytest.approx(expect, abs=1e-6)

    def test_maximum_only_at_separation(self):
        # anything short of (sigma->1, sigma->0) scores strictly below 0
        mid = torch.full((1, 1, 2, 2), 0.3)
        assert loss_d(mid, -mid).item() < -1e-3

    @given(
        st.lists(st.floats(-1e30, 1e30, allow_nan=False), min_size=1, max_size=16),
        st.lists(st.floats(-1e30, 1e30, allow_nan=False), min_size=1, max_size=16),
    )
    @settings(max_examples=50, deadline=None)
    def test_always_finite(self, real, fake):
        val = loss_d(torch.tensor(real), torch.tensor(fake))
        assert torch.isfinite(val)
        assert torch.isfinite(loss_g_adv(torch.tensor(fake)))


class TestL1:
    def test_identical_zero(self):
        y = torch.rand(1, 1, 8, 8)
        assert loss_l1(y, y).item() == 0.0

    def test_opposite_constants(self):
        y = torch.ones(1, 1, 4, 4)
        g = -torch.ones(1, 1, 4, 4)
        assert loss_l1(y, g).item() == pytest.approx(2.0)

    def test_matches_pixel_oracle(self):
        rng = np.random.default_rng(2)
        y = rng.uniform(-1, 1, (2, 1, 6, 6))
        g = rng.uniform(-1, 1, (2, 1, 6, 6))
        expect = float(np.abs(y - g).mean())
        assert loss_l1(torch.tensor(y), torch.tensor(g)).item() == pytest.approx(
            expect, abs=1e-7
        )

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            loss_l1(torch.zeros(1, 1, 4, 4), torch.zeros(1, 1, 5, 5))


class TestFeatureStats:
    def setup_method(self):
        self.fen = TinyFeatureNet(seed=0)

    def test_constant_image_zero_variance(self):
        img = torch.full((1, 1, 32, 32), 0.2)
        stats = feature_stats(img, self.fen)
        assert stats.var.abs().max().item() < 1e-10

    def test_identical_images_identical_stats(self):
        img = torch.rand(1, 1, 32, 32) * 2 - 1
        a = feature_stats(img, self.fen)
        b = feature_stats(img.clone(), self.fen)
        assert torch.equal(a.mean, b.mean) and torch.equal(a.var, b.var)

    def test_matches_two_pass_oracle(self):
        torch.manual_seed(3)
        img = torch.rand(2, 1, 32, 32) * 2 - 1
        stats = feature_stats(img, self.fen)
        fmap = self.fen.features(img).numpy().astype(np.float64)
        for b in range(2):
            for c in range(fmap.shape[1]):
                vals = fmap[b, c].ravel()
                mu = vals.sum() / vals.size  # pass 1
                var = ((vals - mu) ** 2).sum() / vals.size  # pass 2
                assert stats.mean[b, c].item() == pytest.approx(mu, abs=1e-6)
                assert stats.var[b, c].item() == pytest.approx(var, abs=1e-6)

    def test_variance_nonnegative(self):
        img = torch.rand(1, 1, 32, 32)
        assert (feature_stats(img, self.fen).var >= 0).all()


class TestFeatureLoss:
    def setup_method(self):
        self.fen = TinyFeatureNet(seed=0)

    def test_identical_zero(self):
        img = torch.rand(1, 1, 32, 32) * 2 - 1
        assert loss_feature(img, img.clone(), self.fen).item() == 0.0

    def test_constant_vs_textured_bounded_below(self):
        torch.manual_seed(4)
        real = torch.rand(1, 1, 32, 32) * 2 - 1
        fake = torch.zeros(1, 1, 32, 32)
        real_var = feature_stats(real, self.fen).var
        fake_var = feature_stats(fake, self.fen).var
        floor = (real_var - fake_var).abs().sum().item()
        got = loss_feature(real, fake, self.fen).item()
        assert got >= floor - 1e-6 > 0

    def test_symmetric(self):
        a = torch.rand(1, 1, 32, 32) * 2 - 1
        b = torch.rand(1, 1, 32, 32) * 2 - 1
        assert loss_feature(a, b, self.fen).item() == pytest.approx(
            loss_feature(b, a, self.fen).item(), abs=1e-7
        )

    def test_missing_fen_rejected(self):
        from spgan.errors import ConfigurationError

        with pytest.raises(ConfigurationError):
            feature_stats(torch.zeros(1, 1, 8, 8), None)


class TestTotal:
    def test_lambda2_zero_reduces(self):
        adv = torch.tensor(-0.5)
        l1 = torch.tensor(0.3)
        feat = torch.tensor(123.0)  # must be ignored
        w = LossWeights(lambda1=1.0, lambda2=0.0)
        assert loss_g_total(adv, l1, feat, w).item() == pytest.approx(-0.5 + 0.3)

    def test_arithmetic_example(self):
        got = loss_g_total(
            torch.tensor(-0.7),
            torch.tensor(0.1),
            torch.tensor(0.2),
            LossWeights(lambda1=1.0, lambda2=10.0),
        )
        assert got.item() == pytest.approx(1.4, abs=1e-7)

    def test_adv_only(self):
        got = loss_g_total(
            torch.tensor(-0.9),
            torch.tensor(5.0),
            torch.tensor(5.0),
            LossWeights(lambda1=0.0, lambda2=0.0),
        )
        assert got.item() == pytest.approx(-0.9)

    def test_negative_weights_rejected(self):
        with pytest.raises(ParameterError):
            LossWeights(lambda1=-1.0)


class TestFenRegistry:
    def test_tiny_deterministic(self):
        a = build_fen("tiny", seed=5)
        b = build_fen("tiny", seed=5)
        img = torch.rand(1, 1, 32, 32)
        assert torch.equal(a.features(img), b.features(img))

    def test_tiny_frozen(self):
        fen = build_fen("tiny")
        assert all(not p.requires_grad for p in fen.parameters())

    def test_gradients_flow_through(self):
        fen = build_fen("tiny")
        img = torch.rand(1, 1, 32, 32, requires_grad=True)
        loss_feature(torch.rand(1, 1, 32, 32), img, fen).backward()
        assert img.grad is not None and img.grad.abs().sum() > 0

    def test_unknown_backend(self):
        with pytest.raises(ParameterError):
            build_fen("vgg19")

    def test_taps_are_multi_layer(self):
        fen = build_fen("tiny")
        taps = fen.taps(torch.rand(1, 1, 32, 32))
        assert len(taps) == 4
        assert taps[0].shape[-1] > taps[-1].shape[-1]
