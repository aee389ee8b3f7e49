import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aitvseg.metrics import dice, match_labels, psnr
from aitvseg.pipeline import MultiChannelImage


def half_overlap_fixture():
    """Truth region of 4 pixels; prediction of size 4 overlapping 2 of them."""
    truth = np.ones((4, 4), dtype=int)
    truth[0, 0:4] = 2
    pred = np.ones((4, 4), dtype=int)
    pred[0, 2:4] = 2
    pred[1, 0:2] = 2
    return truth, pred


class TestDice:
    def test_identical_maps_score_one(self):
        labels = np.array([[1, 2, 2], [3, 3, 1]])
        result = dice(labels, labels)
        assert result.per_label == (1.0, 1.0, 1.0)
        assert result.mean == 1.0

    def test_disjoint_supports_score_zero(self):
        truth = np.array([[2, 2, 1, 1]])
        pred = np.array([[1, 1, 2, 2]])
        # maximum-overlap matching pairs the swapped labels; force the
        # disjoint comparison with maps whose regions cannot align
        result = dice(truth, pred)
        assert result.mean == 1.0  # matching undoes the pure relabel
        anti = np.array([[1, 2, 1, 2]])
        assert dice(np.array([[1, 1, 2, 2]]), anti).mean == pytest.approx(0.5)

    def test_half_overlap_is_one_half(self):
        truth, pred = half_overlap_fixture()
        result = dice(truth, pred)
        assert result.per_label[1] == 0.5

    def test_relabeling_invariance(self, rng):
        truth = rng.integers(1, 4, size=(16, 16))
        truth[:3, 0] = [1, 2, 3]  # keep all labels present
        pred = rng.integers(1, 4, size=(16, 16))
        pred[:3, 0] = [1, 2, 3]
        base = dice(truth, pred)
        perm = np.array([3, 1, 2])
        relabeled = perm[pred - 1]
        assert dice(truth, relabeled).mean == pytest.approx(base.mean, abs=1e-12)

    def test_symmetry_after_matching(self, rng):
        truth = rng.integers(1, 4, size=(16, 16))
        truth[:3, 0] = [1, 2, 3]
        pred = rng.integers(1, 4, size=(16, 16))
        pred[:3, 0] = [1, 2, 3]
        assert dice(truth, pred).mean == pytest.approx(dice(pred, truth).mean, abs=1e-12)

    def test_scores_stay_in_unit_interval(self, rng):
        for _ in range(20):
            truth = rng.integers(1, 5, size=(12, 12))
            truth[:4, 0] = [1, 2, 3, 4]
            pred = rng.integers(1, 5, size=(12, 12))
            pred[:4, 0] = [1, 2, 3, 4]
            result = dice(truth, pred)
            assert all(0.0 <= v <= 1.0 for v in result.per_label)

    def test_unmatched_truth_label_scores_zero(self):
        truth = np.array([[1, 2], [3, 1]])
        pred = np.array([[1, 2], [2, 1]])
        result = dice(truth, pred)
        assert len(result.per_label) == 3
        assert min(result.per_label) == 0.0

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError, match="mismatch"):
            dice(np.ones((2, 2), dtype=int), np.ones((3, 3), dtype=int))

    def test_sparse_labels_rejected(self):
        bad = np.array([[1, 3], [3, 1]])  # label 2 missing
        with pytest.raises(ValueError, match="dense"):
            dice(bad, bad)

    def test_match_labels_identity_on_equal_maps(self):
        labels = np.array([[1, 2], [3, 1]])
        assert match_labels(labels, labels) == {1: 1, 2: 2, 3: 3}


class TestPsnr:
    def test_identical_images_give_infinity(self, rng):
        image = MultiChannelImage.grayscale(rng.random((8, 8)))
        assert math.isinf(psnr(image, image))

    def test_uniform_error_point_one_gives_twenty_db(self):
        a = MultiChannelImage.grayscale(np.full((10, 10), 0.5))
        b = MultiChannelImage.grayscale(np.full((10, 10), 0.6))
        assert psnr(a, b) == pytest.approx(20.0, abs=1e-12)

    def test_halving_errors_gains_six_db(self, rng):
        base = rng.random((6, 6))
        err = rng.random((6, 6)) * 0.1
        a = MultiChannelImage.grayscale(base)
        full = MultiChannelImage.grayscale(base + err)
        half = MultiChannelImage.grayscale(base + err / 2)
        assert psnr(a, half) - psnr(a, full) == pytest.approx(20 * math.log10(2), abs=1e-9)

    def test_channel_permutation_invariance(self, rng):
        ref = rng.random((3, 5, 5))
        out = rng.random((3, 5, 5))
        direct = psnr(MultiChannelImage.rgb(ref), MultiChannelImage.rgb(out))
        perm = [2, 0, 1]
        swapped = psnr(
            MultiChannelImage.rgb(ref[perm]), MultiChannelImage.rgb(out[perm])
        )
        assert direct == pytest.approx(swapped, abs=1e-12)

    def test_shape_mismatch_rejected(self):
        a = MultiChannelImage.grayscale(np.zeros((4, 4)))
        b = MultiChannelImage.grayscale(np.zeros((5, 5)))
        with pytest.raises(ValueError, match="mismatch"):
            psnr(a, b)

    @settings(max_examples=50, deadline=None)
    @given(level=st.floats(0.01, 0.99))
    def test_known_uniform_error_formula(self, level):
        a = MultiChannelImage.grayscale(np.zeros((4, 4)))
        b = MultiChannelImage.grayscale(np.full((4, 4), level))
        assert psnr(a, b) == pytest.approx(-20 * math.log10(level), abs=1e-9)
