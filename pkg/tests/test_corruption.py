import math

import numpy as np
import pytest

from aitvseg.corruption import (
    NoiseSpec,
    add_noise,
    make_average_kernel,
    make_motion_kernel,
)
from aitvseg.grids import convolve_periodic
from aitvseg.pipeline import MultiChannelImage


class TestAverageKernel:
    def test_size_one_is_identity(self):
        k = make_average_kernel(1)
        assert k.taps.shape == (1, 1)
        assert k.taps[0, 0] == 1.0

    def test_size_fifteen_uniform_taps(self):
        k = make_average_kernel(15)
        assert k.taps.shape == (15, 15)
        assert np.all(k.taps == 1.0 / 225.0)
        assert k.anchor == (7, 7)

    def test_weights_sum_to_one_exactly(self):
        # exact accumulation of the taps rounds to 1.0 for the sizes in use
        for size in (1, 3, 5, 15):
            assert make_average_kernel(size).weight_total() == 1.0

    def test_weight_total_within_one_ulp_generally(self):
        for size in (7, 9, 11, 13, 21):
            assert abs(make_average_kernel(size).weight_total() - 1.0) <= 2.3e-16

    @pytest.mark.parametrize("size", [0, 2, 4, -3])
    def test_even_or_nonpositive_size_rejected(self, size):
        with pytest.raises(ValueError, match="odd"):
            make_average_kernel(size)


class TestMotionKernel:
    def test_length_one_is_identity(self):
        k = make_motion_kernel(1, 37.0)
        assert k.taps.shape == (1, 1)
        assert k.taps[0, 0] == 1.0

    def test_horizontal_five(self):
        k = make_motion_kernel(5, 0.0)
        assert k.taps.shape == (1, 5)
        assert np.all(k.taps == 0.2)
        assert k.anchor == (0, 2)

    def test_vertical_equals_horizontal_transposed(self):
        horizontal = make_motion_kernel(5, 0.0)
        vertical = make_motion_kernel(5, 90.0)
        assert np.array_equal(vertical.taps, horizontal.taps.T)

    @pytest.mark.parametrize("length,angle", [(5, 45.0), (7, 30.0), (4, 0.0), (9, 135.0)])
    def test_weights_normalized(self, length, angle):
        k = make_motion_kernel(length, angle)
        assert abs(k.taps.sum() - 1.0) <= 1e-12
        assert k.taps.min() >= 0.0

    def test_nonpositive_length_rejected(self):
        with pytest.raises(ValueError, match="length"):
            make_motion_kernel(0, 0.0)

    def test_diagonal_kernel_is_diagonal(self):
        k = make_motion_kernel(5, 45.0)
        assert k.taps.shape[0] == k.taps.shape[1]
        # mass concentrates on the anti-diagonal (up-right direction)
        assert np.flipud(k.taps).trace() == pytest.approx(1.0, abs=1e-9)


class TestNoiseSpec:
    def test_fraction_range_enforced(self):
        with pytest.raises(ValueError):
            NoiseSpec(kind="salt_pepper", fraction=1.5)

    def test_variance_sign_enforced(self):
        with pytest.raises(ValueError):
            NoiseSpec(kind="gaussian", variance=-1.0)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            NoiseSpec(kind="poisson")


class TestAddNoise:
    def test_zero_fraction_is_identity(self, rng):
        image = MultiChannelImage.grayscale(rng.random((32, 32)))
        for kind in ("salt_pepper", "random_valued"):
            out = add_noise(image, NoiseSpec(kind=kind, fraction=0.0, seed=1))
            assert np.array_equal(out.channels, image.channels)

    def test_full_fraction_salt_pepper_is_binary(self, rng):
        image = MultiChannelImage.grayscale(rng.random((32, 32)))
        out = add_noise(image, NoiseSpec(kind="salt_pepper", fraction=1.0, seed=1))
        assert set(np.unique(out.channels)) <= {0.0, 1.0}

    def test_same_seed_bit_identical(self, rng):
        image = MultiChannelImage.grayscale(rng.random((32, 32)))
        spec = NoiseSpec(kind="random_valued", fraction=0.4, seed=77)
        assert np.array_equal(add_noise(image, spec).channels, add_noise(image, spec).channels)

    @pytest.mark.parametrize("kind", ["salt_pepper", "random_valued"])
    def test_empirical_fraction_within_one_percent(self, kind):
        # a flat 0.5 image makes every replacement observable
        image = MultiChannelImage.grayscale(np.full((512, 512), 0.5))
        for fraction in (0.1, 0.5, 0.65):
            out = add_noise(image, NoiseSpec(kind=kind, fraction=fraction, seed=3))
            replaced = np.count_nonzero(out.channels != 0.5) / image.channels.size
            assert abs(replaced - fraction) <= 0.01

    def test_gaussian_moments_and_clamp(self):
        image = MultiChannelImage.grayscale(np.full((256, 256), 0.5))
        out = add_noise(image, NoiseSpec(kind="gaussian", variance=0.001, seed=5))
        delta = out.channels - 0.5
        assert abs(delta.mean()) <= 1e-3
        assert delta.std() == pytest.approx(math.sqrt(0.001), rel=0.02)
        assert out.channels.min() >= 0.0
        assert out.channels.max() <= 1.0

    def test_outputs_stay_in_unit_interval(self, rng):
        image = MultiChannelImage.grayscale(rng.random((64, 64)))
        for spec in (
            NoiseSpec(kind="gaussian", mean=0.3, variance=0.5, seed=2),
            NoiseSpec(kind="salt_pepper", fraction=0.7, seed=2),
            NoiseSpec(kind="random_valued", fraction=0.7, seed=2),
        ):
            out = add_noise(image, spec)
            assert out.channels.min() >= 0.0
            assert out.channels.max() <= 1.0

    def test_color_channels_corrupted_independently(self, rng):
        image = MultiChannelImage.rgb(np.full((3, 64, 64), 0.5))
        out = add_noise(image, NoiseSpec(kind="salt_pepper", fraction=0.3, seed=9))
        masks = out.channels != 0.5
        assert not np.array_equal(masks[0], masks[1])


class TestBlurInvariant:
    @pytest.mark.parametrize(
        "kernel", [make_average_kernel(15), make_motion_kernel(5, 45.0)]
    )
    def test_constant_image_preserved(self, kernel):
        out = convolve_periodic(np.full((64, 64), 0.42), kernel)
        assert np.abs(out - 0.42).max() <= 1e-12
