import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from aitvseg.grids import (
    BlurKernel,
    apply_symbol,
    convolve_periodic,
    embed_kernel,
    field_norms,
    forward_gradient,
    gradient_adjoint,
    gradient_spectrum,
    identity_kernel,
    kernel_symbol,
    laplacian_symbol,
)


class TestForwardGradient:
    def test_constant_grid_maps_to_zero(self):
        g = forward_gradient(np.full((5, 7), 3.25))
        assert np.array_equal(g, np.zeros((2, 5, 7)))

    def test_hand_computed_2x2(self):
        g = forward_gradient(np.array([[0.0, 1.0], [2.0, 3.0]]))
        assert np.array_equal(g[0], [[-1.0, 1.0], [-1.0, 1.0]])
        assert np.array_equal(g[1], [[-2.0, -2.0], [2.0, 2.0]])

    def test_single_pixel_wraps_to_itself(self):
        g = forward_gradient(np.array([[4.2]]))
        assert np.array_equal(g, np.zeros((2, 1, 1)))

    def test_shift_equivariance(self, rng):
        u = rng.normal(size=(9, 11))
        shifted = np.roll(u, (2, 3), axis=(0, 1))
        assert np.array_equal(
            forward_gradient(shifted), np.roll(forward_gradient(u), (2, 3), axis=(1, 2))
        )


class TestGradientAdjoint:
    def test_zero_field(self):
        assert np.array_equal(gradient_adjoint(np.zeros((2, 4, 4))), np.zeros((4, 4)))

    def test_adjoint_identity_100_random_pairs(self, rng):
        for _ in range(100):
            u = rng.normal(size=(8, 8))
            p = rng.normal(size=(2, 8, 8))
            lhs = float((forward_gradient(u) * p).sum())
            rhs = float((u * gradient_adjoint(p)).sum())
            assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), 1.0)

    def test_gradient_of_constant_is_in_kernel(self):
        p = forward_gradient(np.full((6, 6), 2.0))
        assert np.array_equal(gradient_adjoint(p), np.zeros((6, 6)))


class TestFieldNorms:
    def test_single_pixel_3_4_5(self):
        p = np.zeros((2, 1, 1))
        p[0, 0, 0], p[1, 0, 0] = 3.0, 4.0
        assert field_norms(p) == (7.0, 5.0, 5.0)

    def test_zero_field(self):
        assert field_norms(np.zeros((2, 3, 3))) == (0.0, 0.0, 0.0)

    def test_hand_computed_field(self):
        p = forward_gradient(np.array([[0.0, 1.0], [2.0, 3.0]]))
        l1, l2, l21 = field_norms(p)
        assert l1 == 12.0
        assert l2 == pytest.approx(np.sqrt(20.0), rel=1e-15)
        assert l21 == pytest.approx(4.0 * np.sqrt(5.0), rel=1e-15)

    def test_ordering_on_1000_random_fields(self, rng):
        fields = rng.normal(size=(1000, 2, 6, 6))
        for p in fields:
            l1, l2, l21 = field_norms(p)
            assert l2 <= l21 + 1e-12
            assert l21 <= l1 + 1e-12

    @settings(max_examples=50, deadline=None)
    @given(arrays(float, (2, 4, 5), elements=st.floats(-100, 100)))
    def test_ordering_property(self, p):
        l1, l2, l21 = field_norms(p)
        assert l2 <= l21 * (1 + 1e-12) + 1e-12
        assert l21 <= l1 * (1 + 1e-12) + 1e-12


class TestConvolvePeriodic:
    def test_identity_kernel_round_trip(self, rng):
        u = rng.random((16, 16))
        assert np.abs(convolve_periodic(u, identity_kernel()) - u).max() <= 1e-12

    def test_normalized_kernel_preserves_constants(self):
        u = np.full((20, 20), 0.37)
        k = BlurKernel(taps=np.full((5, 5), 1.0 / 25), anchor=(2, 2))
        assert np.abs(convolve_periodic(u, k) - 0.37).max() <= 1e-12

    def test_impulse_spreads_to_plateau(self):
        u = np.zeros((32, 32))
        u[16, 16] = 1.0
        k = BlurKernel(taps=np.full((15, 15), 1.0 / 225), anchor=(7, 7))
        out = convolve_periodic(u, k)
        plateau = out[9:24, 9:24]
        assert np.abs(plateau - 1.0 / 225).max() <= 1e-12
        mask = np.ones_like(out, dtype=bool)
        mask[9:24, 9:24] = False
        assert np.abs(out[mask]).max() <= 1e-12

    def test_kernel_larger_than_image_rejected(self):
        k = BlurKernel(taps=np.full((5, 5), 1.0 / 25), anchor=(2, 2))
        with pytest.raises(ValueError, match="does not fit"):
            convolve_periodic(np.zeros((4, 4)), k)


class TestSymbols:
    def test_identity_kernel_symbol_is_all_ones(self):
        sym = kernel_symbol(identity_kernel(), 8, 6)
        assert np.abs(sym - 1.0).max() == 0.0

    def test_laplacian_symbol_sign_and_dc(self):
        sym = laplacian_symbol(16, 12)
        assert np.isrealobj(sym)
        assert sym.max() <= 0.0
        assert sym[0, 0] == 0.0
        assert np.count_nonzero(sym == 0.0) == 1

    def test_laplacian_symbol_matches_embedded_stencil(self):
        # compose the factor symbols vs the DFT of the five-point stencil
        stencil = BlurKernel(
            taps=np.array([[0.0, 1.0, 0.0], [1.0, -4.0, 1.0], [0.0, 1.0, 0.0]]),
            anchor=(1, 1),
        )
        direct = kernel_symbol(stencil, 16, 16)
        composed = laplacian_symbol(16, 16)
        assert np.abs(direct - composed).max() <= 1e-10

    def test_spatial_operator_matches_symbol(self, rng):
        u = rng.normal(size=(16, 16))
        spatial = gradient_adjoint(forward_gradient(u))
        spectral = apply_symbol(u, gradient_spectrum(16, 16))
        assert np.abs(spatial - spectral).max() <= 1e-10

    def test_normalized_blur_symbol_is_one_at_dc(self):
        k = BlurKernel(taps=np.full((3, 3), 1.0 / 9), anchor=(1, 1))
        sym = kernel_symbol(k, 10, 10)
        assert abs(sym[0, 0] - 1.0) <= 1e-12


class TestBlurKernel:
    def test_anchor_outside_taps_rejected(self):
        with pytest.raises(ValueError, match="anchor"):
            BlurKernel(taps=np.ones((3, 3)), anchor=(3, 0))

    def test_non_finite_taps_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            BlurKernel(taps=np.array([[np.nan]]), anchor=(0, 0))

    def test_embed_places_anchor_at_origin(self):
        k = BlurKernel(taps=np.array([[1.0, 2.0], [3.0, 4.0]]), anchor=(0, 1))
        e = embed_kernel(k, 4, 4)
        assert e[0, 3] == 1.0  # tap left of the anchor wraps around
        assert e[0, 0] == 2.0
        assert e[1, 3] == 3.0
        assert e[1, 0] == 4.0
