import numpy as np
import pytest

from limitlab.errors import GridMismatch
from limitlab.grid import (PeriodicGrid, SpectralContext, random_band_limited,
                           random_solenoidal)


@pytest.fixture(scope="module")
def small():
    grid = PeriodicGrid(32, 32)
    return grid, SpectralContext(grid)


class TestGridValidation:
    def test_odd_size_rejected(self):
        with pytest.raises(ValueError):
            PeriodicGrid(31, 32)

    def test_too_small_rejected(self):
        with pytest.raises(ValueError):
            PeriodicGrid(4, 32)

    def test_negative_length_rejected(self):
        with pytest.raises(ValueError):
            PeriodicGrid(32, 32, lx=-1.0)


class TestDerivatives:
    def test_dx_sin_is_cos(self, small):
        grid, ctx = small
        x, _ = grid.meshgrid()
        assert np.max(np.abs(ctx.dx(np.sin(x)) - np.cos(x))) < 1e-13

    def test_derivative_of_constant(self, small):
        grid, ctx = small
        f = np.full(grid.shape, 3.7)
        assert np.max(np.abs(ctx.dx(f))) < 1e-14
        assert np.max(np.abs(ctx.dy(f))) < 1e-14

    def test_z_derivative_is_zero(self, small, rng):
        grid, ctx = small
        f = random_band_limited(ctx, rng)
        assert np.max(np.abs(ctx.partial(f, 'z'))) == 0.0

    def test_laplacian_symbol(self, small):
        grid, ctx = small
        x, y = grid.meshgrid()
        f = np.cos(2 * x + 3 * y)
        assert np.max(np.abs(ctx.laplacian(f) + 13.0 * f)) < 1e-12

    def test_mixed_partials_commute(self, small, rng):
        grid, ctx = small
        f = random_band_limited(ctx, rng)
        assert np.max(np.abs(ctx.dx(ctx.dy(f)) - ctx.dy(ctx.dx(f)))) < 1e-12

    def test_grid_mismatch_raises(self, small):
        _, ctx = small
        with pytest.raises(GridMismatch):
            ctx.dx(np.zeros((16, 16)))


class TestLeray:
    def test_gradient_field_annihilated(self, small, rng):
        grid, ctx = small
        phi = random_band_limited(ctx, rng)
        phi -= phi.mean()
        v = np.stack([ctx.dx(phi), ctx.dy(phi), np.zeros(grid.shape)])
        assert np.max(np.abs(ctx.leray_project(v))) < 1e-12

    def test_solenoidal_unchanged(self, small, rng):
        grid, ctx = small
        psi = random_band_limited(ctx, rng)
        v = np.stack([-ctx.dy(psi), ctx.dx(psi), np.zeros(grid.shape)])
        assert np.max(np.abs(ctx.leray_project(v) - v)) < 1e-12

    def test_analytic_modes_unchanged(self, small):
        grid, ctx = small
        x, y = grid.meshgrid()
        v = np.stack([np.sin(y), np.sin(x), np.cos(x)])
        assert np.max(np.abs(ctx.leray_project(v) - v)) < 1e-12

    def test_divergence_after_projection(self, small, rng):
        grid, ctx = small
        v = random_band_limited(ctx, rng, shape=(3,))
        pv = ctx.leray_project(v)
        assert ctx.l2_norm(ctx.div_vector(pv)) < 1e-12 * max(1.0, ctx.l2_norm(pv))

    def test_idempotent(self, small, rng):
        grid, ctx = small
        v = random_band_limited(ctx, rng, shape=(3,))
        pv = ctx.leray_project(v)
        assert np.max(np.abs(ctx.leray_project(pv) - pv)) < 1e-13

    def test_orthogonal_projection(self, small, rng):
        grid, ctx = small
        v = random_band_limited(ctx, rng, shape=(3,))
        pv = ctx.leray_project(v)
        assert abs(ctx.inner(pv, v - pv)) < 1e-12 * ctx.inner(v, v)

    def test_mean_flow_preserved(self, small, rng):
        grid, ctx = small
        v = random_band_limited(ctx, rng, shape=(3,))
        v += np.array([0.5, -0.2, 0.1]).reshape(3, 1, 1)
        pv = ctx.leray_project(v)
        assert np.allclose(pv.mean(axis=(-2, -1)), v.mean(axis=(-2, -1)),
                           atol=1e-14)


class TestAdvection:
    def test_constant_field(self, small, rng):
        grid, ctx = small
        v = random_solenoidal(ctx, rng)
        f = np.full(grid.shape, 2.0)
        assert np.max(np.abs(ctx.advect(v, f))) < 1e-13

    def test_uniform_translation(self, small):
        grid, ctx = small
        x, _ = grid.meshgrid()
        v = np.stack([np.ones(grid.shape), np.zeros(grid.shape),
                      np.zeros(grid.shape)])
        assert np.max(np.abs(ctx.advect(v, np.sin(x)) - np.cos(x))) < 1e-13

    def test_skew_symmetry(self, small, rng):
        grid, ctx = small
        v = random_solenoidal(ctx, rng)
        f = random_band_limited(ctx, rng)
        val = ctx.inner(ctx.advect(v, f), f)
        scale = ctx.l2_norm(f) ** 2 * max(np.max(np.abs(v)), 1.0)
        assert abs(val) < 1e-10 * scale


class TestStrainVorticity:
    def test_shear_mode(self, small):
        grid, ctx = small
        _, y = grid.meshgrid()
        v = np.stack([np.sin(y), np.zeros(grid.shape), np.zeros(grid.shape)])
        d, omega = ctx.strain_and_vorticity(v)
        cos = np.cos(y)
        assert np.max(np.abs(d[0, 1] - 0.5 * cos)) < 1e-13
        assert np.max(np.abs(d[1, 0] - 0.5 * cos)) < 1e-13
        assert np.max(np.abs(omega[1, 0] - 0.5 * cos)) < 1e-13
        assert np.max(np.abs(omega[0, 1] + 0.5 * cos)) < 1e-13
        assert np.max(np.abs(d[0, 0])) < 1e-14
        assert np.max(np.abs(d[2])) < 1e-14

    def test_decomposition_sums_to_gradient(self, small, rng):
        grid, ctx = small
        v = random_band_limited(ctx, rng, shape=(3,))
        d, omega = ctx.strain_and_vorticity(v)
        g = ctx.grad_vector(v)
        assert np.max(np.abs(d + omega - g)) < 1e-13

    def test_symmetry_structure(self, small, rng):
        grid, ctx = small
        v = random_band_limited(ctx, rng, shape=(3,))
        d, omega = ctx.strain_and_vorticity(v)
        assert np.max(np.abs(d - np.swapaxes(d, 0, 1))) < 1e-14
        assert np.max(np.abs(omega + np.swapaxes(omega, 0, 1))) < 1e-14
        assert np.max(np.abs(np.einsum('ij...,ij...->...', d, omega))) < 1e-13


class TestNorms:
    def test_l2_of_sine(self, small):
        grid, ctx = small
        x, _ = grid.meshgrid()
        assert ctx.l2_norm(np.sin(x)) == pytest.approx(
            np.sqrt(2.0 * np.pi ** 2), abs=1e-12)

    def test_inner_consistency(self, small, rng):
        grid, ctx = small
        f = random_band_limited(ctx, rng)
        assert ctx.inner(f, f) == pytest.approx(ctx.l2_norm(f) ** 2,
                                                rel=1e-13)

    def test_parseval(self, small, rng):
        grid, ctx = small
        f = random_band_limited(ctx, rng)
        phys = ctx.inner(f, f)
        modal = np.sum(np.abs(ctx.fft(f)) ** 2) / (grid.nx * grid.ny) ** 2 \
            * grid.cell_area
        assert phys == pytest.approx(modal, rel=1e-12)

    def test_h1_norm(self, small):
        grid, ctx = small
        x, _ = grid.meshgrid()
        f = np.sin(x)
        # ||f||^2 = 2 pi^2, ||f'||^2 = 2 pi^2
        assert ctx.h1_norm(f) == pytest.approx(np.sqrt(4.0 * np.pi ** 2),
                                               abs=1e-12)

    def test_mismatched_shapes_rejected(self, small, rng):
        grid, ctx = small
        f = random_band_limited(ctx, rng)
        v = random_band_limited(ctx, rng, shape=(3,))
        with pytest.raises(GridMismatch):
            ctx.inner(f, v)


class TestDealiasing:
    def test_product_matches_truncated_convolution(self, rng):
        grid = PeriodicGrid(8, 8)
        ctx = SpectralContext(grid)
        f = random_band_limited(ctx, rng)
        g = random_band_limited(ctx, rng)
        prod = ctx.dealias(f * g)
        # direct convolution oracle on the coarse grid: evaluate the product
        # on a refined grid (alias-free), truncate back to the kept band
        fine = PeriodicGrid(16, 16)
        fctx = SpectralContext(fine)

        def upsample(h):
            hh = np.zeros((16, 16), dtype=complex)
            src = np.fft.fftshift(ctx.fft(h))
            hh[4:12, 4:12] = src
            return np.fft.ifft2(np.fft.ifftshift(hh)).real * (16 * 16) / (8 * 8)

        exact = upsample(f) * upsample(g)
        spec_fine = np.fft.fftshift(fctx.fft(exact)) / (16 * 16)
        spec_prod = np.fft.fftshift(ctx.fft(prod)) / (8 * 8)
        kept = np.zeros((8, 8), dtype=bool)
        kept[np.fft.fftshift(ctx.dealias_mask)] = True
        sub = spec_fine[4:12, 4:12]
        assert np.max(np.abs(np.where(kept, spec_prod - sub, 0.0))) < 1e-13

    def test_mask_keeps_mean(self, small):
        grid, ctx = small
        f = np.full(grid.shape, 1.23)
        assert np.max(np.abs(ctx.dealias(f) - f)) < 1e-14
