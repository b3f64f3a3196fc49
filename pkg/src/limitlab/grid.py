"""Periodic grid and FFT-based differentiation toolkit.

Fields are plain numpy arrays sampled on a uniform periodic rectangle:
scalars (nx, ny), 3-vectors (3, nx, ny), 3x3 tensors (3, 3, nx, ny).
Fields vary in x and y only; the third component direction is retained
everywhere so that all 3D tensor formulas apply verbatim (d/dz = 0).

Index conventions used across the package (fixed here once):
  (grad v)_ij = d_i v_j,    D = (grad v + grad v^T)/2,
  Omega = (grad v - grad v^T)/2,   (div sigma)_i = d_j sigma_ji.

A :class:`SpectralContext` owns the transform workspace for one grid.  A
context must not be shared by simultaneous calls; create one per worker
for parallel runs.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform periodic rectangle with nx x ny points on [0,lx) x [0,ly)."""
    nx: int = 32
    ny: int = 32
    lx: float = 2.0 * np.pi
    ly: float = 2.0 * np.pi

    def __post_init__(self):
        for n, name in ((self.nx, "nx"), (self.ny, "ny")):
            if n < 8 or n % 2 != 0:
                raise ValueError(f"{name} must be even and >= 8, got {n}")
        if self.lx <= 0 or self.ly <= 0:
            raise ValueError("cell lengths must be positive")

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def cell_area(self):
        return self.lx * self.ly

    def meshgrid(self):
        x = np.arange(self.nx) * (self.lx / self.nx)
        y = np.arange(self.ny) * (self.ly / self.ny)
        return np.meshgrid(x, y, indexing='ij')


class SpectralContext:
    """Precomputed wavenumbers, dealiasing mask and transforms for one grid."""

    def __init__(self, grid: PeriodicGrid):
        self.grid = grid
        kx = 2.0 * np.pi * np.fft.fftfreq(grid.nx, d=grid.lx / grid.nx)
        ky = 2.0 * np.pi * np.fft.fftfreq(grid.ny, d=grid.ly / grid.ny)
        # the dealiasing mask is built from the true wavenumbers (so the
        # Nyquist rows are excluded from every band-limited field) ...
        kcut_x = (2.0 / 3.0) * np.pi * grid.nx / grid.lx
        kcut_y = (2.0 / 3.0) * np.pi * grid.ny / grid.ly
        self.dealias_mask = ((np.abs(kx.reshape(-1, 1)) < kcut_x)
                             & (np.abs(ky.reshape(1, -1)) < kcut_y))
        # ... while the derivative symbols zero the Nyquist mode, keeping
        # d/dx of real fields real and the discrete operators exact adjoints
        kx[grid.nx // 2] = 0.0
        ky[grid.ny // 2] = 0.0
        self.kx = kx.reshape(grid.nx, 1)
        self.ky = ky.reshape(1, grid.ny)
        self.ikx = 1j * self.kx
        self.iky = 1j * self.ky
        self.k2 = self.kx ** 2 + self.ky ** 2        # -Laplacian symbol
        with np.errstate(divide='ignore'):
            inv_k2 = np.where(self.k2 > 0, 1.0 / np.where(self.k2 > 0,
                                                          self.k2, 1.0), 0.0)
        self.inv_k2 = inv_k2

    # -- shape checking -------------------------------------------------

    def check(self, *fields):
        for f in fields:
            if np.shape(f)[-2:] != self.grid.shape:
                raise GridMismatch(
                    f"field with shape {np.shape(f)} does not live on grid "
                    f"{self.grid.shape}")

    # -- transforms and derivatives --------------------------------------

    def fft(self, f):
        return np.fft.fft2(f, axes=(-2, -1))

    def ifft(self, fh):
        return np.fft.ifft2(fh, axes=(-2, -1)).real

    def dx(self, f):
        self.check(f)
        return self.ifft(self.ikx * self.fft(f))

    def dy(self, f):
        self.check(f)
        return self.ifft(self.iky * self.fft(f))

    def partial(self, f, axis):
        """Partial derivative along 'x', 'y' or 'z' (the latter is zero)."""
        if axis in (0, 'x'):
            return self.dx(f)
        if axis in (1, 'y'):
            return self.dy(f)
        if axis in (2, 'z'):
            self.check(f)
            return np.zeros_like(np.asarray(f, dtype=float))
        raise ValueError(f"unknown axis {axis!r}")

    def laplacian(self, f):
        self.check(f)
        return self.ifft(-self.k2 * self.fft(f))

    def dealias(self, f):
        """Truncate to the 2/3 band (apply after every nonlinear product)."""
        self.check(f)
        return self.ifft(self.dealias_mask * self.fft(f))

    def solve_helmholtz(self, f, coeff):
        """Solve (1 - coeff * Laplacian) u = f in Fourier space."""
        self.check(f)
        return self.ifft(self.fft(f) / (1.0 + coeff * self.k2))

    # -- vector calculus --------------------------------------------------

    def grad_vector(self, v):
        """(grad v)_ij = d_i v_j for a 3-component field; the z-row is zero."""
        self.check(v)
        g = np.zeros((3,) + v.shape, dtype=float)
        g[0] = self.dx(v)
        g[1] = self.dy(v)
        return g

    def div_vector(self, v):
        self.check(v)
        return self.dx(v[0]) + self.dy(v[1])

    def div_tensor(self, sigma):
        """(div sigma)_i = d_j sigma_ji for a (3,3,nx,ny) stress field."""
        self.check(sigma)
        return self.dx(sigma[0]) + self.dy(sigma[1])

    def leray_project(self, v):
        """Orthogonal projection onto divergence-free fields.

        The mean (k=0) mode is preserved; the third component carries no
        wavenumber and passes through untouched.
        """
        self.check(v)
        vh = self.fft(v)
        kdotv = self.kx * vh[0] + self.ky * vh[1]
        factor = kdotv * self.inv_k2
        vh[0] -= self.kx * factor
        vh[1] -= self.ky * factor
        return self.ifft(vh)

    def advect(self, v, f):
        """Material transport term (v . grad) f, dealiased."""
        self.check(v, f)
        return self.dealias(v[0] * self.dx(f) + v[1] * self.dy(f))

    def strain_and_vorticity(self, v):
        """Symmetric and antisymmetric parts of grad v."""
        g = self.grad_vector(v)
        gt = np.swapaxes(g, 0, 1)
        return 0.5 * (g + gt), 0.5 * (g - gt)

    # -- quadrature and norms ---------------------------------------------

    def integrate(self, f):
        """Cell integral of a scalar field (trapezoidal = spectral here)."""
        self.check(f)
        return float(np.sum(f) * (self.grid.cell_area / (self.grid.nx * self.grid.ny)))

    def inner(self, f, g):
        """L2 inner product; component axes are contracted pointwise."""
        self.check(f, g)
        if np.shape(f) != np.shape(g):
            raise GridMismatch("inner product of differently shaped fields")
        prod = np.asarray(f) * np.asarray(g)
        while prod.ndim > 2:
            prod = prod.sum(axis=0)
        return self.integrate(prod)

    def l2_norm(self, f):
        return float(np.sqrt(max(self.inner(f, f), 0.0)))

    def h1_norm(self, f):
        grad2 = self.inner(self.dx(f), self.dx(f)) + self.inner(self.dy(f), self.dy(f))
        return float(np.sqrt(max(self.inner(f, f) + grad2, 0.0)))


def make_context(grid: PeriodicGrid) -> SpectralContext:
    return SpectralContext(grid)


def random_band_limited(ctx: SpectralContext, rng, shape=(), amplitude=1.0):
    """Random real field supported inside the dealiasing band (testing aid)."""
    f = rng.standard_normal(tuple(shape) + ctx.grid.shape)
    f = ctx.dealias(f)
    peak = np.max(np.abs(f))
    if peak > 0:
        f *= amplitude / peak
    return f


def random_solenoidal(ctx: SpectralContext, rng, amplitude=1.0):
    """Random band-limited divergence-free 3-component velocity field."""
    v = random_band_limited(ctx, rng, shape=(3,))
    v = ctx.leray_project(v)
    v -= v.mean(axis=(-2, -1), keepdims=True)   # drop mean drift
    peak = np.max(np.abs(v))
    if peak > 0:
        v *= amplitude / peak
    return v
