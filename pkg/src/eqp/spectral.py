"""Fourier toolbox on the uniform N x N grid of the torus [0, 2pi)^2.

Grid convention: ``values[i, j]`` is the sample at ``x_i = 2 pi i / N``,
``y_j = 2 pi j / N`` (row-major over the x index, then y).  Half spectra
come from ``rfft2`` so the y wavenumber axis is the compressed one.
"""
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy import fft as sfft

from . import _kernels
from .errors import NonZeroMeanError, ValidationError

_WORKERS = 1


def set_workers(workers):
    """Set the FFT thread count.  Output values do not depend on it."""
    global _WORKERS
    if workers < 1:
        raise ValidationError("worker count must be >= 1", key="workers")
    _WORKERS = int(workers)


def get_workers():
    return _WORKERS


def rfft2(a):
    return sfft.rfft2(a, workers=_WORKERS)


def irfft2(a, n):
    return sfft.irfft2(a, s=(n, n), workers=_WORKERS)


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid on the 2 pi-periodic square with cached spectral operators."""

    N: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 16 or self.N % 2:
            raise ValidationError(f"grid size must be an even integer >= 16, got {self.N!r}", key="N")

    @property
    def dx(self):
        return 2.0 * np.pi / self.N

    @property
    def cutoff(self):
        """Largest retained |k_x|, |k_y| under the 2/3 rule."""
        return self.N // 3

    @cached_property
    def x(self):
        return 2.0 * np.pi * np.arange(self.N) / self.N

    @cached_property
    def mesh(self):
        return np.meshgrid(self.x, self.x, indexing="ij")

    @cached_property
    def kx(self):
        return np.fft.fftfreq(self.N, 1.0 / self.N)[:, None]

    @cached_property
    def ky(self):
        return np.fft.rfftfreq(self.N, 1.0 / self.N)[None, :]

    @cached_property
    def k2(self):
        return self.kx**2 + self.ky**2

    @cached_property
    def inv_neg_k2(self):
        """-1/|k|^2 with the (0, 0) entry set to 0."""
        k2 = self.k2.copy()
        k2[0, 0] = 1.0
        out = -1.0 / k2
        out[0, 0] = 0.0
        return out

    @cached_property
    def ikx(self):
        k = self.kx.copy()
        k[np.abs(k) == self.N // 2] = 0.0
        return (1j * k).astype(np.complex128)

    @cached_property
    def iky(self):
        k = self.ky.copy()
        k[k == self.N // 2] = 0.0
        return (1j * k).astype(np.complex128)

    @cached_property
    def dealias_mask(self):
        c = self.cutoff
        keep = (np.abs(self.kx) <= c) & (np.abs(self.ky) <= c)
        return keep.astype(np.float64)

    @cached_property
    def ones_mask(self):
        return np.ones((self.N, self.N // 2 + 1))

    def sample(self, func):
        """Evaluate ``func(X, Y)`` on the grid nodes."""
        X, Y = self.mesh
        vals = np.broadcast_to(np.asarray(func(X, Y), dtype=np.float64), (self.N, self.N))
        return ScalarField(self, vals.copy())

    def columns_in(self, a, b):
        """Indices i with a < x_i < b."""
        return np.nonzero((self.x > a) & (self.x < b))[0]


@lru_cache(maxsize=None)
def get_grid(N):
    return TorusGrid(int(N))


@dataclass
class ScalarField:
    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.grid.N, self.grid.N):
            raise ValidationError(f"field shape {self.values.shape} does not match N={self.grid.N}")

    def mean(self):
        return float(self.values.mean())

    def max_abs(self):
        return float(np.abs(self.values).max())

    def l2(self):
        """Root-mean-square norm (grid-normalized L2)."""
        return float(np.sqrt(np.mean(self.values**2)))

    def is_finite(self):
        return bool(np.all(np.isfinite(self.values)))

    def __add__(self, other):
        return ScalarField(self.grid, self.values + _vals(other))

    def __sub__(self, other):
        return ScalarField(self.grid, self.values - _vals(other))

    def __mul__(self, scalar):
        return ScalarField(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField(self.grid, -self.values)


def _vals(f):
    return f.values if isinstance(f, ScalarField) else f


@dataclass
class SpectrumField:
    """Half-plane Fourier coefficients of a real field (unnormalized rfft2 layout)."""

    grid: TorusGrid
    coeffs: np.ndarray

    @property
    def mean_mode(self):
        """The (0, 0) coefficient divided by N^2, i.e. the field average."""
        return float(self.coeffs[0, 0].real) / self.grid.N**2


def forward(f):
    return SpectrumField(f.grid, rfft2(f.values))


def inverse(s):
    return ScalarField(s.grid, irfft2(s.coeffs, s.grid.N))


def derivative(f, axis):
    """Spectral partial derivative along ``"x"`` or ``"y"`` (Nyquist mode dropped)."""
    g = f.grid
    if axis == "x":
        mult = g.ikx
    elif axis == "y":
        mult = g.iky
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    return ScalarField(g, irfft2(mult * rfft2(f.values), g.N))


def laplacian(f):
    g = f.grid
    return ScalarField(g, irfft2(-g.k2 * rfft2(f.values), g.N))


def inverse_laplacian_zero_mean(f, rtol=1e-10):
    """Solve Delta psi = f for the zero-mean psi.

    Raises NonZeroMeanError when ``|mean(f)| > rtol * max|f|``.
    """
    g = f.grid
    m = f.mean()
    scale = f.max_abs()
    if abs(m) > rtol * scale:
        raise NonZeroMeanError(
            f"inverse Laplacian needs a zero-mean field; measured mean {m:.3e} (max |f| = {scale:.3e})"
        )
    return ScalarField(g, irfft2(g.inv_neg_k2 * rfft2(f.values), g.N))


def _gradients_hat(f_hat, grid, mask):
    fx, fy = _kernels.spectral_gradient(f_hat, grid.ikx, grid.iky, mask)
    return irfft2(fx, grid.N), irfft2(fy, grid.N)


def poisson_bracket(f, g, dealias=True):
    """{f, g} = f_x g_y - f_y g_x.

    With ``dealias`` the inputs are truncated to |k_x|, |k_y| <= N//3 before
    the products and the result is truncated again (2/3 rule).  Without it
    the products are formed from the full-resolution spectral derivatives.
    """
    grid = f.grid
    mask = grid.dealias_mask if dealias else grid.ones_mask
    fx, fy = _gradients_hat(rfft2(f.values), grid, mask)
    gx, gy = _gradients_hat(rfft2(g.values), grid, mask)
    prod = _kernels.bracket_combine(fx, fy, gx, gy)
    if dealias:
        prod = irfft2(rfft2(prod) * grid.dealias_mask, grid.N)
    return ScalarField(grid, prod)


def velocity_from_stream(psi):
    """u = J grad psi = (-psi_y, psi_x)."""
    ux = -derivative(psi, "y")
    uy = derivative(psi, "x")
    return ux, uy


def gradient_sup(f):
    """max over the grid of |grad f| (used to scale bracket residuals)."""
    fx = derivative(f, "x").values
    fy = derivative(f, "y").values
    return float(np.sqrt(fx**2 + fy**2).max())
