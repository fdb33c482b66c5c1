"""Pointwise kernels used in the solver hot loop.

Each kernel exists twice: a numba ``@njit`` version and a plain numpy
version.  The numba path is used when numba imports and the environment
variable ``EQP_KERNELS`` is not set to ``numpy``.  Both paths are
deterministic; they are not guaranteed to agree bitwise with each other.
"""
import os

import numpy as np

_requested = os.environ.get("EQP_KERNELS", "numba").strip().lower()

try:
    if _requested == "numpy":
        raise ImportError("numba disabled by EQP_KERNELS=numpy")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy reference versions
# ---------------------------------------------------------------------------

def _bracket_combine_np(fx, fy, gx, gy):
    return fx * gy - fy * gx


def _spectral_gradient_np(f_hat, ikx, iky, mask):
    """Return masked (ikx*f, iky*f) for a half-spectrum array."""
    fm = f_hat * mask
    return ikx * fm, iky * fm


def _stream_from_vorticity_np(w_hat, inv_neg_k2, mask):
    return w_hat * mask * inv_neg_k2


def _axpy_np(y, a, x):
    return y + a * x


def _rk4_combine_np(y, k1, k2, k3, k4, dt):
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


# ---------------------------------------------------------------------------
# numba versions
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _bracket_combine_nb(fx, fy, gx, gy):
        n0, n1 = fx.shape
        out = np.empty((n0, n1))
        for i in range(n0):
            for j in range(n1):
                out[i, j] = fx[i, j] * gy[i, j] - fy[i, j] * gx[i, j]
        return out

    @njit(cache=True)
    def _spectral_gradient_nb(f_hat, ikx, iky, mask):
        n0, n1 = f_hat.shape
        gx = np.empty((n0, n1), dtype=np.complex128)
        gy = np.empty((n0, n1), dtype=np.complex128)
        for i in range(n0):
            for j in range(n1):
                v = f_hat[i, j] * mask[i, j]
                gx[i, j] = ikx[i, 0] * v
                gy[i, j] = iky[0, j] * v
        return gx, gy

    @njit(cache=True)
    def _stream_from_vorticity_nb(w_hat, inv_neg_k2, mask):
        n0, n1 = w_hat.shape
        out = np.empty((n0, n1), dtype=np.complex128)
        for i in range(n0):
            for j in range(n1):
                out[i, j] = w_hat[i, j] * mask[i, j] * inv_neg_k2[i, j]
        return out

    @njit(cache=True)
    def _axpy_nb(y, a, x):
        n0, n1 = y.shape
        out = np.empty((n0, n1), dtype=np.complex128)
        for i in range(n0):
            for j in range(n1):
                out[i, j] = y[i, j] + a * x[i, j]
        return out

    @njit(cache=True)
    def _rk4_combine_nb(y, k1, k2, k3, k4, dt):
        n0, n1 = y.shape
        out = np.empty((n0, n1), dtype=np.complex128)
        c = dt / 6.0
        for i in range(n0):
            for j in range(n1):
                out[i, j] = y[i, j] + c * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
        return out

    bracket_combine = _bracket_combine_nb
    spectral_gradient = _spectral_gradient_nb
    stream_from_vorticity = _stream_from_vorticity_nb
    axpy = _axpy_nb
    rk4_combine = _rk4_combine_nb
else:
    bracket_combine = _bracket_combine_np
    spectral_gradient = _spectral_gradient_np
    stream_from_vorticity = _stream_from_vorticity_np
    axpy = _axpy_np
    rk4_combine = _rk4_combine_np

NUMPY_KERNELS = {
    "bracket_combine": _bracket_combine_np,
    "spectral_gradient": _spectral_gradient_np,
    "stream_from_vorticity": _stream_from_vorticity_np,
    "axpy": _axpy_np,
    "rk4_combine": _rk4_combine_np,
}

ACTIVE_KERNELS = {
    "bracket_combine": bracket_combine,
    "spectral_gradient": spectral_gradient,
    "stream_from_vorticity": stream_from_vorticity,
    "axpy": axpy,
    "rk4_combine": rk4_combine,
}
