"""Explicit RK4 pseudo-spectral integrator for d omega/dt = -{psi, omega}, Delta psi = omega.

The state is carried as the rfft2 half spectrum of omega.  Each right-hand
side evaluation costs four inverse and one forward transform; the bracket
uses the 2/3 rule, so modes above N//3 never change.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, spectral
from .errors import CFLViolation, SolverAbort, ValidationError
from .spectral import ScalarField, irfft2, rfft2

log = logging.getLogger(__name__)

AREA = (2.0 * np.pi) ** 2


@dataclass
class SolverConfig:
    N: int
    dt: float
    t_end: float
    cfl_cap: float = 0.5
    snapshot_stride: int = 100
    allow_cfl_violation: bool = False

    def __post_init__(self):
        if not self.dt > 0:
            raise ValidationError(f"dt must be positive, got {self.dt!r}", key="dt")
        if not self.t_end >= 0:
            raise ValidationError(f"t_end must be >= 0, got {self.t_end!r}", key="t_end")
        if int(self.snapshot_stride) != self.snapshot_stride or self.snapshot_stride < 1:
            raise ValidationError(f"snapshot_stride must be a positive integer", key="snapshot_stride")
        if not self.cfl_cap > 0:
            raise ValidationError("cfl_cap must be positive", key="cfl_cap")


@dataclass
class SolverState:
    t: float
    omega_hat: np.ndarray
    step_index: int
    grid: spectral.TorusGrid
    physical: np.ndarray = field(default=None, repr=False)   # exact input samples, step 0 only

    @property
    def omega(self):
        if self.physical is not None:
            return ScalarField(self.grid, self.physical.copy())
        return ScalarField(self.grid, irfft2(self.omega_hat, self.grid.N))

    @classmethod
    def from_field(cls, omega, t=0.0):
        return cls(t=float(t), omega_hat=rfft2(omega.values), step_index=0, grid=omega.grid,
                   physical=omega.values.copy())


@dataclass
class Diagnostics:
    t: float
    energy: float
    enstrophy: float
    casimir3: float
    mean_omega: float
    max_velocity: float
    extra: dict = field(default_factory=dict)


def compute_diagnostics(omega, t=0.0):
    """Energy -1/2 int psi omega, enstrophy 1/2 int omega^2, int omega^3, mean, max |u|."""
    g = omega.grid
    w = omega.values
    w_hat = rfft2(w)
    psi_hat = g.inv_neg_k2 * w_hat
    psi = irfft2(psi_hat, g.N)
    ux = -irfft2(g.iky * psi_hat, g.N)
    uy = irfft2(g.ikx * psi_hat, g.N)
    return Diagnostics(
        t=float(t),
        energy=float(-0.5 * AREA * np.mean(psi * w)),
        enstrophy=float(0.5 * AREA * np.mean(w * w)),
        casimir3=float(AREA * np.mean(w**3)),
        mean_omega=float(np.mean(w)),
        max_velocity=float(np.sqrt(ux * ux + uy * uy).max()),
    )


class EulerSolver:
    """Pseudo-spectral RK4 integrator on one grid."""

    def __init__(self, grid):
        self.grid = grid
        self._mask = grid.dealias_mask
        self._inv = grid.inv_neg_k2

    def rhs_hat(self, w_hat):
        """Spectrum of -{Delta^-1 omega, omega} with 2/3-rule dealiasing."""
        g = self.grid
        k = _kernels
        psi_hat = k.stream_from_vorticity(w_hat, self._inv, self._mask)
        px, py = k.spectral_gradient(psi_hat, g.ikx, g.iky, self._mask)
        wx, wy = k.spectral_gradient(w_hat, g.ikx, g.iky, self._mask)
        n = g.N
        prod = k.bracket_combine(irfft2(px, n), irfft2(py, n), irfft2(wx, n), irfft2(wy, n))
        return -rfft2(prod) * self._mask

    def rhs(self, omega):
        """-{psi, omega} as a field; rejects nonzero-mean input like the inverse Laplacian."""
        spectral.inverse_laplacian_zero_mean(omega)
        return ScalarField(self.grid, irfft2(self.rhs_hat(rfft2(omega.values)), self.grid.N))

    def step_rk4(self, state, dt):
        """One classical RK4 step; raises SolverAbort on non-finite output."""
        y = state.omega_hat
        if dt == 0.0:
            return SolverState(state.t, y.copy(), state.step_index + 1, state.grid, state.physical)
        ax = _kernels.axpy
        k1 = self.rhs_hat(y)
        k2 = self.rhs_hat(ax(y, 0.5 * dt, k1))
        k3 = self.rhs_hat(ax(y, 0.5 * dt, k2))
        k4 = self.rhs_hat(ax(y, dt, k3))
        y_new = _kernels.rk4_combine(y, k1, k2, k3, k4, dt)
        new = SolverState(state.t + dt, y_new, state.step_index + 1, state.grid)
        if not np.all(np.isfinite(y_new)):
            raise SolverAbort(new.step_index, new.t)
        return new

    def max_velocity(self, omega_hat):
        g = self.grid
        psi_hat = g.inv_neg_k2 * omega_hat
        ux = irfft2(g.iky * psi_hat, g.N)
        uy = irfft2(g.ikx * psi_hat, g.N)
        return float(np.sqrt(ux * ux + uy * uy).max())

    def check_cfl(self, config, omega_hat):
        umax = self.max_velocity(omega_hat)
        limit = math.inf if umax == 0.0 else config.cfl_cap * self.grid.dx / umax
        if config.dt > limit and not config.allow_cfl_violation:
            raise CFLViolation(
                f"dt={config.dt:.3e} exceeds CFL limit {limit:.3e} (cap {config.cfl_cap}, max|u|={umax:.3e})",
                key="dt",
            )
        return limit

    def run(self, config, initial, observers=(), diagnostics_stride=None, t0=0.0):
        """Integrate to ``config.t_end``.

        Observers are called as ``obs(state)`` at step 0, every
        ``snapshot_stride`` steps and at the final step.  Diagnostics are
        recorded at the same instants (or every ``diagnostics_stride`` steps).
        The last step is shortened when t_end is not a multiple of dt.
        """
        if config.N != self.grid.N:
            raise ValidationError(f"config N={config.N} does not match solver grid N={self.grid.N}", key="N")
        spectral.inverse_laplacian_zero_mean(initial)
        state = SolverState.from_field(initial, t0)
        self.check_cfl(config, state.omega_hat)
        dt = config.dt
        n_full = int(math.floor(config.t_end / dt * (1.0 + 1e-12)))
        remainder = config.t_end - n_full * dt
        if remainder <= 1e-12 * max(1.0, config.t_end):
            remainder = 0.0
        n_steps = n_full + (1 if remainder > 0.0 else 0)
        stride = config.snapshot_stride
        dstride = diagnostics_stride or stride
        series = []

        def emit(st, final=False):
            if st.step_index % dstride == 0 or final:
                series.append(compute_diagnostics(st.omega, st.t))
            if st.step_index % stride == 0 or final:
                for obs in observers:
                    obs(st)

        emit(state, final=(n_steps == 0))
        for n in range(n_steps):
            h = dt if n < n_full else remainder
            state = self.step_rk4(state, h)
            # exact time bookkeeping, no accumulated round-off
            state.t = t0 + (config.t_end if n == n_steps - 1 else (n + 1) * dt)
            emit(state, final=(n == n_steps - 1))
        log.debug("finished %d steps at t=%.6g", n_steps, state.t)
        return state, series


def rhs(omega):
    return EulerSolver(omega.grid).rhs(omega)


def step_rk4(state, dt):
    return EulerSolver(state.grid).step_rk4(state, dt)


def run(config, initial, observers=()):
    return EulerSolver(initial.grid).run(config, initial, observers)
