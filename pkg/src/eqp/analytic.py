"""Exact traveling-profile solutions over a flat-strip shear flow.

omega(t, x, y) = V''(x) + sum_k Omega_k(x, y - v_k t)
psi(t, x, y)   = V(x)   + sum_k Psi_k(x, y - v_k t)
"""
from dataclasses import dataclass

import numpy as np

from . import spectral
from .errors import ValidationError
from .shear_flow import commensurate_pairs
from .radial_profile import check_support_fits, eval_cartesian
from .spectral import ScalarField

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class QuasiPeriodicSolution:
    flow: object
    profiles: tuple
    strip_index: tuple      # strip carrying each profile
    velocities: tuple       # v_k of each profile's strip

    @property
    def K(self):
        return len(self.profiles)

    def shifts(self, t):
        return [np.mod(v * t, TWO_PI) for v in self.velocities]

    def profile_fields(self, t, grid, which="vorticity"):
        """Gridded traveling terms, one array per profile."""
        X, Y = grid.mesh
        return [eval_cartesian(p, which, X, Y, shift=s) for p, s in zip(self.profiles, self.shifts(t))]

    def background(self, grid, order):
        col = self.flow.eval(grid.x, order)
        return np.repeat(col[:, None], grid.N, axis=1)

    def eval_vorticity(self, t, grid):
        w = self.background(grid, 2)
        for chi in self.profile_fields(t, grid, "vorticity"):
            w += chi
        return ScalarField(grid, w)

    def eval_stream(self, t, grid):
        p = self.background(grid, 0)
        for term in self.profile_fields(t, grid, "stream"):
            p += term
        return ScalarField(grid, p)

    def time_derivative(self, t, grid):
        """d omega/dt = -sum_k v_k d_y chi_k, with d_y taken spectrally term by term."""
        out = np.zeros((grid.N, grid.N))
        for v, chi in zip(self.velocities, self.profile_fields(t, grid, "vorticity")):
            if v != 0.0:
                out -= v * spectral.derivative(ScalarField(grid, chi), "y").values
        return ScalarField(grid, out)

    def frequencies(self):
        """(velocities, y-translation periods 2 pi/|v_k|, inf for v_k = 0)."""
        periods = tuple(TWO_PI / abs(v) if v != 0.0 else float("inf") for v in self.velocities)
        return self.velocities, periods

    def commensurate_pairs(self, max_denominator=64, rtol=1e-9):
        return commensurate_pairs(self.velocities, max_denominator, rtol)


def assemble(flow, profiles, strip_index=None):
    """Validate and bundle a shear flow with its traveling profiles.

    Profiles are matched to strips in order unless ``strip_index`` gives an
    explicit strip for each.  An empty profile list gives the pure shear state.
    """
    profiles = tuple(profiles)
    if strip_index is None:
        if len(profiles) not in (0, flow.K):
            raise ValidationError(
                f"need one profile per strip ({flow.K}) or none, got {len(profiles)}", key="profiles"
            )
        strip_index = tuple(range(len(profiles)))
    else:
        strip_index = tuple(int(k) for k in strip_index)
        if len(strip_index) != len(profiles):
            raise ValidationError("strip_index length must match profiles", key="profiles")
        if len(set(strip_index)) != len(strip_index):
            raise ValidationError("at most one profile per strip", key="profiles")
    for n, (p, k) in enumerate(zip(profiles, strip_index)):
        if not 0 <= k < flow.K:
            raise ValidationError(f"strip index {k} out of range", key=f"profiles[{n}]")
        strip = flow.strips[k]
        try:
            fits = check_support_fits(p, strip)
        except ValidationError as exc:
            raise ValidationError(str(exc), key=f"profiles[{n}].x") from None
        if not fits:
            raise ValidationError(
                f"support radius {p.rho_max:.6g} leaks out of strip [{strip.a:.6g}, {strip.b:.6g}] "
                f"around x={p.center[0]:.6g}",
                key=f"profiles[{n}].r_max",
            )
    velocities = tuple(flow.velocities[k] for k in strip_index)
    return QuasiPeriodicSolution(flow, profiles, strip_index, velocities)


def eval_vorticity(sol, t, grid):
    return sol.eval_vorticity(t, grid)


def eval_stream(sol, t, grid):
    return sol.eval_stream(t, grid)


def frequencies(sol):
    return sol.frequencies()
