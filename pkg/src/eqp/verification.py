"""Numerical checks of the construction identities.

Bracket residuals are reported relative to ``max|grad f| * max|grad g|``,
the natural size of {f, g}; they use full-resolution spectral derivatives
(no 2/3 truncation), so they measure how well the gridded fields satisfy
the identity rather than the solver's dealiasing.
"""
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import spectral
from .errors import ValidationError
from .radial_profile import eval_cartesian
from .spectral import ScalarField

J = np.array([[0.0, -1.0], [1.0, 0.0]])
TWO_PI = 2.0 * np.pi

# fixed acceptance thresholds
CONSTRUCTION_RTOL = 1e-6
MEAN_RTOL = 1e-10
JACOBIAN_TOL = 1e-13
EVOLUTION_RTOL = 1e-6
NEGATIVE_MARGIN = 1e3


@dataclass
class VerificationRecord:
    name: str
    N: int
    residual: float
    tolerance: float
    passed: bool
    kind: str = "positive"      # "negative" controls pass when residual >= tolerance

    def to_dict(self):
        return asdict(self)


def record(name, N, residual, tolerance, negative=False):
    residual = float(residual)
    passed = residual >= tolerance if negative else residual <= tolerance
    return VerificationRecord(name, N, residual, float(tolerance), bool(passed), "negative" if negative else "positive")


def spectral_tolerance(laplacian_residual):
    """Per-run tolerance: max(1e-10, 10 x measured laplacian consistency)."""
    return max(1e-10, 10.0 * float(laplacian_residual))


def bracket_residual(f, g):
    """Relative sup norm of {f, g}; 0 when either field is constant."""
    scale = spectral.gradient_sup(f) * spectral.gradient_sup(g)
    if scale == 0.0:
        return 0.0
    return spectral.poisson_bracket(f, g, dealias=False).max_abs() / scale


def profile_pair(profile, grid, shift=0.0):
    X, Y = grid.mesh
    psi = ScalarField(grid, eval_cartesian(profile, "stream", X, Y, shift))
    omega = ScalarField(grid, eval_cartesian(profile, "vorticity", X, Y, shift))
    return psi, omega


def stationarity_residual(profile, grid):
    """{Psi_k, Omega_k} for the gridded radial pair."""
    return bracket_residual(*profile_pair(profile, grid))


def laplacian_consistency(profile, grid):
    """Relative L2 mismatch between the spectral Laplacian of Psi_k and the radial formula for Omega_k."""
    psi, omega = profile_pair(profile, grid)
    norm = math.sqrt(np.sum(omega.values**2))
    if norm == 0.0:
        return 0.0
    return math.sqrt(np.sum((spectral.laplacian(psi).values - omega.values) ** 2)) / norm


def elliptic_pair(profile, grid, stretch=0.2):
    """Negative control: the profile's stream function on elliptical level sets and its spectral Laplacian."""
    X, Y = grid.mesh
    cx, cy = profile.center
    dx = np.mod(X - cx + np.pi, TWO_PI) - np.pi
    dy = np.mod(Y - cy + np.pi, TWO_PI) - np.pi
    r = 0.5 * (dx**2 / (1.0 + stretch) + dy**2 * (1.0 + stretch))
    psi = ScalarField(grid, profile.psi_tilde(r))
    return psi, spectral.laplacian(psi)


def symplectic_jacobian_check(samples):
    """max ||M^T J M - J|| over (r, theta) samples, M the Jacobian of the action-angle chart."""
    worst = 0.0
    for r, theta in samples:
        if not r > 0:
            raise ValidationError(f"the action-angle chart is singular at r={r!r}")
        s = math.sqrt(2.0 * r)
        c, sn = math.cos(theta), math.sin(theta)
        M = np.array([[c / s, sn / s], [-s * sn, s * c]])
        worst = max(worst, float(np.abs(M.T @ J @ M - J).max()))
    return worst


def cross_term_residual(sol, j, k, grid, t=0.0):
    """{Psi_j, Omega_k} for j != k."""
    if j == k:
        raise ValidationError("cross term needs j != k; use stationarity_residual for j == k")
    psi = ScalarField(grid, sol.profile_fields(t, grid, "stream")[j])
    omega = ScalarField(grid, sol.profile_fields(t, grid, "vorticity")[k])
    return bracket_residual(psi, omega)


def pde_residual(sol, t, grid):
    """Relative sup norm of d_t omega + {psi, omega} for the exact solution."""
    omega = sol.eval_vorticity(t, grid)
    psi = sol.eval_stream(t, grid)
    scale = spectral.gradient_sup(psi) * spectral.gradient_sup(omega)
    if scale == 0.0:
        return 0.0
    res = sol.time_derivative(t, grid) + spectral.poisson_bracket(psi, omega, dealias=False)
    return res.max_abs() / scale


def evolution_error(sol, snapshots, grid):
    """[(t, relative L2, relative Linf)] of numerical snapshots {t: ScalarField} against the exact solution."""
    out = []
    for t in sorted(snapshots):
        exact = sol.eval_vorticity(t, grid).values
        diff = snapshots[t].values - exact
        l2 = math.sqrt(np.sum(diff**2) / np.sum(exact**2)) if np.any(exact) else math.sqrt(np.sum(diff**2))
        linf = np.abs(diff).max() / (np.abs(exact).max() or 1.0)
        out.append((float(t), float(l2), float(linf)))
    return out


def exact_shift_time(velocity, N, cells=1):
    """Time after which a profile moving at ``velocity`` has travelled ``cells`` grid cells."""
    if velocity == 0.0:
        return 0.0
    return cells * TWO_PI / (N * abs(velocity))


def quasi_period_check(sol, omega0, omega_t, t_star, k, grid, velocity=None):
    """Sup over strip k's columns of |omega(t*) - omega(0) shifted by v t*|, relative to the profile amplitude.

    ``velocity`` overrides v_k (used for the wrong-velocity negative control).
    v t* N / 2pi must be an integer number of cells.
    """
    v = sol.velocities[k] if velocity is None else velocity
    cells = v * t_star * grid.N / TWO_PI
    m = int(round(cells))
    if abs(cells - m) > 1e-6:
        raise ValidationError(f"shift {cells:.6f} cells is not an integer; pick t* with exact_shift_time")
    strip = sol.flow.strips[sol.strip_index[k]]
    cols = grid.columns_in(strip.a, strip.b)
    shifted = np.roll(omega0.values, m, axis=1)
    amp = np.abs(sol.profile_fields(0.0, grid)[k]).max()
    diff = np.abs(omega_t.values[cols] - shifted[cols]).max()
    return float(diff / amp) if amp > 0 else float(diff)


def zero_mean_residuals(sol, grid):
    """Relative grid means of V'', V', V and of every Omega_k, Psi_k."""
    out = {}
    for order, name in ((2, "V''"), (1, "V'"), (0, "V")):
        vals = sol.flow.eval(grid.x, order)
        scale = np.abs(vals).max()
        out[name] = abs(vals.mean()) / scale if scale > 0 else 0.0
    for k, (psi, omega) in enumerate(zip(sol.profile_fields(0.0, grid, "stream"), sol.profile_fields(0.0, grid))):
        for name, f in ((f"Omega_{k}", omega), (f"Psi_{k}", psi)):
            scale = np.abs(f).max()
            out[name] = abs(f.mean()) / scale if scale > 0 else 0.0
    return out


def jacobian_samples(n=100, seed=0):
    rng = np.random.default_rng(seed)
    return list(zip(rng.uniform(0.01, 2.0, n), rng.uniform(0.0, TWO_PI, n)))


def static_checks(sol, grid):
    """Every check that does not need time stepping."""
    N = grid.N
    recs = []
    lap = [laplacian_consistency(p, grid) for p in sol.profiles]
    tol = spectral_tolerance(max(lap, default=0.0))
    for k, p in enumerate(sol.profiles):
        recs.append(record(f"laplacian_consistency[{k}]", N, lap[k], CONSTRUCTION_RTOL))
        recs.append(record(f"stationarity_residual[{k}]", N, stationarity_residual(p, grid), CONSTRUCTION_RTOL))
        psi, omega = elliptic_pair(p, grid)
        recs.append(record(f"nonradial_control[{k}]", N, bracket_residual(psi, omega), 1e-3, negative=True))
    for name, val in zero_mean_residuals(sol, grid).items():
        recs.append(record(f"zero_mean[{name}]", N, val, MEAN_RTOL))
    recs.append(record("symplectic_jacobian", N, symplectic_jacobian_check(jacobian_samples()), JACOBIAN_TOL))
    for j in range(sol.K):
        for k in range(sol.K):
            if j != k:
                recs.append(record(f"cross_term[{j},{k}]", N, cross_term_residual(sol, j, k, grid), tol))
    for t in (0.0, 0.37, 1.0):
        recs.append(record(f"pde_residual[t={t}]", N, pde_residual(sol, t, grid), tol))
    return recs, tol


def conservation_records(series, omega0_sup, N):
    """Mean, energy and enstrophy drift over a diagnostics series."""
    e0, z0 = series[0].energy, series[0].enstrophy
    mean_drift = max(abs(d.mean_omega) for d in series) / omega0_sup if omega0_sup else 0.0
    e_drift = max(abs(d.energy - e0) for d in series) / abs(e0) if e0 else 0.0
    z_drift = max(abs(d.enstrophy - z0) for d in series) / abs(z0) if z0 else 0.0
    return [
        record("mean_conservation", N, mean_drift, 1e-11),
        record("energy_drift", N, e_drift, 1e-9),
        record("enstrophy_drift", N, z_drift, 1e-9),
    ]


def dynamic_checks(sol, grid, dt, t_end, cfl_cap=0.5, allow_cfl_violation=False):
    """Evolve the exact initial datum and compare with the exact solution."""
    from .solver import EulerSolver, SolverConfig

    N = grid.N
    solver = EulerSolver(grid)
    omega0 = sol.eval_vorticity(0.0, grid)
    steps = max(1, int(math.ceil(t_end / dt)))
    cfg = SolverConfig(N, dt, t_end, cfl_cap, snapshot_stride=max(1, steps // 10), allow_cfl_violation=allow_cfl_violation)
    final, series = solver.run(cfg, omega0)
    (_, l2, linf), = evolution_error(sol, {final.t: final.omega}, grid)
    recs = [record(f"evolution_error_l2[t={final.t:g}]", N, l2, EVOLUTION_RTOL)]
    recs += conservation_records(series, omega0.max_abs(), N)
    for k, v in enumerate(sol.velocities):
        t_star = exact_shift_time(v, N, cells=1) if v != 0.0 else 10 * dt
        n = max(1, int(math.ceil(t_star / dt)))
        kcfg = SolverConfig(N, t_star / n, t_star, cfl_cap, snapshot_stride=n, allow_cfl_violation=allow_cfl_violation)
        st, _ = solver.run(kcfg, omega0)
        recs.append(record(f"quasi_period[{k}]", N, quasi_period_check(sol, omega0, st.omega, t_star, k, grid), EVOLUTION_RTOL))
        wrong = v + TWO_PI / (N * t_star)
        res = quasi_period_check(sol, omega0, st.omega, t_star, k, grid, velocity=wrong)
        recs.append(record(f"wrong_velocity_control[{k}]", N, res, NEGATIVE_MARGIN * EVOLUTION_RTOL, negative=True))
    return recs, series, final


def run_all(sol, grid, dt, t_end, cfl_cap=0.5, allow_cfl_violation=False):
    recs, tol = static_checks(sol, grid)
    dyn, _, _ = dynamic_checks(sol, grid, dt, t_end, cfl_cap, allow_cfl_violation)
    return recs + dyn
