import numpy as np
import pytest
from scipy.integrate import dblquad

from eqp.errors import CFLViolation, NonZeroMeanError, SolverAbort, ValidationError
from eqp.solver import EulerSolver, SolverConfig, SolverState, compute_diagnostics, rhs
from eqp.spectral import ScalarField, get_grid
from eqp.verification import profile_pair

from conftest import band_limited


def test_rhs_vanishes_for_pure_shear(sol, grid256):
    w = ScalarField(grid256, sol.background(grid256, 2))
    assert rhs(w).max_abs() <= 1e-12 * w.max_abs() ** 2


def test_rhs_tiny_for_isolated_profile(sol, grid256):
    _, om = profile_pair(sol.profiles[0], grid256)
    om = ScalarField(grid256, om.values - om.values.mean())
    assert rhs(om).max_abs() <= 1e-9 * om.max_abs() ** 2


def test_rhs_matches_exact_time_derivative(sol, grid256):
    w = sol.eval_vorticity(0.3, grid256)
    exact = sol.time_derivative(0.3, grid256)
    assert (rhs(w) - exact).max_abs() <= 1e-7 * exact.max_abs()


def test_rhs_rejects_nonzero_mean(grid64):
    with pytest.raises(NonZeroMeanError):
        rhs(ScalarField(grid64, np.ones((64, 64))))


def test_single_shell_field_is_steady(grid64):
    # any combination of modes with one |k| is a steady Euler flow
    X, Y = grid64.mesh
    w = ScalarField(grid64, np.cos(2 * X) + 0.7 * np.sin(2 * Y) - 0.3 * np.cos(2 * Y + 0.4))
    state, _ = EulerSolver(grid64).run(SolverConfig(64, 0.01, 1.0), w)
    assert np.abs(state.omega.values - w.values).max() <= 1e-12


def test_dt_zero_is_identity(grid64):
    w = ScalarField(grid64, band_limited(grid64, 1))
    s0 = SolverState.from_field(w)
    s1 = EulerSolver(grid64).step_rk4(s0, 0.0)
    assert np.array_equal(s1.omega_hat, s0.omega_hat)
    assert s1.t == 0.0 and s1.step_index == 1


def test_forward_backward_step(grid64):
    w = ScalarField(grid64, 0.1 * band_limited(grid64, 2, kmax=4))
    solver = EulerSolver(grid64)
    s0 = SolverState.from_field(w)
    back = solver.step_rk4(solver.step_rk4(s0, 1e-3), -1e-3)
    assert np.abs(back.omega.values - w.values).max() <= 1e-10 * w.max_abs()


def test_step_error_is_fifth_order(grid64):
    w = ScalarField(grid64, 0.2 * band_limited(grid64, 3, kmax=3))
    solver = EulerSolver(grid64)
    s0 = SolverState.from_field(w)

    def ref(h):
        s = s0
        for _ in range(16):
            s = solver.step_rk4(s, h / 16)
        return s.omega_hat

    errs = [np.abs(solver.step_rk4(s0, h).omega_hat - ref(h)).max() for h in (0.04, 0.02)]
    assert 20 < errs[0] / errs[1] < 45


def test_diagnostics_of_cosine_against_quadrature():
    g = get_grid(32)
    X, Y = g.mesh
    d = compute_diagnostics(ScalarField(g, np.cos(X)))
    # psi = -cos x, so -1/2 psi omega = 1/2 cos^2 x
    energy = dblquad(lambda y, x: 0.5 * np.cos(x) ** 2, 0, 2 * np.pi, 0, 2 * np.pi)[0]
    assert d.energy == pytest.approx(energy, rel=1e-12)
    assert d.enstrophy == pytest.approx(energy, rel=1e-12)
    assert d.energy == pytest.approx(np.pi**2, rel=1e-12)
    assert abs(d.casimir3) < 1e-12 and abs(d.mean_omega) < 1e-15
    assert d.max_velocity == pytest.approx(1.0, rel=1e-12)


def test_run_zero_time_gives_single_record(grid64):
    w = ScalarField(grid64, band_limited(grid64, 4))
    seen = []
    state, series = EulerSolver(grid64).run(SolverConfig(64, 1e-3, 0.0), w, observers=[seen.append])
    assert len(series) == 1 and len(seen) == 1
    assert np.array_equal(state.omega.values, w.values)


def test_run_hits_t_end_and_strides(grid64):
    w = ScalarField(grid64, 0.1 * band_limited(grid64, 5, kmax=3))
    seen = []
    state, series = EulerSolver(grid64).run(SolverConfig(64, 0.01, 0.105, snapshot_stride=4), w,
                                            observers=[lambda s: seen.append(s.step_index)])
    assert state.t == 0.105
    assert seen == [0, 4, 8, 11]
    assert [d.t for d in series][-1] == 0.105


def test_cfl_violation_and_override(sol, grid64):
    w = ScalarField(grid64, band_limited(grid64, 6))
    solver = EulerSolver(grid64)
    with pytest.raises(CFLViolation):
        solver.run(SolverConfig(64, 0.5, 1.0), w)
    with pytest.raises(SolverAbort) as info:
        solver.run(SolverConfig(64, 0.5, 100.0, allow_cfl_violation=True), w)
    assert info.value.step_index >= 1


def test_config_validation():
    for kw in (dict(dt=0.0), dict(t_end=-1.0), dict(snapshot_stride=0), dict(cfl_cap=0.0)):
        args = dict(N=64, dt=0.01, t_end=1.0)
        args.update(kw)
        with pytest.raises(ValidationError):
            SolverConfig(**args)


def test_grid_mismatch(grid64):
    with pytest.raises(ValidationError):
        EulerSolver(grid64).run(SolverConfig(32, 0.01, 0.1), ScalarField(grid64, band_limited(grid64, 7)))


def test_invariants_conserved(grid64):
    w = ScalarField(grid64, 0.3 * band_limited(grid64, 8, kmax=4))
    _, series = EulerSolver(grid64).run(SolverConfig(64, 2e-3, 0.5, snapshot_stride=25), w)
    e0, z0 = series[0].energy, series[0].enstrophy
    assert max(abs(d.energy - e0) for d in series) <= 1e-9 * abs(e0)
    assert max(abs(d.enstrophy - z0) for d in series) <= 1e-9 * abs(z0)
    assert max(abs(d.mean_omega) for d in series) <= 1e-15 * w.max_abs() * 100
