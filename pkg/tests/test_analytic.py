import numpy as np
import pytest

from eqp import spectral
from eqp.analytic import assemble, eval_stream, eval_vorticity, frequencies
from eqp.errors import ValidationError
from eqp.radial_profile import eval_cartesian, make_default_profile
from eqp.shear_flow import build_shear_flow
from eqp.spectral import get_grid

PI = np.pi


@pytest.fixture(scope="module")
def flow():
    return build_shear_flow([(PI / 2 - 1.05, PI / 2 + 1.05), (3 * PI / 2 - 1.05, 3 * PI / 2 + 1.05)], (40.0, -40.0))


@pytest.fixture(scope="module")
def one(flow):
    return assemble(flow, [make_default_profile((PI / 2, 1.0), 0.5, 0.0125)], strip_index=[0])


def test_no_profiles_is_stationary(flow, grid64):
    sol = assemble(flow, [])
    assert sol.K == 0
    assert np.array_equal(eval_vorticity(sol, 0.0, grid64).values, eval_vorticity(sol, 3.7, grid64).values)
    assert np.array_equal(eval_stream(sol, 0.0, grid64).values, sol.background(grid64, 0))


def test_single_profile_frequency(one, flow):
    v, periods = frequencies(one)
    assert v == (flow.velocities[0],)
    assert periods[0] == pytest.approx(2 * PI / abs(flow.velocities[0]))


def test_zero_velocity_period_is_infinite():
    f = build_shear_flow([(0.5, 5.5)], (0.0,))
    sol = assemble(f, [make_default_profile((3.0, 3.0), 0.5, 0.01)])
    assert frequencies(sol)[1] == (float("inf"),)


def test_full_period_returns_datum(one, grid64):
    T = frequencies(one)[1][0]
    a = eval_vorticity(one, 0.0, grid64).values
    b = eval_vorticity(one, T, grid64).values
    assert np.abs(a - b).max() <= 1e-9 * np.abs(a).max()


def test_zero_amplitude_is_time_independent(flow, grid64):
    sol = assemble(flow, [make_default_profile((PI / 2, 1.0), 0.5, 0.0),
                          make_default_profile((3 * PI / 2, 2.0), 0.5, 0.0)])
    assert np.array_equal(eval_vorticity(sol, 0.0, grid64).values, eval_vorticity(sol, 1.3, grid64).values)


def test_stream_laplacian_is_vorticity(sol, grid256):
    for t in (0.0, 0.4):
        w = eval_vorticity(sol, t, grid256)
        lap = spectral.laplacian(eval_stream(sol, t, grid256))
        assert (lap - w).l2() <= 1e-6 * w.l2()


def test_strips_translate_rigidly(sol, grid256):
    """Within each strip the field at t is the t = 0 field shifted in y by v_k t."""
    g = grid256
    X, Y = g.mesh
    for k, v in enumerate(sol.velocities):
        t = 0.21
        strip = sol.flow.strips[sol.strip_index[k]]
        cols = g.columns_in(strip.a, strip.b)
        moved = sol.profile_fields(t, g)[k]
        direct = eval_cartesian(sol.profiles[k], "vorticity", X, Y - v * t)
        assert np.abs(moved[cols] - direct[cols]).max() <= 1e-12


def test_support_violation_is_reported(flow):
    with pytest.raises(ValidationError, match=r"profiles\[0\]\.r_max"):
        assemble(flow, [make_default_profile((PI / 2, 1.0), 0.6, 0.01)], strip_index=[0])
    with pytest.raises(ValidationError, match=r"profiles\[0\]\.x"):
        assemble(flow, [make_default_profile((PI, 1.0), 0.1, 0.01)], strip_index=[0])


def test_profile_count_and_index_validation(flow):
    p = make_default_profile((PI / 2, 1.0), 0.1, 0.01)
    with pytest.raises(ValidationError, match="one profile per strip"):
        assemble(flow, [p])
    with pytest.raises(ValidationError, match="at most one"):
        assemble(flow, [p, p], strip_index=[0, 0])
    with pytest.raises(ValidationError, match="out of range"):
        assemble(flow, [p], strip_index=[4])


def test_commensurate_flags(sol):
    assert sol.commensurate_pairs() == [(0, 1)]


def test_time_derivative_matches_finite_difference(sol, grid256):
    h = 1e-5
    fd = (eval_vorticity(sol, 0.2 + h, grid256) - eval_vorticity(sol, 0.2 - h, grid256)).values / (2 * h)
    assert np.abs(sol.time_derivative(0.2, grid256).values - fd).max() <= 1e-6 * np.abs(fd).max()
