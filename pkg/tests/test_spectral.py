import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eqp import spectral
from eqp.errors import NonZeroMeanError, ValidationError
from eqp.spectral import ScalarField, get_grid

from conftest import band_limited


def field(grid, fn):
    return grid.sample(fn)


@pytest.mark.parametrize("N", [8, 15, 17, 0])
def test_grid_rejects_bad_sizes(N):
    with pytest.raises(ValidationError):
        spectral.TorusGrid(N)


def test_grid_nodes_and_cutoff():
    g = get_grid(48)
    assert g.x[1] == pytest.approx(2 * np.pi / 48)
    assert g.cutoff == 16
    X, Y = g.mesh
    # values[i, j] is (x_i, y_j)
    assert X[3, 0] == g.x[3] and Y[0, 5] == g.x[5]


def test_derivative_examples(grid64):
    g = grid64
    assert np.abs(spectral.derivative(field(g, lambda x, y: np.sin(x)), "x").values - np.cos(g.mesh[0])).max() < 1e-13
    assert np.abs(spectral.derivative(field(g, lambda x, y: 3.0 + 0 * x), "x").values).max() < 1e-14
    assert np.abs(spectral.derivative(field(g, lambda x, y: np.sin(3 * y)), "x").values).max() < 1e-14


def test_derivative_rejects_axis(grid64):
    with pytest.raises(ValueError):
        spectral.derivative(field(grid64, lambda x, y: x * 0), "z")


def test_derivative_all_resolved_modes(grid64):
    g = grid64
    X, _ = g.mesh
    for m in range(1, g.N // 3 + 1):
        d = spectral.derivative(ScalarField(g, np.sin(m * X)), "x").values
        assert np.abs(d - m * np.cos(m * X)).max() < 1e-12 * m


def test_nyquist_derivative_is_zeroed(grid64):
    g = grid64
    X, Y = g.mesh
    f = ScalarField(g, np.cos(g.N // 2 * X) + np.cos(g.N // 2 * Y))
    assert np.abs(spectral.derivative(f, "x").values).max() < 1e-12
    assert np.abs(spectral.derivative(f, "y").values).max() < 1e-12


def test_inverse_laplacian_examples(grid64):
    g = grid64
    X, Y = g.mesh
    psi = spectral.inverse_laplacian_zero_mean(ScalarField(g, np.cos(X)))
    assert np.abs(psi.values + np.cos(X)).max() < 1e-14
    psi = spectral.inverse_laplacian_zero_mean(ScalarField(g, np.cos(2 * X + 3 * Y)))
    assert np.abs(psi.values + np.cos(2 * X + 3 * Y) / 13).max() < 1e-14
    assert abs(psi.mean()) < 1e-16


def test_inverse_laplacian_rejects_mean(grid64):
    with pytest.raises(NonZeroMeanError, match="5.000e-01"):
        spectral.inverse_laplacian_zero_mean(ScalarField(grid64, np.full((64, 64), 0.5)))


def test_laplacian_examples_and_round_trip(grid64):
    g = grid64
    X, _ = g.mesh
    assert np.abs(spectral.laplacian(ScalarField(g, np.cos(X))).values + np.cos(X)).max() < 1e-12
    assert np.abs(spectral.laplacian(ScalarField(g, np.ones((64, 64)))).values).max() < 1e-14
    f = band_limited(g, 3)
    f -= f.mean()
    back = spectral.laplacian(spectral.inverse_laplacian_zero_mean(ScalarField(g, f))).values
    assert np.abs(back - f).max() <= 1e-10 * np.abs(f).max()


def test_transform_round_trip(grid64):
    f = ScalarField(grid64, np.random.default_rng(1).normal(size=(64, 64)))
    back = spectral.inverse(spectral.forward(f)).values
    assert np.abs(back - f.values).max() <= 1e-12 * f.max_abs()


def test_bracket_examples(grid64):
    g = grid64
    X, Y = g.mesh
    b = spectral.poisson_bracket(ScalarField(g, np.sin(X)), ScalarField(g, np.sin(Y)))
    assert np.abs(b.values - np.cos(X) * np.cos(Y)).max() < 1e-13
    f = ScalarField(g, band_limited(g, 0))
    assert spectral.poisson_bracket(f, f).max_abs() < 1e-12 * f.max_abs() ** 2
    fx = ScalarField(g, np.sin(X) + np.cos(3 * X))
    gx = ScalarField(g, np.exp(np.sin(X)))
    assert spectral.poisson_bracket(fx, gx).max_abs() < 1e-14


def _sample_modes(grid, coeffs):
    X, Y = grid.mesh
    return sum(c * np.cos(kx * X + ky * Y + ph) for (kx, ky, ph), c in coeffs.items())


def test_bracket_dealiasing_matches_alias_free_product(grid64):
    """Oracle: the same trigonometric fields on a grid twice as fine, where the product cannot alias."""
    rng = np.random.default_rng(7)
    c = grid64.cutoff
    coeffs_f = {(int(kx), int(ky), ph): a for kx, ky, ph, a in zip(rng.integers(-c, c + 1, 12), rng.integers(-c, c + 1, 12), rng.uniform(0, 6, 12), rng.normal(size=12))}
    coeffs_g = {(int(kx), int(ky), ph): a for kx, ky, ph, a in zip(rng.integers(-c, c + 1, 12), rng.integers(-c, c + 1, 12), rng.uniform(0, 6, 12), rng.normal(size=12))}
    fine = get_grid(128)
    exact = spectral.poisson_bracket(ScalarField(fine, _sample_modes(fine, coeffs_f)), ScalarField(fine, _sample_modes(fine, coeffs_g)), dealias=False)
    spec = np.fft.fft2(exact.values)
    k = np.fft.fftfreq(128, 1 / 128)
    keep = (np.abs(k)[:, None] <= c) & (np.abs(k)[None, :] <= c)
    expected = np.real(np.fft.ifft2(spec * keep))[::2, ::2]
    got = spectral.poisson_bracket(ScalarField(grid64, _sample_modes(grid64, coeffs_f)), ScalarField(grid64, _sample_modes(grid64, coeffs_g)))
    assert np.abs(got.values - expected).max() < 1e-10 * np.abs(expected).max()
    out = np.fft.fft2(got.values)
    k64 = np.fft.fftfreq(64, 1 / 64)
    high = (np.abs(k64)[:, None] > c) | (np.abs(k64)[None, :] > c)
    assert np.abs(out[high]).max() < 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_bracket_antisymmetric_and_bilinear(seed, a, b):
    g = get_grid(32)
    f = ScalarField(g, band_limited(g, seed, kmax=4))
    h = ScalarField(g, band_limited(g, seed + 1, kmax=4))
    q = ScalarField(g, band_limited(g, seed + 2, kmax=4))
    fh = spectral.poisson_bracket(f, h).values
    scale = f.max_abs() * h.max_abs() * 16
    assert np.abs(fh + spectral.poisson_bracket(h, f).values).max() <= 1e-11 * scale
    lhs = spectral.poisson_bracket(a * f + b * q, h).values
    rhs = a * fh + b * spectral.poisson_bracket(q, h).values
    assert np.abs(lhs - rhs).max() <= 1e-11 * (abs(a) + abs(b) + 1) * (scale + q.max_abs() * h.max_abs() * 16)
    # integral of a bracket vanishes
    assert abs(np.mean(fh)) <= 1e-11 * scale


def test_velocity_examples(grid64, sol):
    g = grid64
    X, Y = g.mesh
    V = ScalarField(g, np.repeat(sol.flow.eval(g.x, 0)[:, None], g.N, axis=1))
    ux, uy = spectral.velocity_from_stream(V)
    assert ux.max_abs() < 1e-14
    ux, uy = spectral.velocity_from_stream(ScalarField(g, np.sin(Y)))
    assert np.abs(ux.values + np.cos(Y)).max() < 1e-14 and uy.max_abs() < 1e-14
    ux, uy = spectral.velocity_from_stream(ScalarField(g, np.full((64, 64), 2.0)))
    assert ux.max_abs() == 0.0 or ux.max_abs() < 1e-15
    assert uy.max_abs() < 1e-15


def test_velocity_of_shear_converges(sol):
    g = get_grid(256)
    V = ScalarField(g, np.repeat(sol.flow.eval(g.x, 0)[:, None], g.N, axis=1))
    _, uy = spectral.velocity_from_stream(V)
    dV = sol.flow.eval(g.x, 1)
    assert np.abs(uy.values[:, 0] - dV).max() < 1e-11 * np.abs(dV).max()


def test_workers_validation():
    with pytest.raises(ValidationError):
        spectral.set_workers(0)
    spectral.set_workers(1)
