import numpy as np
import pytest

from eqp.config import build_solution, default_config
from eqp.spectral import get_grid


@pytest.fixture(scope="session")
def cfg():
    return default_config()


@pytest.fixture(scope="session")
def sol(cfg):
    return build_solution(cfg)


@pytest.fixture(scope="session")
def grid256():
    return get_grid(256)


@pytest.fixture(scope="session")
def grid64():
    return get_grid(64)


def band_limited(grid, seed, kmax=6):
    """Random smooth zero-mean real field with modes |k_x|, |k_y| <= kmax."""
    rng = np.random.default_rng(seed)
    X, Y = grid.mesh
    f = np.zeros_like(X)
    for kx in range(-kmax, kmax + 1):
        for ky in range(0, kmax + 1):
            if kx == 0 and ky == 0:
                continue
            a, b = rng.normal(size=2)
            f += a * np.cos(kx * X + ky * Y) + b * np.sin(kx * X + ky * Y)
    return f


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, _, line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
