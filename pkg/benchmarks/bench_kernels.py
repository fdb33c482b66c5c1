"""Time the numba and numpy kernel paths, alone and inside a full RK4 step.

    python3 benchmarks/bench_kernels.py [--grid 256] [--repeat 20]
"""
import argparse
import contextlib
import timeit

import numpy as np

from eqp import _kernels
from eqp.config import build_solution, default_config
from eqp.solver import EulerSolver, SolverState
from eqp.spectral import get_grid


@contextlib.contextmanager
def use_kernels(table):
    saved = {name: getattr(_kernels, name) for name in table}
    for name, fn in table.items():
        setattr(_kernels, name, fn)
    try:
        yield
    finally:
        for name, fn in saved.items():
            setattr(_kernels, name, fn)


def kernel_args(g, rng):
    shape = (g.N, g.N // 2 + 1)
    c = [rng.normal(size=shape) + 1j * rng.normal(size=shape) for _ in range(5)]
    r = [rng.normal(size=(g.N, g.N)) for _ in range(4)]
    return {
        "bracket_combine": tuple(r),
        "spectral_gradient": (c[0], g.ikx, g.iky, g.dealias_mask),
        "stream_from_vorticity": (c[0], g.inv_neg_k2, g.dealias_mask),
        "axpy": (c[0], 0.5, c[1]),
        "rk4_combine": (*c, 1e-3),
    }


def best_of(fn, repeat):
    fn()  # warm up (and compile)
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--grid", type=int, default=256)
    p.add_argument("--repeat", type=int, default=20)
    args = p.parse_args()

    g = get_grid(args.grid)
    rng = np.random.default_rng(0)
    tables = {"numpy": _kernels.NUMPY_KERNELS}
    if _kernels.HAVE_NUMBA:
        tables["numba"] = _kernels.ACTIVE_KERNELS
    else:
        print("numba unavailable; timing the numpy path only")

    print(f"N={args.grid}, best of {args.repeat}, milliseconds")
    print(f"{'kernel':<24}" + "".join(f"{name:>10}" for name in tables))
    for kname, kargs in kernel_args(g, rng).items():
        row = [best_of(lambda t=t: t[kname](*kargs), args.repeat) * 1e3 for t in tables.values()]
        print(f"{kname:<24}" + "".join(f"{v:10.3f}" for v in row))

    omega = build_solution(default_config()).eval_vorticity(0.0, g)
    state = SolverState.from_field(omega)
    solver = EulerSolver(g)
    row = []
    for table in tables.values():
        with use_kernels(table):
            row.append(best_of(lambda: solver.step_rk4(state, 1e-3), args.repeat) * 1e3)
    print(f"{'rk4 step':<24}" + "".join(f"{v:10.3f}" for v in row))


if __name__ == "__main__":
    main()
