"""Command line entry point: ``eqp build|run|verify|compare``.

Exit codes: 0 success, 1 verification failure, 2 configuration or
validation error, 3 runtime abort (non-finite values).
"""
import argparse
import dataclasses
import json
import logging
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import _kernels, spectral, verification
from .config import RunConfig, build_solution, default_config, parse_config, serialize_config
from .errors import SolverAbort, ValidationError
from .fieldio import DIAGNOSTICS_COLUMNS, read_field, read_header, write_csv, write_field
from .solver import EulerSolver, SolverConfig

log = logging.getLogger("eqp")

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_ABORT = 0, 1, 2, 3
MANIFEST_VERSION = 1


def load_config(args):
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ValidationError(f"cannot read config: {exc}", key="--config") from None
        cfg = parse_config(text)
    else:
        cfg = default_config()
    cfg = cfg.with_overrides(
        N=args.grid,
        dt=args.dt,
        t_end=args.t_end,
        snapshot_stride=args.snapshot_stride,
        workers=args.workers,
        allow_cfl_violation=True if args.allow_cfl_violation else None,
    )
    if args.out:
        cfg = dataclasses.replace(cfg, output=str(args.out))
    elif not cfg.output:
        root = os.environ.get("EQP_OUT", "eqp_out")
        stem = Path(args.config).stem if args.config else "default"
        cfg = dataclasses.replace(cfg, output=str(Path(root) / stem))
    spectral.set_workers(cfg.workers)
    return cfg


def make_manifest(cfg, sol, files):
    velocities, periods = sol.frequencies()
    return {
        "manifest_version": MANIFEST_VERSION,
        "config": cfg.to_dict(),
        "config_text": serialize_config(cfg),
        "velocities": list(velocities),
        "periods": [p if math.isfinite(p) else None for p in periods],
        "commensurate_pairs": [list(p) for p in sol.commensurate_pairs()],
        "strip_index": list(sol.strip_index),
        "workers": cfg.workers,
        "kernel_backend": _kernels.BACKEND,
        "field_layout": "EQPF v1, row-major over x index then y index",
        "files": sorted(files),
    }


def write_manifest(out, manifest):
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    (out / "resolved.cfg").write_text(manifest["config_text"], encoding="utf-8")


def read_manifest(run_dir):
    path = Path(run_dir) / "manifest.json"
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read manifest: {exc}", key=str(path)) from None


def solution_from_manifest(manifest):
    cfg = RunConfig.from_dict(manifest["config"])
    sol = build_solution(cfg)
    recorded = tuple(float(v) for v in manifest.get("velocities", sol.velocities))
    if recorded != sol.velocities:
        log.warning("manifest velocities %s differ from recomputed %s; using the manifest", recorded, sol.velocities)
        sol = dataclasses.replace(sol, velocities=recorded)
    return cfg, sol


def cmd_build(args):
    cfg = load_config(args)
    sol = build_solution(cfg)
    grid = spectral.get_grid(cfg.N)
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    write_field(out / "omega_t0.eqpf", sol.eval_vorticity(0.0, grid), 0.0)
    write_field(out / "psi_t0.eqpf", sol.eval_stream(0.0, grid), 0.0)
    write_manifest(out, make_manifest(cfg, sol, ["omega_t0.eqpf", "psi_t0.eqpf"]))
    print(f"built K={sol.K} solution on N={cfg.N}; velocities {list(sol.velocities)} -> {out}")
    return EXIT_OK


def cmd_run(args):
    cfg = load_config(args)
    sol = build_solution(cfg)
    grid = spectral.get_grid(cfg.N)
    out = Path(cfg.output)
    snap_dir = out / "snapshots"
    snap_dir.mkdir(parents=True, exist_ok=True)
    solver = EulerSolver(grid)
    scfg = SolverConfig(cfg.N, cfg.dt, cfg.t_end, cfg.cfl_cap, cfg.snapshot_stride, cfg.allow_cfl_violation)
    files = []
    errors = {}
    started = time.perf_counter()

    def dump(state):
        name = f"snapshots/omega_s{state.step_index:08d}.eqpf"
        omega = state.omega
        write_field(out / name, omega, state.t)
        files.append(name)
        errors[state.t] = verification.evolution_error(sol, {state.t: omega}, grid)[0][1:]
        log.info("step %d t=%.6f elapsed %.2fs", state.step_index, state.t, time.perf_counter() - started)

    omega0 = sol.eval_vorticity(0.0, grid)
    try:
        final, series = solver.run(scfg, omega0, observers=[dump])
    except SolverAbort as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        write_manifest(out, make_manifest(cfg, sol, files))
        return EXIT_ABORT
    rows = [
        [d.t, d.energy, d.enstrophy, d.casimir3, d.mean_omega, d.max_velocity, *errors[d.t]]
        for d in series
    ]
    write_csv(out / "diagnostics.csv", DIAGNOSTICS_COLUMNS, rows)
    files.append("diagnostics.csv")
    write_manifest(out, make_manifest(cfg, sol, files))
    print(f"t={final.t:g} steps={final.step_index} rel L2 error {rows[-1][6]:.3e}, rel Linf error {rows[-1][7]:.3e}")
    return EXIT_OK


def cmd_verify(args):
    cfg = load_config(args)
    from .radial_profile import check_support_fits, make_default_profile
    from .shear_flow import build_shear_flow

    grid = spectral.get_grid(cfg.N)
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    flow = build_shear_flow([(s.a, s.b) for s in cfg.strips], cfg.gap_amplitudes, steepness=cfg.shear_steepness)
    support = []
    for k, p in enumerate(cfg.profiles):
        prof = make_default_profile((p.x, p.y), p.r_max, p.amplitude, p.steepness, p.family)
        strip = flow.strips[k] if k < flow.K else None
        ok = strip is not None and check_support_fits(prof, strip)
        half = min(prof.center[0] - strip.a, strip.b - prof.center[0]) if strip else float("nan")
        support.append(verification.VerificationRecord(f"support_fits[{k}]", cfg.N, prof.rho_max, half, bool(ok)))
    if not all(r.passed for r in support):
        return _finish_verify(out, support)
    sol = build_solution(cfg)
    records = support + verification.run_all(sol, grid, cfg.dt, cfg.t_end, cfg.cfl_cap, cfg.allow_cfl_violation)
    return _finish_verify(out, records)


def _finish_verify(out, records):
    report = {"records": [r.to_dict() for r in records], "passed": all(r.passed for r in records)}
    (out / "verify_report.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    for r in records:
        mark = "PASS" if r.passed else "FAIL"
        rel = ">=" if r.kind == "negative" else "<="
        print(f"{mark}  {r.name:<36} N={r.N:<4} residual={r.residual:.3e} ({rel} {r.tolerance:.1e})")
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def cmd_compare(args):
    run_dir = Path(args.run_dir)
    manifest = read_manifest(run_dir)
    cfg, sol = solution_from_manifest(manifest)
    snaps = {}
    for path in sorted((run_dir / "snapshots").glob("*.eqpf")):
        snaps[read_header(path)[1]] = path
    if args.times:
        wanted = []
        for tok in args.times.split(","):
            t = float(tok)
            match = [s for s in snaps if abs(s - t) <= 1e-9 * max(1.0, abs(t))]
            if not match:
                raise ValidationError(f"no snapshot at t={t:g}", key="--times")
            wanted.append(match[0])
    else:
        wanted = sorted(snaps)
    rows = []
    for t in wanted:
        field, _ = read_field(snaps[t])
        rows.append(verification.evolution_error(sol, {t: field}, field.grid)[0])
    dest = Path(args.out) if args.out else run_dir / "compare.csv"
    write_csv(dest, ("t", "l2_err_vs_analytic", "linf_err_vs_analytic"), rows)
    for t, l2, linf in rows:
        print(f"t={t:.6g} rel L2 {l2:.3e} rel Linf {linf:.3e}")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="eqp", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="config file (default: built-in two-strip setup)")
        sp.add_argument("--out", help="output directory (default: $EQP_OUT/<config stem>)")
        sp.add_argument("--grid", type=int, help="override N")
        sp.add_argument("--dt", type=float)
        sp.add_argument("--t-end", type=float)
        sp.add_argument("--snapshot-stride", type=int)
        sp.add_argument("--allow-cfl-violation", action="store_true")
        sp.add_argument("--workers", type=int, help="FFT threads (recorded; never changes values)")

    for name, fn in (("build", cmd_build), ("run", cmd_run), ("verify", cmd_verify)):
        sp = sub.add_parser(name)
        common(sp)
        sp.set_defaults(func=fn)
    sp = sub.add_parser("compare")
    sp.add_argument("run_dir")
    sp.add_argument("--times", help="comma-separated snapshot times (default: all)")
    sp.add_argument("--out", help="CSV path (default: RUN_DIR/compare.csv)")
    sp.set_defaults(func=cmd_compare)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
