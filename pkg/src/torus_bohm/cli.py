"""Command-line front end.

    torus-bohm states      [--preset states] [--config FILE] [--out DIR]
    torus-bohm trajectory  [--preset fig1]   ...  [--jobs N] [--tol X] [--field-grid N]
    torus-bohm phasespace  [--preset fig4]   ...
    torus-bohm lyapunov    [--preset table2] ...

Exit codes: 0 success, 1 usage or config error, 2 numerical failure,
3 partial results (a trajectory stopped at a node).
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, config as configmod
from .config import ConfigError, ExperimentSpec, config_hash
from .dynamics import COMPLETED, NODE_STOPPED, IntegrationError, TrajectoryConfig, integrate_trajectory
from .experiments import StateCache, build_superposition, spec_shape
from .monodromy import default_jobs, table_sweep
from .outputs import (
    PHASE_COLUMNS,
    TRAJECTORY_COLUMNS,
    phase_plot_script,
    phase_rows,
    surface_plot_script,
    trajectory_rows,
    write_csv,
    write_manifest,
    write_text,
)
from .reference_values import TABLE1
from .reports import CSV_COLUMNS, comparison_rows, summary_text
from .spectral import SpectralError, eigenpairs, flat_states, table1_states, verify_against_table1
from .wavefield import FIELD_COLUMNS, NodeProximity, sample_field

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_PARTIAL = 0, 1, 2, 3
DEFAULT_PRESET = {"states": "states", "trajectory": "fig1", "phasespace": "fig4", "lyapunov": "table2"}


class NumericalFailure(RuntimeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="torus-bohm", description="Bohmian trajectories and Lyapunov exponents on a torus.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "states": "solve the tabulated stationary states and their flat analogs",
        "trajectory": "integrate trajectories and write surface-path plots",
        "phasespace": "integrate trajectories and write (theta, theta_dot) plots",
        "lyapunov": "sweep theta0 and estimate Lyapunov exponents from the monodromy matrix",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        src = p.add_mutually_exclusive_group()
        src.add_argument("--preset", metavar="NAME", help=f"built-in run definition (default: {DEFAULT_PRESET[name]})")
        src.add_argument("--config", metavar="FILE", type=Path, help="YAML run definition")
        p.add_argument("--out", metavar="DIR", type=Path, help="output directory (default from the config)")
        p.add_argument("--jobs", metavar="N", type=int, help="worker processes (default: available cores)")
        p.add_argument("--tol", metavar="X", type=float, help="override rel_tol and abs_tol")
        if name in ("trajectory", "phasespace"):
            p.add_argument("--field-grid", metavar="N", type=int, default=0,
                           help="also sample |Psi|^2, S and the velocity on an N x N grid at t=0")
    return parser


def resolve_spec(args) -> ExperimentSpec:
    if args.config is not None:
        spec = configmod.load(args.config)
    else:
        spec = configmod.load_preset(args.preset or DEFAULT_PRESET[args.command])
    if args.tol is not None:
        if not 0.0 < args.tol < 1.0:
            raise ConfigError(f"--tol must lie in (0, 1), got {args.tol}")
        spec = spec.with_tolerance(args.tol)
    if args.out is not None:
        spec = replace(spec, out_dir=str(args.out))
    if args.jobs is not None and args.jobs < 1:
        raise ConfigError(f"--jobs must be at least 1, got {args.jobs}")
    return spec


# states


def cmd_states(spec: ExperimentSpec, out: Path, jobs: int):
    files = []
    labels = list(TABLE1)
    basis = spec.basis_size
    shape = spec_shape(spec)
    alpha = shape.alpha if spec.alpha_override is None else spec.alpha_override
    if not 0.0 <= alpha < 1.0:
        raise ConfigError(f"alpha_override must lie in [0, 1), got {alpha}")

    rows = []
    solved = {}
    width = basis + 1
    for parity, n, m in labels:
        beta, vecs = eigenpairs(alpha, m, parity, basis)
        index = n if parity == "+" else n - 1
        coeffs = dict(zip(range(0 if parity == "+" else 1, width), vecs[:, index]))
        solved[(parity, n, m)] = float(beta[index])
        lead = max(coeffs, key=lambda k: abs(coeffs[k]))
        sign = np.sign(coeffs[lead])
        table = TABLE1[(parity, n, m)][1]
        tlead = max(table, key=lambda k: abs(table[k]))
        sign *= np.sign(table[tlead])
        rows.append(["torus", f"Psi{parity}_{n}{m}", parity, n, m, beta[index], beta[index] / (2 * spec.a**2)]
                    + [sign * coeffs.get(k, 0.0) for k in range(width)])
        flat = flat_states(n, m, parity, shape)
        fc = dict(zip(flat.modes.tolist(), flat.coeffs))
        fbeta = n**2 + (m * alpha) ** 2
        rows.append(["flat", flat.label, parity, n, m, fbeta, fbeta / (2 * spec.a**2)]
                    + [fc.get(k, 0.0) for k in range(width)])
    columns = ["kind", "label", "parity", "n", "m", "beta", "energy"] + [f"c{k}" for k in range(width)]
    files.append(write_csv(out / "states.csv", columns, rows))

    report = [f"alpha = {alpha!r}, basis_size = {basis}", ""]
    if spec.alpha_override is None and (spec.R, spec.a) == (1.0, 0.5):
        table = verify_against_table1(table1_states(shape, basis))
        report += ["comparison with the tabulated states", table.format(), ""]
    else:
        report += ["state       beta_solved   n^2"]
        report += [f"Psi{p}_{n}{m:<5} {solved[(p, n, m)]:12.8f} {n**2:5d}" for p, n, m in labels]
        report.append("")

    bases = sorted(set(spec.convergence_bases) | {basis})
    conv_rows = []
    top = bases[-1]
    for parity, n, m in labels:
        index = n if parity == "+" else n - 1
        betas = {}
        for size in bases:
            if index < size:
                betas[size] = float(eigenpairs(alpha, m, parity, size)[0][index])
        for size, b in betas.items():
            conv_rows.append([f"Psi{parity}_{n}{m}", size, b, abs(b - betas[top])])
    files.append(write_csv(out / "convergence.csv", ["label", "basis_size", "beta", "drift_vs_largest"], conv_rows))
    report.append(f"basis convergence (drift against basis {top})")
    for label, size, b, drift in conv_rows:
        report.append(f"{label:<10} N={size:<4d} beta={b:.10f} drift={drift:.2e}")
    files.append(write_text(out / "states_report.txt", "\n".join(report) + "\n"))
    return files, COMPLETED, {}


# trajectory / phasespace


def _trajectory_task(task):
    sp, theta0, spec = task
    cfg = TrajectoryConfig(sp, theta0, phi0=spec.phi0, t_end=spec.t_end, rel_tol=spec.rel_tol,
                           abs_tol=spec.abs_tol, sample_dt=spec.sample_dt)
    try:
        record = integrate_trajectory(cfg)
    except NodeProximity as exc:
        return None, NODE_STOPPED, exc.t
    except IntegrationError as exc:
        raise NumericalFailure(str(exc)) from exc
    record.segments = []
    return record, record.status, record.stop_time


def _run_pool(func, tasks, jobs):
    if jobs <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(func, tasks))


def cmd_paths(spec: ExperimentSpec, out: Path, jobs: int, mode: str, field_grid: int = 0):
    cache = StateCache(spec_shape(spec), spec.basis_size, spec.use_table_beta)
    prefix = config_hash(spec)[:12]
    tasks, labels = [], []
    sps = {}
    for kind in spec.kinds():
        sps[kind] = build_superposition(spec, kind, cache)
        for j, theta0 in enumerate(spec.theta0):
            tasks.append((sps[kind], float(theta0), spec))
            labels.append(f"{prefix}_{spec.name}_{kind}_{j:02d}")
    results = _run_pool(_trajectory_task, tasks, jobs)

    files, runs = [], []
    phase_names = []
    status = COMPLETED
    for label, (sp, theta0, _), (record, run_status, stop) in zip(labels, tasks, results):
        runs.append({"label": label, "kind": sp.kind.value, "theta0": theta0, "status": run_status,
                     "stop_time": stop})
        if run_status != COMPLETED:
            status = NODE_STOPPED
        if record is None:
            continue
        traj = write_csv(out / f"{label}_trajectory.csv", TRAJECTORY_COLUMNS, trajectory_rows(record))
        phase = write_csv(out / f"{label}_phasespace.csv", PHASE_COLUMNS, phase_rows(record))
        files += [traj, phase]
        phase_names.append(phase.name)
        if mode == "trajectory":
            title = f"{spec.name} {sp.kind.value} theta0={theta0:.6g}"
            files.append(write_text(out / f"{label}_surface.gp",
                                    surface_plot_script(traj.name, title, spec.R, spec.a)))
    if mode == "phasespace" and phase_names:
        files.append(write_text(out / f"{prefix}_{spec.name}_phasespace.gp",
                                phase_plot_script(phase_names, spec.name)))
    if field_grid:
        for kind, sp in sps.items():
            data = sample_field(sp, field_grid, field_grid, 0.0)
            files.append(write_csv(out / f"{prefix}_{spec.name}_{kind}_field.csv", FIELD_COLUMNS, data))
    return files, status, {"runs": runs}


# lyapunov


def cmd_lyapunov(spec: ExperimentSpec, out: Path, jobs: int):
    if not spec.theta0:
        raise ConfigError("no theta0 points")
    cache = StateCache(spec_shape(spec), spec.basis_size, spec.use_table_beta)
    files = []
    table_rows = {}
    flagged = 0
    for kind in spec.kinds():
        sp = build_superposition(spec, kind, cache)
        try:
            rows = table_sweep(sp, spec.theta0, spec.checkpoints, spec.rel_tol, spec.abs_tol, jobs, spec.phi0)
        except IntegrationError as exc:
            raise NumericalFailure(str(exc)) from exc
        flagged += sum(not r.ok for r in rows)
        table_rows[kind] = comparison_rows(rows, spec.reference_table, kind)
        files.append(write_csv(out / f"lyapunov_{kind}.csv", CSV_COLUMNS, table_rows[kind]))
    files.append(write_text(out / "lyapunov_summary.txt", summary_text(table_rows, spec.reference_table)))
    return files, COMPLETED, {"flagged_rows": flagged}


def run(args) -> int:
    started = time.perf_counter()
    spec = resolve_spec(args)
    out = spec.output_dir()
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").unlink(missing_ok=True)
    jobs = args.jobs or default_jobs()
    files = [write_text(out / "config.yaml", configmod.serialize(replace(spec, out_dir=None)))]
    if args.command == "states":
        new, status, details = cmd_states(spec, out, jobs)
    elif args.command == "lyapunov":
        new, status, details = cmd_lyapunov(spec, out, jobs)
    else:
        new, status, details = cmd_paths(spec, out, jobs, args.command, getattr(args, "field_grid", 0))
    files += new
    write_manifest(out, command=args.command, config_hash=config_hash(spec), files=files, status=status,
                   wall_time=time.perf_counter() - started, details=details)
    print(f"{args.command}: {status}, {len(files)} files in {out}")
    return EXIT_OK if status == COMPLETED else EXIT_PARTIAL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SpectralError, NumericalFailure, IntegrationError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
