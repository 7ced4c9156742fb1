"""Command-line front end: ``design``, ``classical``, ``quantum`` and ``sweep``.

Exit status: 0 on success (warnings allowed), 1 for configuration errors,
2 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import classical, plotting, protocols, quantum, traps
from .config import PROTOCOLS, SWEEP_TARGETS, TRAPS, ConfigError, RunConfig, load
from .numerics import NumericsError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2

SWEEP_RECIPES = {
    "fig2": [("cubic", ("cosine", "sine", "sine2"))],
    "fig3": [("quartic", ("cosine", "sine"))],
    "fig4": [("cubic", ("cosine", "sine")), ("quartic", ("cosine", "sine"))],
}


def fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path, header, rows):
    """Write rows with full-precision floats; ``path`` of '-' means stdout."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    if str(path) == "-":
        sys.stdout.write(buf.getvalue())
    else:
        Path(path).write_text(buf.getvalue())


def effective_u(u: float, trap: str) -> float:
    # f2(1) vanishes identically at u = 3 pi; sweeps step off it
    if trap == "quartic" and math.isclose(u, 3 * math.pi, rel_tol=1e-12):
        return protocols.QUARTIC_SAFE_U
    return u


def make_protocol(name: str, trap: str, u: float) -> protocols.ProtocolAnsatz:
    if name == "cosine":
        order = "quartic" if trap == "quartic" else "cubic"
        return protocols.solve_cosine_coefficients(u, order)
    if name == "sine":
        return protocols.SINE_SINGLE
    if name == "sine2":
        return protocols.solve_sine_coefficients(u)
    if name == "experimental":
        return protocols.EXPERIMENTAL_SINE
    raise ConfigError(f"unknown protocol {name!r}")


def model_for(cfg: RunConfig, trap=None, xi_over_d=None) -> traps.TrapModel:
    return traps.TrapModel.from_oscillator_units(
        trap or cfg.trap, xi_over_d or cfg.xi_over_d, **cfg.physical)


def _output(cfg, default):
    return cfg.output or default


def _figure_path(csv_path):
    return Path(csv_path).with_suffix(".png") if csv_path != "-" else None


def cmd_design(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    ansatz = make_protocol(cfg.protocol, cfg.trap, cfg.u)
    model = model_for(cfg)
    print(f"protocol: {cfg.protocol} ({ansatz.family})", file=out)
    print(f"u: {fmt(cfg.u)}", file=out)
    for i, c in enumerate(ansatz.coefficients):
        name = f"a{i}" if ansatz.family == "cosine_odd" else f"a{i + 1}"
        print(f"{name} = {fmt(c)}", file=out)
    if len(ansatz.candidates) > 1:
        a1 = ansatz.coefficients[1 if ansatz.family == "cosine_odd" else 0]
        others = [fmt(c) for c in ansatz.candidates if c != a1]
        print("other admissible a1: " + ", ".join(others), file=out)
    report = protocols.check_boundary_conditions(ansatz, 1e-10)
    print(f"boundary conditions (tol {report.tolerance:g}):", file=out)
    for key, value in report.residuals.items():
        flag = "ok" if report.passed[key] else "FAIL"
        print(f"  {key:8s} {fmt(value):>24s}  {flag}", file=out)
    for order in ("cubic", "quartic"):
        f_end, df_end = protocols.final_excitation(ansatz, cfg.u, order)
        tag = "f1" if order == "cubic" else "f2"
        print(f"{tag}(1) = {fmt(f_end)}   d{tag}/ds(1) = {fmt(df_end)}", file=out)
    if not report.all_passed:
        warnings.warn(f"{cfg.protocol} protocol violates boundary conditions: "
                      + ", ".join(report.failures()))

    s = np.linspace(0.0, 1.0, cfg.schedule_samples)
    schedule = traps.build_schedule(ansatz, cfg.u, model, cfg.inversion, cfg.schedule_samples)
    rows = zip(s, protocols.eval_x1(ansatz, s), protocols.eval_dx1(ansatz, s),
               protocols.eval_ddx1(ansatz, s), schedule.x0)
    path = _output(cfg, "design.csv")
    write_csv(path, ["s", "x1", "dx1_ds", "ddx1_ds2", "x0"], rows)
    if cfg.plot and _figure_path(path):
        plotting.plot_design(s, protocols.eval_x1(ansatz, s), schedule.x0,
                             _figure_path(path), cfg.protocol)
    return EXIT_OK


def cmd_classical(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    ansatz = make_protocol(cfg.protocol, cfg.trap, cfg.u)
    model = model_for(cfg)
    schedule = traps.build_schedule(ansatz, cfg.u, model, cfg.inversion, cfg.schedule_samples)
    traj = classical.integrate(model, schedule, cfg.ode_steps)
    energy = classical.residual_energy(traj)
    print(f"residual_energy_over_hbar_omega0 = {fmt(energy)}", file=out)
    path = _output(cfg, "classical.csv")
    x0 = schedule(traj.s)
    write_csv(path, ["s", "x", "v", "x0", "instantaneous_energy"],
              zip(traj.s, traj.x, traj.v, x0, traj.energy_profile()))
    if cfg.plot and _figure_path(path):
        plotting.plot_trajectory(traj.s, traj.x, x0, _figure_path(path))
    return EXIT_OK


def cmd_quantum(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    ansatz = make_protocol(cfg.protocol, cfg.trap, cfg.u)
    model = model_for(cfg)
    schedule = traps.build_schedule(ansatz, cfg.u, model, cfg.inversion, cfg.schedule_samples)
    grid = quantum.GridSpec.for_transport(model.d_over_a0, cfg.grid_points, cfg.time_steps,
                                          cfg.padding)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", quantum.LeakageWarning)
        f, result = quantum.transport_fidelity(model, schedule, grid,
                                               snapshot_s=tuple(cfg.snapshots))
    print(f"fidelity = {fmt(f)}", file=out)
    print(f"final_centroid_over_a0 = {fmt(result.psi.mean_position())}", file=out)
    print(f"norm_drift = {fmt(result.norm_drift)}", file=out)
    for w in result.warnings:
        print(f"warning: leakage: {w}", file=out)
        warnings.warn(w)
    if cfg.snapshots:
        keys = sorted(result.snapshots)
        path = _output(cfg, "quantum.csv")
        header = ["x_over_a0"] + [f"density_s{fmt(s)}" for s in keys]
        cols = [grid.x] + [result.snapshots[s] for s in keys]
        write_csv(path, header, zip(*cols))
        if cfg.plot and _figure_path(path):
            plotting.plot_snapshots(grid.x, result.snapshots, _figure_path(path))
    return EXIT_OK


def sweep_rows(cfg: RunConfig, target: str):
    grid = np.logspace(cfg.sweep_log10_min, cfg.sweep_log10_max, cfg.sweep_points)
    rows = []
    for trap, names in SWEEP_RECIPES[target]:
        u = effective_u(cfg.u, trap)
        for name in cfg.protocols or names:
            ansatz = make_protocol(name, trap, u)
            if target == "fig4":
                qgrid = quantum.GridSpec.for_transport(cfg.d_over_a0, cfg.grid_points,
                                                       cfg.time_steps, cfg.padding)
                points = quantum.sweep_fidelity(trap, ansatz, u, grid, qgrid, cfg.physical,
                                                cfg.inversion, cfg.schedule_samples,
                                                cfg.workers)
                for p in points:
                    rows.append(dict(protocol=name, trap=trap,
                                     log10_xi_over_d=p.log10_xi_over_d, value=p.value,
                                     sign="", status=p.status if not p.warning
                                     else f"{p.status} (leakage: {p.warning})"))
            else:
                result = classical.sweep_xi(trap, ansatz, u, grid, cfg.physical,
                                            cfg.ode_steps, cfg.inversion,
                                            cfg.schedule_samples, cfg.workers)
                for p in result.points:
                    rows.append(dict(protocol=name, trap=trap,
                                     log10_xi_over_d=p.log10_xi_over_d, value=p.value,
                                     sign=p.sign, status=p.status))
    return rows


SWEEP_HEADER = ["protocol", "trap", "log10_xi_over_d", "value", "sign", "status"]


def cmd_sweep(cfg: RunConfig, target: str | None = None, out=None) -> int:
    out = out or sys.stdout
    target = target or cfg.sweep_target
    rows = sweep_rows(cfg, target)
    path = _output(cfg, f"{target}.csv")
    write_csv(path, SWEEP_HEADER,
              ([r[k] if r[k] is not None else "" for k in SWEEP_HEADER] for r in rows))
    bad = sum(r["status"] != "ok" for r in rows)
    print(f"{target}: {len(rows)} points written to {path} ({bad} not ok)", file=out)
    if cfg.plot and _figure_path(path):
        plotting.plot_sweep(rows, _figure_path(path),
                            "fidelity" if target == "fig4" else "energy")
    return EXIT_OK


COMMANDS = {"design": cmd_design, "classical": cmd_classical, "quantum": cmd_quantum,
            "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anharmonic-sta",
        description="Trigonometric shortcut-to-adiabaticity transport in anharmonic traps.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat key = value configuration file")
        p.add_argument("--protocol", choices=PROTOCOLS)
        p.add_argument("--trap", choices=TRAPS)
        p.add_argument("--u", help="dimensionless duration omega0*t_f, e.g. 3pi")
        p.add_argument("--xi-over-d", type=float)
        p.add_argument("--inversion", choices=("perturbative", "exact"))
        p.add_argument("--output", help="CSV path ('-' for stdout)")
        p.add_argument("--sweep-target", choices=SWEEP_TARGETS)
        p.add_argument("--grid-points", type=int)
        p.add_argument("--ode-steps", type=int)
        p.add_argument("--time-steps", type=int)
        p.add_argument("--sweep-points", type=int)
        p.add_argument("--snapshots", help="s values for density snapshots, e.g. '0 0.5 1'")
        p.add_argument("--workers", type=int)
        p.add_argument("--plot", action="store_true", default=None,
                       help="also render a PNG next to the CSV")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        cfg = load(args.config, overrides)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            status = COMMANDS[args.command](cfg)
        except (ConfigError, quantum.GridError) as exc:
            print(f"configuration error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except protocols.NoSolutionError as exc:
            print(f"numerical failure: {exc}", file=sys.stderr)
            for a1, g in (exc.trace or [])[:: max(1, len(exc.trace or []) // 20)]:
                print(f"  a1={fmt(a1)} objective={g}", file=sys.stderr)
            return EXIT_NUMERIC
        except classical.DynamicsError as exc:
            print(f"numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        except (NumericsError, quantum.QuantumDivergenceError,
                traps.TrapDepthError) as exc:
            print(f"numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
