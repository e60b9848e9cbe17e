"""Command-line front end.

Subcommands
-----------
``run <config>``
    Integrate a configured flow; writes the energy ledger, any requested
    snapshots, the final state, and the resolved config into the output
    directory.
``converge <config>``
    Run the config's step-size ladder against its reference solution and
    report observed orders; partial results are saved if a ladder member
    fails.
``coeffs``
    Print the per-mode alpha and scalar beta coefficient tables for a
    given step size, step ratio, and order.
``presets list`` / ``presets run <name>``
    Enumerate or execute the named experiment presets.

Exit codes: 0 success, 2 configuration error, 3 solver failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .config import apply_overrides, serialize_config, validate_config
from .convergence import self_convergence
from .errors import (
    ConfigError,
    HermitianSymmetryError,
    SnapshotFormatError,
    SolverError,
)
from .etd import StepGeometry, alpha_coeffs, beta_coeffs
from .presets import preset_config, preset_description, preset_names
from .runio import LedgerWriter, snapshot_name, write_snapshot
from .solver import run_flow

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4


def _add_override_flags(parser, with_dt=True):
    parser.add_argument("--seed", type=int, help="override the RNG seed")
    parser.add_argument("--out", help="override the output directory")
    parser.add_argument("--order", type=int, choices=(1, 2, 3),
                        help="override the scheme order")
    parser.add_argument("--theta", type=float, help="override the enforcing parameter")
    if with_dt:
        parser.add_argument(
            "--dt", type=float,
            help="override the fixed step size (disables adaptive stepping)",
        )


def _load_raw_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: YAML parse error: {exc}") from exc
    if data is None:
        raise ConfigError(f"{path}: empty configuration")
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return data


def _resolve(data, args):
    overrides = {
        "seed": getattr(args, "seed", None),
        "out": getattr(args, "out", None),
        "order": getattr(args, "order", None),
        "theta": getattr(args, "theta", None),
        "dt": getattr(args, "dt", None),
    }
    return validate_config(apply_overrides(data, **overrides))


def _prepare_out_dir(config):
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.yaml").write_text(serialize_config(config))
    return out_dir


def _execute_run(config):
    out_dir = _prepare_out_dir(config)
    backend = config.build_backend()
    model = config.build_model(backend)
    phi0 = config.build_initial(backend)

    def save_snapshot(t, field):
        write_snapshot(out_dir / snapshot_name(t), field, time=t,
                       model=config.model_kind)

    with LedgerWriter(out_dir / "energy_ledger.csv") as ledger:
        result = run_flow(
            model,
            phi0,
            t_end=config.t_end,
            order=config.order_index,
            dt=config.dt,
            adaptive=config.adaptive,
            estimator=config.estimator,
            picard_tol=config.picard_tol,
            max_picard=config.max_picard,
            bootstrap_substeps=config.bootstrap_substeps,
            snapshot_times=config.snapshot_times,
            row_callback=ledger.write,
            snapshot_callback=save_snapshot,
        )
    write_snapshot(out_dir / "final_state.f64", result.state.phi_nodal,
                   time=result.state.t, model=config.model_kind)
    last = result.final_row
    print(
        f"{config.model_kind}: {len(result.rows) - 1} steps to t = {last.t:g}, "
        f"E = {last.E:.10g}, R = {last.R:.10g}  ->  {out_dir}"
    )
    return EXIT_OK


def _execute_converge(config):
    if config.convergence is None:
        raise ConfigError("converge: config needs a 'convergence' section")
    out_dir = _prepare_out_dir(config)
    backend = config.build_backend()
    model = config.build_model(backend)
    phi0 = config.build_initial(backend)
    conv = config.convergence
    table_path = out_dir / "convergence.csv"
    try:
        result = self_convergence(
            model,
            phi0,
            t_end=config.t_end,
            taus=conv["taus"],
            order=config.order_index,
            ref_dt=conv["ref_dt"],
            ref_order=conv["ref_order"] - 1,
            picard_tol=config.picard_tol,
            ref_picard_tol=conv.get("ref_picard_tol"),
            max_picard=config.max_picard,
            bootstrap_substeps=config.bootstrap_substeps,
            progress=lambda msg: print(msg, file=sys.stderr),
        )
    except SolverError as exc:
        partial = getattr(exc, "partial", None)
        if partial is not None:
            lines = ["tau,phi_error,R_error"]
            lines += [
                f"{t:.17g},{p:.17g},{r:.17g}"
                for t, p, r in zip(partial["taus"], partial["phi_errors"],
                                   partial["r_errors"])
            ]
            lines.append(f"# aborted: {exc}")
            table_path.write_text("\n".join(lines) + "\n")
            print(f"study aborted; partial table saved to {table_path}",
                  file=sys.stderr)
        raise
    lines = result.table_lines()
    table_path.write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    return EXIT_OK


def _cmd_run(args):
    return _execute_run(_resolve(_load_raw_config(args.config), args))


def _cmd_converge(args):
    return _execute_converge(_resolve(_load_raw_config(args.config), args))


def _cmd_coeffs(args):
    if args.dt is None or args.dt <= 0.0:
        raise ConfigError("coeffs: --dt must be given and positive")
    if args.ratio <= 0.0:
        raise ConfigError(f"coeffs: --ratio must be positive, got {args.ratio:g}")
    try:
        symbols = np.array([float(s) for s in args.symbols.split(",")])
    except ValueError as exc:
        raise ConfigError(f"coeffs: bad --symbols list: {exc}") from exc
    order = (args.order or 2) - 1
    geom = StepGeometry(dt=args.dt, order=order, ratio=args.ratio)
    alphas = alpha_coeffs(geom, symbols)
    betas = beta_coeffs(geom)
    js = list(range(-1, order))
    lines = ["L," + ",".join(f"alpha_{j}" for j in js)]
    for i, L in enumerate(symbols):
        values = ",".join(f"{alphas[j, i]:.17g}" for j in range(order + 1))
        lines.append(f"{L:.17g},{values}")
    lines.append("beta," + ",".join(f"{b:.17g}" for b in betas))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_presets(args):
    if args.action == "list":
        for name in preset_names():
            print(f"{name}: {preset_description(name)}")
        return EXIT_OK
    if not args.name:
        raise ConfigError("presets run: a preset name is required")
    try:
        data = preset_config(args.name)
    except KeyError:
        known = ", ".join(preset_names())
        raise ConfigError(
            f"unknown preset '{args.name}' (known: {known})"
        ) from None
    config = _resolve(data, args)
    if config.convergence is not None:
        return _execute_converge(config)
    return _execute_run(config)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="etdflow",
        description="Renormalized exponential time differencing spectral solvers.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="integrate a configured flow")
    run.add_argument("config", help="YAML configuration file")
    _add_override_flags(run)
    run.set_defaults(handler=_cmd_run)

    conv = sub.add_parser("converge", help="run a step-size convergence study")
    conv.add_argument("config", help="YAML configuration file")
    _add_override_flags(conv, with_dt=False)
    conv.set_defaults(handler=_cmd_converge)

    coeffs = sub.add_parser("coeffs", help="print ETD coefficient tables")
    coeffs.add_argument("--dt", type=float, help="step size")
    coeffs.add_argument("--order", type=int, choices=(1, 2, 3), help="scheme order")
    coeffs.add_argument("--ratio", type=float, default=1.0,
                        help="step ratio dt_next/dt_prev (order 3 only)")
    coeffs.add_argument("--symbols", default="0,-1,-10,-100,-10000",
                        help="comma-separated linear symbol values L")
    coeffs.add_argument("--out", help="write the table to a file instead of stdout")
    coeffs.set_defaults(handler=_cmd_coeffs)

    presets = sub.add_parser("presets", help="list or run experiment presets")
    presets.add_argument("action", choices=("list", "run"))
    presets.add_argument("name", nargs="?", help="preset name (for 'run')")
    _add_override_flags(presets)
    presets.set_defaults(handler=_cmd_presets)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, HermitianSymmetryError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except SnapshotFormatError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
