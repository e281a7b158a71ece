"""Command-line interface: simulate, estimate, flops, bench.

All flags are long-form. Every subcommand accepts ``--config FILE`` with a
JSON object whose keys mirror the flag names (dashes or underscores);
explicit flags override config values. JSON reports carry a
schema_version field. Exit status is 0 only if all requested work
succeeded.
"""

import argparse
import json
import os
import sys

from . import bench as bench_mod
from . import flop_model as fm
from .dgp import DgpConfig, simulate
from .errors import (
    DegenerateEstimateError,
    DimensionError,
    PanelFormatError,
    SingularWeightMatrixError,
)
from .estimator import estimate
from .panel import read_panel_csv, write_panel_csv

SCHEMA_VERSION = 1


class CliError(Exception):
    pass


def _merge_config(args: argparse.Namespace, parser_defaults: dict) -> dict:
    """defaults < config file < explicit flags (flags parse to non-None)."""
    merged = dict(parser_defaults)
    if getattr(args, "config", None):
        try:
            with open(args.config) as f:
                cfg = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read config {args.config}: {exc}")
        if not isinstance(cfg, dict):
            raise CliError("config file must hold a JSON object")
        for key, val in cfg.items():
            key = key.replace("-", "_")
            if key not in merged:
                raise CliError(f"unknown config key {key!r}")
            merged[key] = val
    for key in merged:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    return merged


def _int_list(text) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(int(x) for x in text)
    try:
        return tuple(int(part) for part in str(text).split(",") if part.strip())
    except ValueError as exc:
        raise CliError(f"expected comma-separated integers, got {text!r}: {exc}")


def _write_report(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        with open(out, "w") as f:
            f.write(text + "\n")
    else:
        print(text)


def cmd_simulate(args) -> int:
    opts = _merge_config(
        args,
        {
            "delta": 0.5,
            "T": None,
            "N": None,
            "seed": None,
            "burn_in": 50,
            "eta_sd": 1.0,
            "v_sd": 1.0,
            "out": None,
        },
    )
    for required in ("T", "N", "seed", "out"):
        if opts[required] is None:
            raise CliError(f"--{required.replace('_', '-')} is required")
    try:
        config = DgpConfig(
            delta=float(opts["delta"]),
            T=int(opts["T"]),
            N=int(opts["N"]),
            seed=int(opts["seed"]),
            burn_in=int(opts["burn_in"]),
            eta_sd=float(opts["eta_sd"]),
            v_sd=float(opts["v_sd"]),
        )
    except ValueError as exc:
        raise CliError(str(exc))
    panel = simulate(config)
    write_panel_csv(panel, opts["out"])
    print(f"wrote {panel.N * (panel.T + 1)} data rows to {opts['out']}")
    return 0


def cmd_estimate(args) -> int:
    opts = _merge_config(args, {"in_path": None, "method": "both", "out": None})
    if opts["in_path"] is None:
        raise CliError("--in is required")
    if opts["method"] not in ("fd", "fod", "both"):
        raise CliError(f"--method must be fd, fod, or both, got {opts['method']!r}")
    try:
        panel = read_panel_csv(opts["in_path"])
    except OSError as exc:
        raise CliError(f"cannot read {opts['in_path']}: {exc}")
    methods = ("fd", "fod") if opts["method"] == "both" else (opts["method"],)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "panel": {"N": panel.N, "T": panel.T},
        "estimates": {},
    }
    for method in methods:
        est = estimate(panel, method)
        payload["estimates"][method] = {
            "delta_hat": est.delta_hat,
            "m": est.m,
            "diagnostics": est.diagnostics,
        }
    if len(methods) == 2:
        payload["abs_diff"] = abs(
            payload["estimates"]["fd"]["delta_hat"]
            - payload["estimates"]["fod"]["delta_hat"]
        )
    _write_report(payload, opts["out"])
    return 0


def cmd_flops(args) -> int:
    opts = _merge_config(
        args,
        {
            "T": None,
            "N": None,
            "method": None,
            "stage": None,
            "exponent": None,
            "format": "json",
            "out": None,
        },
    )
    for required in ("T", "N", "method"):
        if opts[required] is None:
            raise CliError(f"--{required} is required")
    if opts["method"] not in ("fd", "fod"):
        raise CliError(f"--method must be fd or fod, got {opts['method']!r}")
    T, N = int(opts["T"]), int(opts["N"])
    try:
        if opts["exponent"]:
            if opts["exponent"] not in ("in_T", "in_N"):
                raise CliError("--exponent must be in_T or in_N")
            value = fm.growth_exponent(opts["method"], T, N, opts["exponent"])
            print(repr(value))
            return 0
        report = fm.fd_flops(T, N) if opts["method"] == "fd" else fm.fod_flops(T, N)
    except ValueError as exc:
        raise CliError(str(exc))
    if opts["stage"]:
        try:
            print(report.stage(opts["stage"]))
        except KeyError as exc:
            raise CliError(str(exc))
        return 0
    if opts["format"] == "csv":
        lines = ["stage,flops"]
        lines += [f"{name},{count}" for name, count in report.stages]
        lines.append(f"total,{report.total}")
        text = "\n".join(lines)
        if opts["out"]:
            with open(opts["out"], "w") as f:
                f.write(text + "\n")
        else:
            print(text)
    elif opts["format"] == "json":
        payload = {"schema_version": SCHEMA_VERSION, **report.as_dict()}
        _write_report(payload, opts["out"])
    else:
        raise CliError(f"--format must be csv or json, got {opts['format']!r}")
    return 0


def cmd_bench(args) -> int:
    opts = _merge_config(
        args,
        {
            "t_grid": bench_mod.DEFAULT_T_GRID,
            "n_grid": bench_mod.DEFAULT_N_GRID,
            "replications": 100,
            "methods": "fd,fod",
            "warmup": 3,
            "seed": 20180801,
            "delta": 0.5,
            "out_dir": None,
            "plots": False,
            "parallel_cells": False,
        },
    )
    out_dir = opts["out_dir"] or os.environ.get("FODGMM_OUT_DIR") or "bench_out"
    methods = opts["methods"]
    if isinstance(methods, str):
        methods = tuple(m.strip() for m in methods.split(",") if m.strip())
    try:
        plan = bench_mod.BenchPlan(
            t_grid=_int_list(opts["t_grid"]),
            n_grid=_int_list(opts["n_grid"]),
            replications=int(opts["replications"]),
            methods=tuple(methods),
            warmup=int(opts["warmup"]),
            base_seed=int(opts["seed"]),
            delta=float(opts["delta"]),
        )
    except ValueError as exc:
        raise CliError(str(exc))
    result = bench_mod.run(plan, parallel_cells=bool(opts["parallel_cells"]))
    written = bench_mod.emit(result, out_dir, plots=bool(opts["plots"]))
    for path in written:
        print(f"wrote {path}")
    if not result.timing_comparable:
        print("note: cells ran in parallel; timings are not comparable")
    if result.has_failures:
        failures = [c for c in result.cells if c.error]
        for cell in failures:
            print(
                f"cell ({cell.method}, T={cell.T}, N={cell.N}) failed: {cell.error}",
                file=sys.stderr,
            )
        bad_audits = [a for a in result.audits if not a["ok"]]
        if bad_audits:
            print(f"{len(bad_audits)} equivalence audits failed", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fodgmm",
        description=(
            "One-step AR(1) panel GMM via first differences and forward "
            "orthogonal deviations, with flop accounting and benchmarks."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a panel CSV")
    p.add_argument("--delta", type=float)
    p.add_argument("--T", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--burn-in", dest="burn_in", type=int)
    p.add_argument("--eta-sd", dest="eta_sd", type=float)
    p.add_argument("--v-sd", dest="v_sd", type=float)
    p.add_argument("--out")
    p.add_argument("--config")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="estimate from a panel CSV")
    p.add_argument("--in", dest="in_path")
    p.add_argument("--method", choices=["fd", "fod", "both"])
    p.add_argument("--out")
    p.add_argument("--config")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("flops", help="evaluate the cost model")
    p.add_argument("--T", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--method", choices=["fd", "fod"])
    p.add_argument("--stage", help="print a single stage's flop count")
    p.add_argument("--exponent", choices=["in_T", "in_N"])
    p.add_argument("--format", choices=["json", "csv"])
    p.add_argument("--out")
    p.add_argument("--config")
    p.set_defaults(func=cmd_flops)

    p = sub.add_parser("bench", help="run the timing grid and emit artifacts")
    p.add_argument("--T-grid", dest="t_grid")
    p.add_argument("--N-grid", dest="n_grid")
    p.add_argument("--replications", type=int)
    p.add_argument("--methods")
    p.add_argument("--warmup", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--plots", action="store_true", default=None)
    p.add_argument("--parallel-cells", dest="parallel_cells", action="store_true", default=None)
    p.add_argument("--config")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (PanelFormatError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SingularWeightMatrixError as exc:
        print(f"error: singular weight matrix: {exc}", file=sys.stderr)
        return 1
    except DegenerateEstimateError as exc:
        print(f"error: degenerate estimate: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
