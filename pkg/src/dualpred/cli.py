"""Command-line front end.

Exit codes: 0 success, 1 I/O failure, 2 bad arguments, 3 error-bound
violation (should never happen; it means the simulator is broken).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .errors import DualPredError, ValidationError
from .metrics import RunReport, reports_to_csv, reports_to_json
from .predictor import PAPER_PID_GAINS, SchemePreset, pid, preset
from .simulator import SimConfig, compare, ledger_to_csv, run, sweep
from .traces import (
    TraceFormatError,
    gen_constant,
    gen_ramp,
    gen_random_walk,
    gen_sine,
    load_manifest,
    load_trace,
    save_trace,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_VIOLATION = 3

SCHEME_CHOICES = ("past", "average", "linear", "pid")


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


def _write(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc.strerror or exc}") from exc


def _read_trace(path: str, name: Optional[str] = None, eps: Optional[float] = None):
    try:
        return load_trace(path, name=name, default_eps=eps)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except TraceFormatError as exc:
        raise InputError(str(exc)) from exc


def _scheme(args: argparse.Namespace, require_gains: bool) -> SchemePreset:
    gains = (args.kp, args.ki, args.kd)
    given = [g is not None for g in gains]
    if args.scheme != "pid":
        if any(given):
            raise UsageError(f"--kp/--ki/--kd are not allowed with --scheme {args.scheme}")
        return preset(args.scheme)
    if all(given):
        return pid(*gains)
    if any(given) or require_gains:
        raise UsageError("--scheme pid requires all of --kp, --ki and --kd")
    return SchemePreset("PID", PAPER_PID_GAINS)


def _parse_schemes(text: str, args: argparse.Namespace) -> list[SchemePreset]:
    names = [s.strip().lower() for s in text.split(",") if s.strip()]
    if not names:
        raise UsageError("--schemes must list at least one scheme")
    schemes = []
    for name in names:
        if name not in SCHEME_CHOICES:
            raise UsageError(f"unknown scheme {name!r}; choose from {', '.join(SCHEME_CHOICES)}")
        if name == "pid":
            if any(g is not None for g in (args.kp, args.ki, args.kd)):
                if not all(g is not None for g in (args.kp, args.ki, args.kd)):
                    raise UsageError("pid gains need all of --kp, --ki and --kd")
                schemes.append(pid(args.kp, args.ki, args.kd))
            else:
                schemes.append(SchemePreset("PID", PAPER_PID_GAINS))
        else:
            schemes.append(preset(name))
    if "pid" not in names and any(g is not None for g in (args.kp, args.ki, args.kd)):
        raise UsageError("--kp/--ki/--kd only apply when pid is among --schemes")
    return schemes


def _format_reports(reports: Sequence[RunReport], fmt: str) -> str:
    return reports_to_json(reports) if fmt == "json" else reports_to_csv(reports)


def _summary(report: RunReport) -> str:
    status = "ok" if report.violations == 0 else "VIOLATION"
    return (
        f"{report.trace_name} {report.scheme_name} eps={report.eps!r} m={report.m} "
        f"n_tx={report.n_tx}/{report.k_total} energy_ratio={report.energy_ratio:.6f} "
        f"rmse_prediction={report.rmse_prediction:.6g} rmse_data={report.rmse_data:.6g} "
        f"max_abs_data_error={report.max_abs_data_error:.6g} {status}"
    )


def cmd_gen(args: argparse.Namespace) -> int:
    kind = args.kind
    if kind == "constant":
        if args.value is None:
            raise UsageError("gen constant requires --value")
        trace = gen_constant(args.value, args.n)
    elif kind == "ramp":
        trace = gen_ramp(args.a, args.b, args.n)
    elif kind == "sine":
        if args.period is None:
            raise UsageError("gen sine requires --period")
        trace = gen_sine(args.amplitude, args.period, args.n)
    else:
        trace = gen_random_walk(args.seed, args.scale, args.n)
    try:
        save_trace(trace, args.out)
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc.strerror or exc}") from exc
    print(f"{args.out} {len(trace)}")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    scheme = _scheme(args, require_gains=True)
    cfg = SimConfig(eps=args.eps, scheme=scheme, m=args.m, emit_ledger=args.ledger is not None)
    trace = _read_trace(args.trace)
    report, ledger = run(trace, cfg)
    _write(report.to_json() if args.format == "json" else report.to_csv(), args.out)
    if ledger is not None:
        _write(ledger_to_csv(ledger), args.ledger)
    print(_summary(report))
    return EXIT_VIOLATION if report.failed else EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    schemes = _parse_schemes(args.schemes, args)
    try:
        manifest = load_manifest(args.manifest)
    except OSError as exc:
        raise InputError(f"cannot read {args.manifest}: {exc.strerror or exc}") from exc
    except TraceFormatError as exc:
        raise UsageError(str(exc)) from exc
    if len(manifest) == 0:
        raise UsageError(f"manifest {args.manifest} lists no datasets")
    for entry in manifest:
        if entry.eps is None:
            raise UsageError(f"manifest entry {entry.name!r} has no eps")
    traces = [_read_trace(e.source, e.name, e.eps) for e in manifest]
    table = compare(traces, schemes, m=args.m, workers=args.workers)
    _write(table.to_json() if args.format == "json" else table.to_csv(), args.out)
    sys.stdout.write(table.energy_grid())
    return EXIT_VIOLATION if any(r.failed for r in table) else EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    scheme = _scheme(args, require_gains=True)
    try:
        eps_list = [float(e) for e in args.eps_list.split(",") if e.strip()]
    except ValueError:
        raise UsageError(f"--eps-list must be comma-separated numbers, got {args.eps_list!r}") from None
    if not eps_list:
        raise UsageError("--eps-list is empty")
    trace = _read_trace(args.trace)
    reports = sweep(trace, scheme, eps_list, m=args.m, workers=args.workers)
    _write(_format_reports(reports, args.format), args.out)
    for report in reports:
        print(_summary(report))
    return EXIT_VIOLATION if any(r.failed for r in reports) else EXIT_OK


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _window_size(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"must be >= 2, got {value}")
    return value


def _non_negative(text: str) -> float:
    value = float(text)
    if not (value >= 0 and value != float("inf")):
        raise argparse.ArgumentTypeError(f"must be finite and >= 0, got {text}")
    return value


def _add_gain_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kp", type=float, help="proportional gain (pid only)")
    p.add_argument("--ki", type=float, help="integral gain (pid only)")
    p.add_argument("--kd", type=float, help="derivative gain (pid only)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dualpred", description="Dual-prediction transmission simulator"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a synthetic trace file")
    g.add_argument("kind", choices=("constant", "ramp", "sine", "walk"))
    g.add_argument("--n", type=_positive_int, required=True, help="number of samples")
    g.add_argument("--out", required=True, help="output trace file")
    g.add_argument("--value", type=float, help="constant value")
    g.add_argument("--a", type=float, default=0.0, help="ramp offset")
    g.add_argument("--b", type=float, default=1.0, help="ramp slope")
    g.add_argument("--amplitude", type=float, default=1.0, help="sine amplitude")
    g.add_argument("--period", type=float, help="sine period in samples")
    g.add_argument("--seed", type=int, default=0, help="random walk seed")
    g.add_argument("--scale", type=_non_negative, default=1.0, help="random walk step scale")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="simulate one trace under one scheme")
    r.add_argument("--trace", required=True)
    r.add_argument("--scheme", choices=SCHEME_CHOICES, required=True)
    _add_gain_flags(r)
    r.add_argument("--eps", type=_non_negative, required=True)
    r.add_argument("--m", type=_window_size, default=3)
    r.add_argument("--ledger", metavar="PATH", help="also write the per-step ledger CSV")
    r.add_argument("--out", help="report file (default: standard output)")
    r.add_argument("--format", choices=("json", "csv"), default="json")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="run several schemes over a dataset manifest")
    c.add_argument("--manifest", required=True, help="lines of name,path,eps")
    c.add_argument("--schemes", default="past,average,linear,pid")
    _add_gain_flags(c)
    c.add_argument("--m", type=_window_size, default=3)
    c.add_argument("--workers", type=_positive_int, default=1)
    c.add_argument("--out", help="table file (default: standard output)")
    c.add_argument("--format", choices=("json", "csv"), default="csv")
    c.set_defaults(func=cmd_compare)

    s = sub.add_parser("sweep", help="run one scheme over a list of eps values")
    s.add_argument("--trace", required=True)
    s.add_argument("--scheme", choices=SCHEME_CHOICES, required=True)
    _add_gain_flags(s)
    s.add_argument("--eps-list", required=True, help="comma-separated eps values")
    s.add_argument("--m", type=_window_size, default=3)
    s.add_argument("--workers", type=_positive_int, default=1)
    s.add_argument("--out", help="report file (default: standard output)")
    s.add_argument("--format", choices=("json", "csv"), default="csv")
    s.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValidationError) as exc:
        print(f"dualpred {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"dualpred {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DualPredError as exc:
        print(f"dualpred {args.command}: internal error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
