"""Simulation runs, multi-scheme comparisons and eps sweeps."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence, TypeVar, Union

from . import kernel
from .errors import ValidationError
from .metrics import RunReport, reports_to_csv, reports_to_json, summarize_columns
from .predictor import GainSet, SchemePreset
from .protocol import StepRecord, check_eps
from .traces import Trace

__all__ = [
    "SimConfig",
    "ComparisonTable",
    "LEDGER_FIELDS",
    "run",
    "compare",
    "sweep",
    "ledger_from_run",
    "ledger_to_csv",
]

T = TypeVar("T")
R = TypeVar("R")

LEDGER_FIELDS = ("k", "x", "prediction", "transmitted", "y", "e", "data_error")


@dataclass(frozen=True)
class SimConfig:
    eps: float
    scheme: Union[SchemePreset, GainSet]
    m: int = 3
    emit_ledger: bool = False

    def __post_init__(self) -> None:
        check_eps(self.eps)
        if isinstance(self.m, bool) or not isinstance(self.m, int) or self.m < 2:
            raise ValidationError(f"m must be an integer >= 2, got {self.m!r}")
        if not isinstance(self.scheme, (SchemePreset, GainSet)):
            raise ValidationError(f"scheme must be a SchemePreset or GainSet, got {self.scheme!r}")

    @property
    def gains(self) -> GainSet:
        return self.scheme.gains if isinstance(self.scheme, SchemePreset) else self.scheme

    @property
    def scheme_name(self) -> str:
        return self.scheme.name if isinstance(self.scheme, SchemePreset) else "PID"


def ledger_from_run(result: kernel.DualRun) -> list[StepRecord]:
    ledger = []
    for k, (x, p, sent, y) in enumerate(
        zip(
            result.samples.tolist(),
            result.prediction.tolist(),
            result.transmitted.tolist(),
            result.y_sensor.tolist(),
        )
    ):
        bootstrap = math.isnan(p)
        prediction = None if bootstrap else p
        e = None if bootstrap else x - p
        data_error = 0.0 if sent else x - y
        ledger.append(StepRecord(k, x, prediction, bool(sent), y, e, data_error))
    return ledger


def ledger_to_csv(ledger: Iterable[StepRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(LEDGER_FIELDS)
    for r in ledger:
        writer.writerow(
            [
                r.k,
                repr(r.sample),
                "" if r.prediction is None else repr(r.prediction),
                int(r.transmitted),
                repr(r.record),
                "" if r.prediction_error is None else repr(r.prediction_error),
                repr(r.data_error),
            ]
        )
    return buf.getvalue()


def run(
    trace: Trace, cfg: SimConfig, backend: Optional[str] = None
) -> tuple[RunReport, Optional[list[StepRecord]]]:
    """Simulate one trace under one configuration.

    A pure function of ``(trace, cfg)``. The ledger is returned only when
    ``cfg.emit_ledger`` is set.
    """
    result = kernel.dual_run(trace.values, cfg.gains, cfg.m, cfg.eps, backend=backend)
    xs = result.samples.tolist()
    preds = result.prediction.tolist()
    sent = result.transmitted.tolist()
    ys = result.y_sensor.tolist()
    prediction_errors = [None if math.isnan(p) else x - p for x, p in zip(xs, preds)]
    data_errors = [0.0 if s else x - y for x, s, y in zip(xs, sent, ys)]
    report = summarize_columns(
        sent,
        prediction_errors,
        data_errors,
        cfg.eps,
        trace_name=trace.name,
        scheme_name=cfg.scheme_name,
        m=cfg.m,
    )
    ledger = ledger_from_run(result) if cfg.emit_ledger else None
    return report, ledger


def _map_ordered(fn: Callable[[T], R], items: Sequence[T], workers: int) -> list[R]:
    # The compiled kernel releases the GIL, so threads do run in parallel.
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple[RunReport, ...]

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def to_csv(self) -> str:
        return reports_to_csv(self.rows)

    def to_json(self) -> str:
        return reports_to_json(self.rows)

    def energy_grid(self) -> str:
        """Plain-text grid of energy ratios, traces down, schemes across."""
        traces: list[str] = []
        schemes: list[str] = []
        cells: dict[tuple[str, str], float] = {}
        for r in self.rows:
            if r.trace_name not in traces:
                traces.append(r.trace_name)
            if r.scheme_name not in schemes:
                schemes.append(r.scheme_name)
            cells[(r.trace_name, r.scheme_name)] = r.energy_ratio
        width = max([len(t) for t in traces] + [5])
        col = max([len(s) for s in schemes] + [8])
        lines = [" " * width + "".join(f"  {s:>{col}}" for s in schemes)]
        for t in traces:
            row = "".join(
                f"  {cells[(t, s)]:>{col}.4f}" if (t, s) in cells else "  " + " " * col
                for s in schemes
            )
            lines.append(f"{t:<{width}}{row}")
        return "\n".join(lines) + "\n"


def compare(
    traces: Sequence[Trace],
    schemes: Sequence[Union[SchemePreset, GainSet]],
    m: int = 3,
    eps: Optional[Mapping[str, float]] = None,
    workers: int = 1,
    backend: Optional[str] = None,
) -> ComparisonTable:
    """Run every (trace, scheme) pair.

    Each trace uses ``eps[trace.name]`` if given, else its ``default_eps``.
    Rows come out trace-major in input order whatever ``workers`` is.
    """
    if not traces:
        raise ValidationError("compare needs at least one trace")
    if not schemes:
        raise ValidationError("compare needs at least one scheme")
    jobs = []
    for trace in traces:
        trace_eps = (eps or {}).get(trace.name, trace.default_eps)
        if trace_eps is None:
            raise ValidationError(f"no eps configured for trace {trace.name!r}")
        for scheme in schemes:
            jobs.append((trace, SimConfig(eps=trace_eps, scheme=scheme, m=m)))
    reports = _map_ordered(lambda job: run(job[0], job[1], backend)[0], jobs, workers)
    return ComparisonTable(tuple(reports))


def sweep(
    trace: Trace,
    scheme: Union[SchemePreset, GainSet],
    eps_list: Sequence[float],
    m: int = 3,
    workers: int = 1,
    backend: Optional[str] = None,
) -> list[RunReport]:
    if not eps_list:
        raise ValidationError("eps_list must not be empty")
    cfgs = [SimConfig(eps=e, scheme=scheme, m=m) for e in eps_list]
    return _map_ordered(lambda cfg: run(trace, cfg, backend)[0], cfgs, workers)
