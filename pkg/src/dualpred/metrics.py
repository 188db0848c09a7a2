"""Run metrics: energy ratio, RMSE and error-bound accounting."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Optional, Sequence

from .errors import ValidationError
from .protocol import StepRecord

__all__ = [
    "RunReport",
    "REPORT_FIELDS",
    "energy_ratio",
    "rmse",
    "summarize",
    "summarize_columns",
    "reports_to_csv",
    "reports_to_json",
]


@dataclass(frozen=True)
class RunReport:
    trace_name: str
    scheme_name: str
    eps: float
    m: int
    k_total: int
    n_tx: int
    energy_ratio: float
    rmse_prediction: float
    rmse_data: float
    max_abs_data_error: float
    violations: int

    @property
    def failed(self) -> bool:
        return self.violations > 0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self, header: bool = True) -> str:
        return reports_to_csv([self], header=header)


REPORT_FIELDS = tuple(f.name for f in fields(RunReport))


def energy_ratio(n_tx: int, k_total: int) -> float:
    if k_total < 1:
        raise ValidationError(f"k_total must be >= 1, got {k_total}")
    if not 0 <= n_tx <= k_total:
        raise ValidationError(f"n_tx must lie in [0, {k_total}], got {n_tx}")
    return n_tx / k_total


def rmse(errors: Iterable[float]) -> float:
    """Root mean square of ``errors``, summed left to right."""
    total = 0.0
    n = 0
    for e in errors:
        if not math.isfinite(e):
            raise ValidationError(f"error value {n} is not finite: {e!r}")
        total += e * e
        n += 1
    if n == 0:
        raise ValidationError("rmse of an empty sequence")
    return math.sqrt(total / n)


def summarize_columns(
    transmitted: Sequence[bool],
    prediction_errors: Sequence[Optional[float]],
    data_errors: Sequence[float],
    eps: float,
    *,
    trace_name: str = "",
    scheme_name: str = "",
    m: int = 0,
) -> RunReport:
    """Build a report from per-step columns.

    ``prediction_errors`` uses ``None`` for bootstrap steps. With no
    post-bootstrap step at all, ``rmse_prediction`` is reported as 0.
    """
    k_total = len(data_errors)
    if k_total == 0:
        raise ValidationError("cannot summarize an empty ledger")
    n_tx = sum(1 for t in transmitted if t)
    predicted = [e for e in prediction_errors if e is not None]
    max_abs = 0.0
    violations = 0
    for e in data_errors:
        a = abs(e)
        if a > max_abs:
            max_abs = a
        if a > eps:
            violations += 1
    return RunReport(
        trace_name=trace_name,
        scheme_name=scheme_name,
        eps=float(eps),
        m=int(m),
        k_total=k_total,
        n_tx=n_tx,
        energy_ratio=energy_ratio(n_tx, k_total),
        rmse_prediction=rmse(predicted) if predicted else 0.0,
        rmse_data=rmse(data_errors),
        max_abs_data_error=max_abs,
        violations=violations,
    )


def summarize(
    ledger: Sequence[StepRecord],
    eps: float,
    *,
    trace_name: str = "",
    scheme_name: str = "",
    m: int = 0,
) -> RunReport:
    if not ledger:
        raise ValidationError("cannot summarize an empty ledger")
    return summarize_columns(
        [r.transmitted for r in ledger],
        [r.prediction_error for r in ledger],
        [r.data_error for r in ledger],
        eps,
        trace_name=trace_name,
        scheme_name=scheme_name,
        m=m,
    )


def reports_to_csv(reports: Iterable[RunReport], header: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(REPORT_FIELDS)
    for report in reports:
        writer.writerow([getattr(report, name) for name in REPORT_FIELDS])
    return buf.getvalue()


def reports_to_json(reports: Iterable[RunReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2) + "\n"
