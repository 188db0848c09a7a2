"""PID-form one-step predictor and the history window it reads from.

The predicted value for step k is built from the last M records::

    x_hat = kp * y[-1] + ki * mean(y[-M:]) + kd * (y[-1] - y[-2])

Floating-point evaluation order is fixed so that two predictor instances fed
the same records always agree bit for bit:

* the window sum is accumulated oldest to newest, then divided by M once;
* the terms are added as ``(P + I) + D``.
"""

from __future__ import annotations

import math
import numbers
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import ValidationError

__all__ = [
    "GainSet",
    "is_finite_real",
    "HistoryWindow",
    "SchemePreset",
    "PRESET_NAMES",
    "PAPER_PID_GAINS",
    "push",
    "predict",
    "predict_values",
    "preset",
    "pid",
    "scheme_from_name",
]


def is_finite_real(value: object) -> bool:
    return (
        isinstance(value, numbers.Real)
        and not isinstance(value, bool)
        and math.isfinite(value)
    )


@dataclass(frozen=True)
class GainSet:
    """Proportional, integral and derivative weights (dimensionless)."""

    kp: float
    ki: float
    kd: float

    def __post_init__(self) -> None:
        for field in ("kp", "ki", "kd"):
            value = getattr(self, field)
            if not is_finite_real(value):
                raise ValidationError(f"{field} must be a finite real, got {value!r}")
            object.__setattr__(self, field, float(value))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.kp, self.ki, self.kd)


class HistoryWindow:
    """Fixed-capacity record history, oldest first.

    Once full, every push evicts the oldest record.
    """

    __slots__ = ("_capacity", "_records")

    def __init__(self, capacity: int, records: Iterable[float] = ()) -> None:
        if isinstance(capacity, bool) or not isinstance(capacity, numbers.Integral):
            raise ValidationError(f"capacity must be an integer, got {capacity!r}")
        if capacity < 2:
            raise ValidationError(f"capacity must be >= 2, got {capacity}")
        self._capacity = int(capacity)
        self._records: deque[float] = deque(maxlen=capacity)
        for value in records:
            self.push(value)

    @property
    def capacity(self) -> int:
        return self._capacity

    @property
    def records(self) -> tuple[float, ...]:
        return tuple(self._records)

    @property
    def full(self) -> bool:
        return len(self._records) == self._capacity

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[float]:
        return iter(self._records)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HistoryWindow):
            return NotImplemented
        return self._capacity == other._capacity and self.records == other.records

    def __repr__(self) -> str:
        return f"HistoryWindow(capacity={self._capacity}, records={list(self._records)!r})"

    def newest(self) -> float:
        if not self._records:
            raise ValidationError("window is empty")
        return self._records[-1]

    def push(self, value: float) -> "HistoryWindow":
        if not is_finite_real(value):
            raise ValidationError(f"window values must be finite reals, got {value!r}")
        self._records.append(float(value))
        return self

    def copy(self) -> "HistoryWindow":
        return HistoryWindow(self._capacity, self._records)


def push(window: HistoryWindow, value: float) -> HistoryWindow:
    """Append ``value`` as the newest record and return the same window."""
    return window.push(value)


def predict_values(kp: float, ki: float, kd: float, records: Sequence[float]) -> float:
    """Evaluate the predictor on a full, oldest-first record sequence.

    This is the arithmetic every backend must reproduce exactly.
    """
    m = len(records)
    total = 0.0
    for value in records:
        total += value
    newest = records[m - 1]
    term_p = kp * newest
    term_i = ki * (total / m)
    term_d = kd * (newest - records[m - 2])
    return (term_p + term_i) + term_d


def predict(gains: GainSet, window: HistoryWindow) -> float:
    if not window.full:
        raise ValidationError(
            f"predict needs a full window ({len(window)}/{window.capacity} records)"
        )
    return predict_values(gains.kp, gains.ki, gains.kd, window.records)


PRESET_NAMES = ("PAST", "AVERAGE", "LINEAR")

_PRESET_GAINS = {
    "PAST": GainSet(1.0, 0.0, 0.0),
    "AVERAGE": GainSet(0.0, 1.0, 0.0),
    "LINEAR": GainSet(1.0, 0.0, 1.0),
}

# Gains used for the PID scheme in the reference evaluation.
PAPER_PID_GAINS = GainSet(0.6, 0.4, 0.3)


@dataclass(frozen=True)
class SchemePreset:
    name: str
    gains: GainSet

    def __post_init__(self) -> None:
        if self.name in _PRESET_GAINS:
            if self.gains != _PRESET_GAINS[self.name]:
                raise ValidationError(
                    f"{self.name} requires gains {_PRESET_GAINS[self.name].as_tuple()}"
                )
        elif self.name != "PID":
            raise ValidationError(f"unknown scheme {self.name!r}")


def preset(name: str) -> SchemePreset:
    """Return the named fixed-gain scheme (PAST, AVERAGE or LINEAR).

    Case-insensitive. PID schemes are built with :func:`pid` instead.
    """
    key = str(name).upper()
    if key not in _PRESET_GAINS:
        raise ValidationError(
            f"unknown preset {name!r}; expected one of {', '.join(PRESET_NAMES)}"
        )
    return SchemePreset(key, _PRESET_GAINS[key])


def pid(kp: float, ki: float, kd: float) -> SchemePreset:
    return SchemePreset("PID", GainSet(kp, ki, kd))


def scheme_from_name(name: str) -> SchemePreset:
    """Like :func:`preset` but also accepts ``pid`` for the reference PID gains."""
    if str(name).upper() == "PID":
        return SchemePreset("PID", PAPER_PID_GAINS)
    return preset(name)
