"""Sensor and base-station state machines for dual-prediction transmission.

Both ends run the same predictor over the same record history. The sensor
sends a sample only when the prediction misses it by more than ``eps``; the
base station records the received value, or its own prediction when nothing
arrives. Because the histories stay identical, ``|x_k - y_k| <= eps`` holds
at every step.

The first ``M`` samples are always transmitted so both windows fill with
real data before any prediction is made.

This module is the step-by-step reference. :mod:`dualpred.kernel` runs the
same loop over whole traces much faster.
"""

from __future__ import annotations

import math
import numbers
import struct
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import InvariantViolation, ProtocolError, ValidationError
from .predictor import GainSet, HistoryWindow, is_finite_real, predict

__all__ = [
    "Transmission",
    "StepRecord",
    "StationRecord",
    "SensorNode",
    "BaseStation",
    "LosslessChannel",
    "sensor_step",
    "base_step",
    "run_pair",
]


def same_bits(a: float, b: float) -> bool:
    """Bitwise float equality (tells 0.0 from -0.0)."""
    return struct.pack("<d", a) == struct.pack("<d", b)


def check_eps(eps: float) -> float:
    if isinstance(eps, bool) or not isinstance(eps, numbers.Real):
        raise ValidationError(f"eps must be a real number, got {eps!r}")
    if not math.isfinite(eps) or eps < 0:
        raise ValidationError(f"eps must be finite and >= 0, got {eps!r}")
    return float(eps)


@dataclass(frozen=True)
class Transmission:
    k: int
    value: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise ValidationError(f"transmitted value must be finite, got {self.value!r}")


@dataclass(frozen=True)
class StepRecord:
    """What happened at one time step, seen from the sensor.

    ``prediction`` and ``prediction_error`` are ``None`` during bootstrap.
    """

    k: int
    sample: float
    prediction: Optional[float]
    transmitted: bool
    record: float
    prediction_error: Optional[float]
    data_error: float


@dataclass(frozen=True)
class StationRecord:
    k: int
    record: float
    transmitted: bool


class SensorNode:
    def __init__(self, gains: GainSet, m: int, eps: float) -> None:
        self.gains = gains
        self.window = HistoryWindow(m)
        self.eps = check_eps(eps)
        self.k = 0
        self.n_tx = 0

    @property
    def m(self) -> int:
        return self.window.capacity

    def step(self, sample: float) -> tuple[StepRecord, Optional[Transmission]]:
        if not is_finite_real(sample):
            raise ValidationError(f"sample must be a finite real, got {sample!r}")
        sample = float(sample)
        k = self.k
        if not self.window.full:
            record = StepRecord(k, sample, None, True, sample, None, 0.0)
            msg: Optional[Transmission] = Transmission(k, sample)
        else:
            estimate = predict(self.gains, self.window)
            error = sample - estimate
            if abs(error) > self.eps:
                record = StepRecord(k, sample, estimate, True, sample, error, 0.0)
                msg = Transmission(k, sample)
            else:
                record = StepRecord(k, sample, estimate, False, estimate, error, sample - estimate)
                msg = None
        self.window.push(record.record)
        self.k += 1
        if record.transmitted:
            self.n_tx += 1
        return record, msg


class BaseStation:
    def __init__(self, gains: GainSet, m: int) -> None:
        self.gains = gains
        self.window = HistoryWindow(m)
        self.k = 0

    @classmethod
    def for_sensor(cls, sensor: SensorNode) -> "BaseStation":
        return cls(sensor.gains, sensor.m)

    @property
    def m(self) -> int:
        return self.window.capacity

    def step(self, msg: Optional[Transmission]) -> StationRecord:
        k = self.k
        if msg is not None:
            if msg.k != k:
                raise ProtocolError(f"base station expected step {k}, received step {msg.k}")
            value = msg.value
        elif not self.window.full:
            raise ProtocolError(
                f"no transmission at bootstrap step {k}; a bootstrap packet was lost"
            )
        else:
            value = predict(self.gains, self.window)
        self.window.push(value)
        self.k += 1
        return StationRecord(k, value, msg is not None)


def sensor_step(node: SensorNode, sample: float) -> tuple[StepRecord, Optional[Transmission]]:
    return node.step(sample)


def base_step(station: BaseStation, msg: Optional[Transmission]) -> StationRecord:
    return station.step(msg)


class LosslessChannel:
    """Ordered, lossless, zero-latency link from sensor to base station.

    Kept as its own object so lossy or delayed links can replace it. It
    rejects duplicate or out-of-order deliveries.
    """

    def __init__(self) -> None:
        self._last_k = -1
        self.delivered = 0

    def convey(self, msg: Optional[Transmission]) -> Optional[Transmission]:
        if msg is None:
            return None
        if msg.k <= self._last_k:
            raise ProtocolError(
                f"transmission for step {msg.k} arrived after step {self._last_k}"
            )
        self._last_k = msg.k
        self.delivered += 1
        return msg


def run_pair(
    sensor: SensorNode,
    station: BaseStation,
    samples: Iterable[float],
    channel: Optional[LosslessChannel] = None,
) -> list[StepRecord]:
    """Drive a sensor/base-station pair over ``samples`` and return the ledger.

    Raises InvariantViolation if the two sides ever record different values.
    """
    if sensor.gains != station.gains or sensor.m != station.m:
        raise ValidationError(
            "sensor and base station must share gains and window size "
            f"({sensor.gains}, M={sensor.m}) vs ({station.gains}, M={station.m})"
        )
    if sensor.k != station.k:
        raise ValidationError(f"pair out of step: sensor k={sensor.k}, station k={station.k}")
    channel = channel if channel is not None else LosslessChannel()
    ledger: list[StepRecord] = []
    for sample in samples:
        record, msg = sensor.step(sample)
        seen = station.step(channel.convey(msg))
        if seen.k != record.k or not same_bits(seen.record, record.record):
            raise InvariantViolation(
                f"step {record.k}: sensor recorded {record.record!r}, "
                f"base station recorded {seen.record!r}"
            )
        ledger.append(record)
    return ledger
