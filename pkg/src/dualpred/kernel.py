"""Backend selection for the whole-trace dual-prediction loop.

The compiled ``_ckernel`` extension is used when it imports; otherwise the
pure-Python ``_pykernel`` runs. Set ``DUALPRED_PURE_PYTHON=1`` to force the
fallback. Both backends produce bit-identical results.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import _pykernel
from .errors import InvariantViolation, ValidationError
from .predictor import GainSet

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

_BACKENDS: dict[str, Callable] = {"python": _pykernel.dual_run}
if _ckernel is not None:
    _BACKENDS["cython"] = _ckernel.dual_run

if os.environ.get("DUALPRED_PURE_PYTHON", "") not in ("", "0") or _ckernel is None:
    BACKEND = "python"
else:
    BACKEND = "cython"


def available_backends() -> tuple[str, ...]:
    return tuple(_BACKENDS)


@dataclass(frozen=True)
class DualRun:
    """Column-wise result of one sensor/base-station run.

    ``prediction`` holds NaN at bootstrap steps.
    """

    samples: np.ndarray
    prediction: np.ndarray
    transmitted: np.ndarray
    y_sensor: np.ndarray
    y_base: np.ndarray

    @property
    def n_tx(self) -> int:
        return int(self.transmitted.sum())

    @property
    def data_error(self) -> np.ndarray:
        return self.samples - self.y_sensor


def as_samples(values: Sequence[float]) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValidationError(f"samples must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise ValidationError(f"sample {bad} is not finite: {arr[bad]!r}")
    return arr


def dual_run(
    samples: Sequence[float],
    gains: GainSet,
    m: int,
    eps: float,
    backend: Optional[str] = None,
) -> DualRun:
    """Run sensor and base station over a whole trace.

    Raises InvariantViolation if the two records ever disagree.
    """
    name = backend or BACKEND
    try:
        impl = _BACKENDS[name]
    except KeyError:
        raise ValidationError(
            f"backend {name!r} unavailable; have {', '.join(_BACKENDS)}"
        ) from None
    if m < 2:
        raise ValidationError(f"m must be >= 2, got {m}")
    if not (eps >= 0 and np.isfinite(eps)):
        raise ValidationError(f"eps must be finite and >= 0, got {eps!r}")
    xs = as_samples(samples)
    prediction, transmitted, y_sensor, y_base, mismatch = impl(
        xs, gains.kp, gains.ki, gains.kd, int(m), float(eps)
    )
    if mismatch >= 0:
        raise InvariantViolation(f"sensor and base station records diverged at step {mismatch}")
    return DualRun(xs, prediction, transmitted.astype(bool), y_sensor, y_base)
