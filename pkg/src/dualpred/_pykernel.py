"""Pure-Python whole-trace dual-prediction loop.

Fallback for when the compiled ``_ckernel`` extension is unavailable. Must
stay operation-for-operation identical to it.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from .predictor import predict_values


def dual_run(samples, kp: float, ki: float, kd: float, m: int, eps: float):
    """Return ``(prediction, transmitted, y_sensor, y_base, mismatch)``."""
    xs = np.ascontiguousarray(samples, dtype=np.float64).tolist()
    n = len(xs)
    prediction = [math.nan] * n
    transmitted = [0] * n
    y_sensor = [0.0] * n
    y_base = [0.0] * n
    sensor_w: deque[float] = deque(maxlen=m)
    base_w: deque[float] = deque(maxlen=m)
    mismatch = -1

    for k, x in enumerate(xs):
        if len(sensor_w) < m:
            send = True
            ys = x
        else:
            estimate = predict_values(kp, ki, kd, sensor_w)
            prediction[k] = estimate
            send = abs(x - estimate) > eps
            ys = x if send else estimate
        sensor_w.append(ys)
        transmitted[k] = int(send)
        y_sensor[k] = ys

        if send:
            yb = x
        elif len(base_w) < m:
            mismatch = k
            break
        else:
            yb = predict_values(kp, ki, kd, base_w)
        base_w.append(yb)
        y_base[k] = yb

        if ys != yb:
            mismatch = k
            break

    return (
        np.array(prediction, dtype=np.float64),
        np.array(transmitted, dtype=np.uint8),
        np.array(y_sensor, dtype=np.float64),
        np.array(y_base, dtype=np.float64),
        mismatch,
    )
