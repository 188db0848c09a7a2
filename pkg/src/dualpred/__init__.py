"""Dual-prediction data transmission for body-sensor telemetry.

A sensor sends a sample only when a shared PID-form predictor misses it by
more than ``eps``; the base station fills the gaps with the same predictor,
so every reconstructed value stays within ``eps`` of the true sample.
"""

__version__ = "0.1.0"

from .errors import DualPredError, InvariantViolation, ProtocolError, ValidationError
from .kernel import BACKEND, available_backends, dual_run
from .metrics import RunReport, energy_ratio, rmse, summarize
from .predictor import (
    PAPER_PID_GAINS,
    GainSet,
    HistoryWindow,
    SchemePreset,
    pid,
    predict,
    preset,
    push,
)
from .protocol import (
    BaseStation,
    LosslessChannel,
    SensorNode,
    StepRecord,
    Transmission,
    base_step,
    run_pair,
    sensor_step,
)
from .simulator import ComparisonTable, SimConfig, compare, run, sweep
from .traces import (
    TABLE_II,
    DatasetManifest,
    Trace,
    gen_constant,
    gen_ramp,
    gen_random_walk,
    gen_sine,
    load_manifest,
    load_trace,
    save_trace,
)
