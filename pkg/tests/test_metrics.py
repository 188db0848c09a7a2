import csv
import io
import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dualpred import (
    BaseStation,
    GainSet,
    SensorNode,
    ValidationError,
    energy_ratio,
    preset,
    rmse,
    run_pair,
    summarize,
)
from dualpred.metrics import REPORT_FIELDS, RunReport, reports_to_csv
from dualpred.protocol import StepRecord


def ledger_for(gains, m, eps, xs):
    s = SensorNode(gains, m, eps)
    return run_pair(s, BaseStation.for_sensor(s), xs)


class TestEnergyRatio:
    @pytest.mark.parametrize("n_tx, k, expected", [(5000, 5000, 1.0), (3, 100, 0.03), (0, 10, 0.0)])
    def test_values(self, n_tx, k, expected):
        assert energy_ratio(n_tx, k) == expected

    @pytest.mark.parametrize("n_tx, k", [(0, 0), (5, 4), (-1, 4)])
    def test_invalid(self, n_tx, k):
        with pytest.raises(ValidationError):
            energy_ratio(n_tx, k)


class TestRmse:
    def test_zeros(self):
        assert rmse([0, 0, 0, 0]) == 0.0

    def test_three_four(self):
        assert rmse([3, 4]) == math.sqrt(12.5)
        assert rmse([3, 4]) == pytest.approx(3.5355339, abs=1e-7)

    # squares of |c| < 1e-154 underflow, so keep c away from there
    @given(
        st.floats(-1e6, 1e6).filter(lambda c: c == 0 or abs(c) > 1e-150),
        st.integers(min_value=1, max_value=50),
    )
    def test_constant(self, c, n):
        assert rmse([c] * n) == pytest.approx(abs(c), rel=1e-14)

    def test_empty(self):
        with pytest.raises(ValidationError):
            rmse([])

    def test_non_finite(self):
        with pytest.raises(ValidationError):
            rmse([1.0, math.inf])


class TestSummarize:
    def test_constant_past(self):
        report = summarize(ledger_for(preset("PAST").gains, 3, 0.01, [5.0] * 100), 0.01)
        assert (report.k_total, report.n_tx) == (100, 3)
        assert report.energy_ratio == 0.03
        assert report.rmse_data == 0.0
        assert report.violations == 0 and not report.failed

    def test_ramp_past_prediction_rmse(self):
        ledger = ledger_for(preset("PAST").gains, 3, 0.5, [float(k) for k in range(100)])
        report = summarize(ledger, 0.5)
        assert report.rmse_prediction == 1.0
        assert report.rmse_data == 0.0
        assert report.n_tx == 100

    def test_prediction_rmse_can_exceed_eps(self):
        # A step change forces one huge prediction error on a transmitted step.
        xs = [0.0] * 10 + [100.0] * 10
        report = summarize(ledger_for(preset("PAST").gains, 3, 0.1, xs), 0.1)
        assert report.rmse_prediction > report.eps
        assert report.rmse_data <= report.max_abs_data_error <= report.eps

    def test_violation_flags_failure(self):
        bad = [StepRecord(0, 1.0, None, True, 1.0, None, 0.0), StepRecord(1, 2.0, 1.0, False, 1.0, 1.0, 1.0)]
        report = summarize(bad, 0.5)
        assert report.violations == 1 and report.failed
        assert report.max_abs_data_error == 1.0

    def test_bootstrap_excluded_from_prediction_rmse(self):
        ledger = ledger_for(preset("PAST").gains, 3, 0.5, [1.0, 2.0, 3.0, 3.25])
        assert summarize(ledger, 0.5).rmse_prediction == 0.25

    def test_only_bootstrap(self):
        report = summarize(ledger_for(preset("PAST").gains, 3, 0.5, [1.0, 2.0]), 0.5)
        assert report.rmse_prediction == 0.0 and report.energy_ratio == 1.0

    def test_empty(self):
        with pytest.raises(ValidationError):
            summarize([], 0.1)

    @given(
        st.lists(st.floats(-100, 100), min_size=1, max_size=80),
        st.floats(0, 5),
        st.floats(-2, 2),
        st.floats(-2, 2),
        st.floats(-2, 2),
    )
    def test_report_invariants(self, xs, eps, kp, ki, kd):
        report = summarize(ledger_for(GainSet(kp, ki, kd), 3, eps, xs), eps)
        assert report.violations == 0
        assert report.energy_ratio == report.n_tx / report.k_total
        assert report.rmse_data <= report.max_abs_data_error * (1 + 1e-15) <= eps * (1 + 1e-15)
        assert report.max_abs_data_error <= eps


def sample_report(**overrides):
    fields = dict(
        trace_name="ECG",
        scheme_name="PAST",
        eps=0.1,
        m=3,
        k_total=5000,
        n_tx=150,
        energy_ratio=0.03,
        rmse_prediction=0.08,
        rmse_data=0.05,
        max_abs_data_error=0.1,
        violations=0,
    )
    fields.update(overrides)
    return RunReport(**fields)


class TestSerialization:
    def test_csv_field_order(self):
        text = sample_report().to_csv()
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == [
            "trace_name", "scheme_name", "eps", "m", "k_total", "n_tx", "energy_ratio",
            "rmse_prediction", "rmse_data", "max_abs_data_error", "violations",
        ]
        assert rows[1] == ["ECG", "PAST", "0.1", "3", "5000", "150", "0.03", "0.08", "0.05", "0.1", "0"]

    def test_json_flat_object(self):
        data = json.loads(sample_report().to_json())
        assert list(data) == list(REPORT_FIELDS)
        assert data["energy_ratio"] == 0.03

    def test_csv_without_header(self):
        assert reports_to_csv([sample_report()], header=False).count("\n") == 1
