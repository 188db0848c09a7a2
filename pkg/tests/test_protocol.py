import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualpred import (
    BaseStation,
    GainSet,
    InvariantViolation,
    LosslessChannel,
    ProtocolError,
    SensorNode,
    Transmission,
    ValidationError,
    base_step,
    preset,
    run_pair,
    sensor_step,
)

PAST = preset("PAST").gains
LINEAR = preset("LINEAR").gains


def primed_sensor(gains, m, eps, history):
    node = SensorNode(gains, m, eps)
    for v in history:
        sensor_step(node, v)
    return node


def primed_station(gains, m, history):
    station = BaseStation(gains, m)
    for k, v in enumerate(history):
        base_step(station, Transmission(k, v))
    return station


class TestSensorStep:
    def test_suppressed_within_eps(self):
        node = primed_sensor(PAST, 3, 0.1, [5.0, 5.0, 5.0])
        record, msg = sensor_step(node, 5.05)
        assert msg is None
        assert not record.transmitted
        assert record.record == 5.0
        assert record.data_error == 5.05 - 5.0
        assert abs(record.data_error - 0.05) < 1e-12

    def test_transmits_beyond_eps(self):
        node = primed_sensor(PAST, 3, 0.1, [5.0, 5.0, 5.0])
        record, msg = sensor_step(node, 5.2)
        assert msg == Transmission(3, 5.2)
        assert record.record == 5.2
        assert record.data_error == 0.0

    def test_bootstrap_always_sends(self):
        node = SensorNode(PAST, 3, 1e9)
        record, msg = sensor_step(node, 3.7)
        assert msg == Transmission(0, 3.7)
        assert record.record == 3.7
        assert record.prediction is None and record.prediction_error is None

    @pytest.mark.parametrize("eps, x", [(0.5, 5.5), (0.5, 4.5), (0.25, 5.25), (0.0, 5.0)])
    def test_tie_is_suppressed(self, eps, x):
        node = primed_sensor(PAST, 3, eps, [5.0, 5.0, 5.0])
        record, msg = sensor_step(node, x)
        assert abs(record.prediction_error) == eps
        assert msg is None and record.record == 5.0

    def test_just_past_tie_is_sent(self):
        node = primed_sensor(PAST, 3, 0.5, [5.0, 5.0, 5.0])
        _, msg = sensor_step(node, math.nextafter(5.5, 6.0))
        assert msg is not None

    @pytest.mark.parametrize("bad", [math.nan, math.inf])
    def test_non_finite_sample_leaves_state(self, bad):
        node = primed_sensor(PAST, 3, 0.1, [1.0, 2.0])
        before = (node.k, node.n_tx, node.window.records)
        with pytest.raises(ValidationError):
            sensor_step(node, bad)
        assert (node.k, node.n_tx, node.window.records) == before

    def test_counters(self):
        node = primed_sensor(PAST, 3, 0.1, [1.0, 1.0, 1.0, 1.0, 9.0])
        assert node.k == 5
        assert node.n_tx == 4
        assert len(node.window) == 3

    @pytest.mark.parametrize("eps", [-0.1, math.nan, math.inf])
    def test_bad_eps(self, eps):
        with pytest.raises(ValidationError):
            SensorNode(PAST, 3, eps)


class TestBaseStep:
    def test_records_received_value(self):
        station = primed_station(PAST, 3, [5.0, 5.0, 5.0])
        view = base_step(station, Transmission(3, 5.2))
        assert (view.k, view.record, view.transmitted) == (3, 5.2, True)

    def test_predicts_when_silent(self):
        station = primed_station(PAST, 3, [4.0, 4.5, 5.0])
        view = base_step(station, None)
        assert (view.record, view.transmitted) == (5.0, False)

    def test_silent_during_bootstrap_is_error(self):
        station = primed_station(PAST, 3, [1.0])
        with pytest.raises(ProtocolError):
            base_step(station, None)

    def test_out_of_order(self):
        station = primed_station(PAST, 3, [1.0, 2.0])
        with pytest.raises(ProtocolError):
            base_step(station, Transmission(5, 1.0))


class TestChannel:
    def test_rejects_duplicates(self):
        ch = LosslessChannel()
        ch.convey(Transmission(0, 1.0))
        with pytest.raises(ProtocolError):
            ch.convey(Transmission(0, 1.0))

    def test_passes_silence(self):
        assert LosslessChannel().convey(None) is None


def ramp(n):
    return [float(k) for k in range(n)]


class TestRunPair:
    def test_constant_trace_bootstrap_only(self):
        s = SensorNode(PAST, 3, 0.01)
        ledger = run_pair(s, BaseStation.for_sensor(s), [2.5] * 100)
        assert sum(r.transmitted for r in ledger) == 3

    def test_ramp_linear_exact(self):
        s = SensorNode(LINEAR, 3, 0.5)
        ledger = run_pair(s, BaseStation.for_sensor(s), ramp(100))
        assert sum(r.transmitted for r in ledger) == 3

    def test_ramp_past_hand_simulation(self):
        # Hand trace of the first 10 steps: windows hold the true ramp, the
        # prediction is always k-1, so |e| = 1 > 0.5 and every step sends.
        expected = [(k, None if k < 3 else float(k - 1), True, float(k)) for k in range(10)]
        s = SensorNode(PAST, 3, 0.5)
        ledger = run_pair(s, BaseStation.for_sensor(s), ramp(100))
        assert [(r.k, r.prediction, r.transmitted, r.record) for r in ledger[:10]] == expected
        assert all(r.transmitted for r in ledger)

    def test_mismatched_pair_rejected(self):
        s = SensorNode(PAST, 3, 0.1)
        with pytest.raises(ValidationError):
            run_pair(s, BaseStation(LINEAR, 3), [1.0])
        with pytest.raises(ValidationError):
            run_pair(s, BaseStation(PAST, 4), [1.0])

    def test_desync_is_fatal(self):
        class SkewedStation(BaseStation):
            def step(self, msg):
                view = super().step(msg)
                return type(view)(view.k, view.record + (0.0 if msg else 1e-9), view.transmitted)

        s = SensorNode(PAST, 3, 10.0)
        with pytest.raises(InvariantViolation):
            run_pair(s, SkewedStation(PAST, 3), [1.0, 2.0, 3.0, 3.5])

    def test_huge_eps_sends_only_bootstrap(self):
        s = SensorNode(GainSet(0.6, 0.4, 0.3), 5, 1e300)
        ledger = run_pair(s, BaseStation.for_sensor(s), [math.sin(k) * 50 for k in range(200)])
        assert sum(r.transmitted for r in ledger) == 5

    def test_zero_eps_constant_past(self):
        s = SensorNode(PAST, 3, 0.0)
        ledger = run_pair(s, BaseStation.for_sensor(s), [0.1] * 50)
        assert sum(r.transmitted for r in ledger) == 3

    def test_zero_eps_sends_unless_exact(self):
        s = SensorNode(PAST, 2, 0.0)
        ledger = run_pair(s, BaseStation.for_sensor(s), [1.0, 2.0, 2.0, 3.0, 3.0, 3.0])
        assert [r.transmitted for r in ledger] == [True, True, False, True, False, False]


samples = st.lists(
    st.floats(min_value=-1e3, max_value=1e3, allow_nan=False), min_size=1, max_size=120
)


@settings(max_examples=200, deadline=None)
@given(
    st.floats(-2, 2),
    st.floats(-2, 2),
    st.floats(-2, 2),
    st.integers(min_value=2, max_value=6),
    st.floats(min_value=0, max_value=10),
    samples,
)
def test_error_bound_holds(kp, ki, kd, m, eps, xs):
    s = SensorNode(GainSet(kp, ki, kd), m, eps)
    station = BaseStation.for_sensor(s)
    ledger = run_pair(s, station, xs)
    for r in ledger:
        assert abs(r.sample - r.record) <= eps
        if r.transmitted:
            assert r.data_error == 0.0 and r.record == r.sample
        else:
            assert r.record == r.prediction
            assert abs(r.data_error) == abs(r.prediction_error) <= eps
    assert [r.transmitted for r in ledger[:m]] == [True] * min(m, len(xs))
    assert s.n_tx == sum(r.transmitted for r in ledger) <= s.k == len(xs)
    assert s.window == station.window
