import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mhmr.errors import ConfigurationError, MetricDomainError
from mhmr.geometry import Rect
from mhmr.metrics import (
    DEFAULT_STRESS_WINDOW,
    DISCRETE_STRESS_CONDITION,
    ConditionProvider,
    MetricBounds,
    ScriptedTrace,
    StressTrace,
    crosstrack_performance,
    discrete_stress_to_condition,
    load_scripted_trace,
    load_stress_trace,
    normalize_metric,
    stress_to_condition,
)


def make_trace(values, period=1.0):
    values = np.asarray(values, dtype=float)
    times = np.arange(len(values)) * period
    return StressTrace(times, values, sample_period=period)


class TestNormalize:
    def test_affine_map(self):
        bounds = MetricBounds(40.0, 140.0)  # e.g. heart-rate style range
        assert normalize_metric(40.0, bounds) == 0.0
        assert normalize_metric(140.0, bounds) == 1.0
        assert normalize_metric(90.0, bounds) == pytest.approx(0.5)

    def test_out_of_bounds_raises(self):
        bounds = MetricBounds(0.0, 1.0)
        with pytest.raises(MetricDomainError):
            normalize_metric(1.2, bounds)
        with pytest.raises(MetricDomainError):
            normalize_metric(-0.1, bounds)
        with pytest.raises(MetricDomainError):
            normalize_metric(float("nan"), bounds)

    def test_degenerate_bounds_rejected(self):
        with pytest.raises(ConfigurationError):
            MetricBounds(1.0, 1.0)

    @given(raw=st.floats(2.0, 7.0))
    @settings(max_examples=100, deadline=None)
    def test_output_in_unit_interval(self, raw):
        assert 0.0 <= normalize_metric(raw, MetricBounds(2.0, 7.0)) <= 1.0


class TestStressCondition:
    def test_all_relaxed_is_full_condition(self):
        trace = make_trace([0] * 40)
        assert stress_to_condition(trace, DEFAULT_STRESS_WINDOW, 39.0) == 1.0

    def test_all_stressed_is_zero_condition(self):
        trace = make_trace([1] * 40)
        assert stress_to_condition(trace, DEFAULT_STRESS_WINDOW, 39.0) == 0.0

    def test_moving_average_inversion(self):
        # Last 30 samples at t=39: indices 10..39 -> 10 stressed of 30.
        values = [0] * 20 + [1] * 10 + [0] * 10
        trace = make_trace(values)
        cond = stress_to_condition(trace, 30, 39.0)
        assert cond == pytest.approx(1.0 - 10 / 30, abs=1e-12)

    def test_window_one_tracks_instantaneous(self):
        values = [0, 1, 0, 1, 1, 0]
        trace = make_trace(values)
        for i, v in enumerate(values):
            assert stress_to_condition(trace, 1, float(i)) == 1.0 - v

    def test_short_history_uses_available_samples(self):
        trace = make_trace([1, 1, 0, 0])
        # Only two samples at or before t=1.
        assert stress_to_condition(trace, 30, 1.0) == 0.0

    def test_window_lipschitz_bound(self, rng):
        # Consecutive outputs can move by at most 2/window: one sample
        # enters and one leaves the average.
        values = rng.integers(0, 2, size=200)
        trace = make_trace(values)
        window = 25
        prev = stress_to_condition(trace, window, float(window))
        for t in range(window + 1, 200):
            cur = stress_to_condition(trace, window, float(t))
            assert abs(cur - prev) <= 2.0 / window + 1e-12
            prev = cur

    def test_time_outside_span_raises(self):
        trace = make_trace([0, 1])
        with pytest.raises(ConfigurationError):
            stress_to_condition(trace, 5, -1.0)
        with pytest.raises(ConfigurationError):
            stress_to_condition(trace, 5, 10.0)

    def test_nonbinary_trace_rejected(self):
        with pytest.raises(MetricDomainError):
            make_trace([0, 0.5, 1])

    def test_discrete_levels(self):
        assert discrete_stress_to_condition("low") == 0.75
        assert discrete_stress_to_condition("Medium") == 0.5
        assert discrete_stress_to_condition("HIGH") == 0.25
        with pytest.raises(MetricDomainError):
            discrete_stress_to_condition("extreme")
        assert set(DISCRETE_STRESS_CONDITION) == {"low", "medium", "high"}


class TestCrosstrack:
    rect = Rect(0.0, 0.0, 4.0, 2.0)

    def test_on_perimeter_is_unity(self):
        path = [(0.0, 0.0), (1.0, 0.0), (4.0, 1.0), (2.0, 2.0)]
        assert crosstrack_performance(path, self.rect, margin=0.1) == 1.0

    def test_within_margin_is_unity(self):
        path = [(2.0, 0.05), (2.0, -0.05)]
        assert crosstrack_performance(path, self.rect, margin=0.1) == 1.0

    def test_linear_falloff(self):
        # Mean error 0.15 with margin 0.1 -> 1 - 0.05/0.1 = 0.5.
        path = [(2.0, 0.15)]
        assert crosstrack_performance(path, self.rect, margin=0.1) == pytest.approx(0.5)

    def test_clamped_at_zero(self):
        path = [(2.0, 1.0)]  # center of the rect, far off track
        assert crosstrack_performance(path, self.rect, margin=0.1) == 0.0

    def test_mean_not_max(self):
        # One bad point averaged with many good ones stays within margin.
        path = [(2.0, 0.0)] * 9 + [(2.0, 0.5)]
        assert crosstrack_performance(path, self.rect, margin=0.1) == 1.0

    def test_rejects_bad_inputs(self):
        with pytest.raises(ConfigurationError):
            crosstrack_performance([], self.rect, margin=0.1)
        with pytest.raises(ConfigurationError):
            crosstrack_performance([(0.0, 0.0)], self.rect, margin=0.0)

    @given(
        offset=st.floats(0.0, 3.0),
        margin=st.floats(0.01, 1.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_output_in_unit_interval(self, offset, margin):
        path = [(2.0, -offset)]
        value = crosstrack_performance(path, self.rect, margin=margin)
        assert 0.0 <= value <= 1.0


class TestScriptedTrace:
    def test_step_hold(self):
        trace = ScriptedTrace(np.array([0.0, 10.0, 20.0]), np.array([1.0, 0.6, 0.9]))
        assert trace.value_at(-5.0) == 1.0
        assert trace.value_at(0.0) == 1.0
        assert trace.value_at(9.99) == 1.0
        assert trace.value_at(10.0) == 0.6
        assert trace.value_at(15.0) == 0.6
        assert trace.value_at(100.0) == 0.9

    def test_rejects_unsorted(self):
        with pytest.raises(ConfigurationError):
            ScriptedTrace(np.array([0.0, 0.0]), np.array([1.0, 1.0]))


class TestLoaders:
    def test_binary_stress_csv(self, tmp_path):
        p = tmp_path / "stress.csv"
        p.write_text("time_s,stress\n0,0\n1,1\n2,1\n3,0\n")
        trace = load_stress_trace(p)
        assert isinstance(trace, StressTrace)
        assert trace.sample_period == 1.0
        assert trace.values.tolist() == [0.0, 1.0, 1.0, 0.0]

    def test_discrete_stress_csv(self, tmp_path):
        p = tmp_path / "levels.csv"
        p.write_text("time_s,stress\n0,low\n30,high\n60,medium\n")
        trace = load_stress_trace(p)
        assert isinstance(trace, ScriptedTrace)
        assert trace.value_at(0.0) == 0.75
        assert trace.value_at(45.0) == 0.25
        assert trace.value_at(60.0) == 0.5

    def test_nonuniform_binary_rejected(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("time_s,stress\n0,0\n1,1\n5,1\n")
        with pytest.raises(ConfigurationError):
            load_stress_trace(p)

    def test_missing_header_rejected(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("t,s\n0,0\n")
        with pytest.raises(ConfigurationError):
            load_stress_trace(p)

    def test_scripted_csv(self, tmp_path):
        p = tmp_path / "health.csv"
        p.write_text("time_s,value\n0,1.0\n100,0.7\n")
        trace = load_scripted_trace(p)
        assert trace.value_at(50.0) == 1.0
        assert trace.value_at(150.0) == 0.7


class TestConditionProvider:
    def test_human_stress_pipeline(self):
        trace = make_trace([0] * 20 + [1] * 10 + [0] * 10)
        provider = ConditionProvider(kind="human-stress", cycle_time=0.5, trace=trace)
        assert provider.value_at(39.0) == pytest.approx(1.0 - 10 / 30, abs=1e-12)

    def test_scripted_provider_normalizes(self):
        trace = ScriptedTrace(np.array([0.0]), np.array([90.0]))
        provider = ConditionProvider(
            kind="scripted", cycle_time=1.0, trace=trace, bounds=MetricBounds(40.0, 140.0)
        )
        assert provider.value_at(0.0) == pytest.approx(0.5)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ConfigurationError):
            ConditionProvider(kind="telepathy", cycle_time=1.0)

    def test_crosstrack_kind_is_not_time_queryable(self):
        provider = ConditionProvider(kind="performance-crosstrack", cycle_time=0.5)
        with pytest.raises(ConfigurationError):
            provider.value_at(0.0)

    def test_fuzz_values_in_unit_interval(self, rng):
        for _ in range(100):
            n = int(rng.integers(5, 60))
            trace = make_trace(rng.integers(0, 2, size=n))
            provider = ConditionProvider(
                kind="human-stress",
                cycle_time=0.5,
                trace=trace,
                window=int(rng.integers(1, 40)),
            )
            t = float(rng.uniform(0, n - 1))
            assert 0.0 <= provider.value_at(t) <= 1.0
