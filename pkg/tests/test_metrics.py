"""Tests for the forecast-quality metrics."""

import numpy as np
import pytest

from chaosrom.errors import ConfigurationError, DegenerateDataError
from chaosrom.metrics import (MetricSeries, aggregate_vpt, nrmse, nrse_field,
                              relative_l2, sigma_from_truth, vpt)


def test_nrmse_hand_value_single_series():
    # One series, sigma = 2, errors (1, 0, 2) -> values (0.5, 0, 1).
    truth = np.array([[1.0, 2.0, 3.0]])
    pred = np.array([[2.0, 2.0, 1.0]])
    series = nrmse(truth, pred, np.array([2.0]))
    assert np.allclose(series.values, [0.5, 0.0, 1.0])


def test_nrmse_hand_value_two_series():
    # Errors (3, 4) with sigmas (1, 1) -> sqrt((9 + 16) / 2) = sqrt(12.5).
    truth = np.array([[0.0], [0.0]])
    pred = np.array([[3.0], [4.0]])
    series = nrmse(truth, pred, np.array([1.0, 1.0]))
    assert series.values[0] == pytest.approx(np.sqrt(12.5))


def test_nrmse_normalization_per_series():
    truth = np.array([[0.0, 0.0], [0.0, 0.0]])
    pred = np.array([[1.0, 1.0], [10.0, 10.0]])
    series = nrmse(truth, pred, np.array([1.0, 10.0]))
    assert np.allclose(series.values, 1.0)


def test_nrmse_diverged_column_is_inf():
    truth = np.zeros((2, 3))
    pred = np.zeros((2, 3))
    pred[0, 2] = np.nan
    series = nrmse(truth, pred, np.ones(2))
    assert np.isfinite(series.values[:2]).all()
    assert np.isinf(series.values[2])


def test_sigma_from_truth_is_population_std():
    rng = np.random.default_rng(0)
    Q = rng.standard_normal((4, 200))
    assert np.allclose(sigma_from_truth(Q), Q.std(axis=1))


def test_zero_sigma_rejected():
    with pytest.raises(DegenerateDataError):
        nrmse(np.zeros((2, 4)), np.zeros((2, 4)), np.array([1.0, 0.0]))


def test_shape_mismatch_rejected():
    with pytest.raises(ConfigurationError):
        nrmse(np.zeros((2, 4)), np.zeros((2, 5)), np.ones(2))
    with pytest.raises(ConfigurationError):
        nrmse(np.zeros((2, 4)), np.zeros((2, 4)), np.ones(3))


def test_vpt_prefix_rule_oracle():
    # Values (0.1, 0.3, 0.6, 0.4) vs 0.5: first violation at index 2, so
    # t_f = times[1] = 1 and VPT = 1 Lyapunov unit at Lambda = 1.
    series = MetricSeries(np.arange(4.0), np.array([0.1, 0.3, 0.6, 0.4]))
    assert vpt(series, 0.5) == pytest.approx(1.0)


def test_vpt_never_violated_runs_to_end():
    series = MetricSeries(np.arange(5.0), np.full(5, 0.1),
                          lyapunov_exponent=2.0)
    assert vpt(series, 0.5) == pytest.approx(8.0)


def test_vpt_immediate_violation_is_zero():
    series = MetricSeries(np.arange(3.0), np.array([0.9, 0.1, 0.1]))
    assert vpt(series, 0.5) == 0.0


def test_vpt_lyapunov_scaling():
    series = MetricSeries(0.5 * np.arange(4.0), np.array([0.0, 0.0, 1.0, 1.0]),
                          lyapunov_exponent=1.68)
    assert vpt(series, 0.5) == pytest.approx(0.5 * 1.68)


def test_vpt_start_offset_subtracted():
    series = MetricSeries(10.0 + np.arange(4.0), np.zeros(4))
    assert vpt(series, 0.5) == pytest.approx(3.0)


def test_vpt_inf_counts_as_violation():
    series = MetricSeries(np.arange(4.0),
                          np.array([0.1, 0.2, np.inf, 0.1]))
    assert vpt(series, 0.5) == pytest.approx(1.0)


def test_vpt_monotone_in_epsilon():
    # Larger epsilon can never shorten the valid prefix.
    rng = np.random.default_rng(42)
    for _ in range(100):
        n = int(rng.integers(2, 60))
        values = np.abs(rng.standard_normal(n)).cumsum() * 0.05
        series = MetricSeries(np.arange(n, dtype=np.float64), values)
        eps = np.sort(rng.uniform(0.01, 3.0, size=5))
        v = [vpt(series, e) for e in eps]
        assert all(a <= b + 1e-12 for a, b in zip(v, v[1:]))


def test_vpt_validation():
    series = MetricSeries(np.arange(3.0), np.zeros(3))
    with pytest.raises(ConfigurationError):
        vpt(series, 0.0)
    with pytest.raises(ConfigurationError):
        vpt(MetricSeries(np.zeros(0), np.zeros(0)), 0.5)


def test_metric_series_validation():
    with pytest.raises(ConfigurationError):
        MetricSeries(np.arange(3.0), np.zeros(4))
    with pytest.raises(ConfigurationError):
        MetricSeries(np.arange(3.0), np.zeros(3), lyapunov_exponent=0.0)
    with pytest.raises(ConfigurationError):
        MetricSeries(np.arange(3.0), np.array([0.1, -0.2, 0.3]))


def test_nrse_field_pointwise():
    truth = np.array([[1.0, 2.0], [3.0, 4.0]])
    pred = np.array([[2.0, 2.0], [3.0, 0.0]])
    out = nrse_field(truth, pred, np.array([1.0, 2.0]))
    assert np.allclose(out, [[1.0, 0.0], [0.0, 2.0]])


def test_relative_l2_values():
    truth = np.array([[3.0, 0.0], [0.0, 4.0]])
    assert relative_l2(truth, truth) == 0.0
    assert relative_l2(truth, np.zeros((2, 2))) == pytest.approx(1.0)
    with pytest.raises(DegenerateDataError):
        relative_l2(np.zeros((2, 2)), truth)


def test_column_rms_identity():
    # nrmse with unit sigmas equals the column RMS of the error matrix.
    rng = np.random.default_rng(7)
    truth = rng.standard_normal((6, 30))
    pred = truth + rng.standard_normal((6, 30)) * 0.1
    series = nrmse(truth, pred, np.ones(6))
    direct = np.sqrt(np.mean((truth - pred) ** 2, axis=0))
    assert np.allclose(series.values, direct)


def test_aggregate_vpt_oracle():
    # Values (1, 3): mean 2, population std 1.
    out = aggregate_vpt([1.0, 3.0])
    assert out == {"min": 1.0, "max": 3.0, "mean": 2.0, "std": 1.0}
    with pytest.raises(ConfigurationError):
        aggregate_vpt([])
