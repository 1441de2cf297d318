"""Forecast-quality metrics on Lyapunov-scaled time axes.

NRMSE normalizes each series by a single standard deviation taken from the
ground truth over the evaluation window, then averages across series at
each time. VPT is the longest prefix horizon with NRMSE below a threshold,
expressed in Lyapunov time units (multiples of 1/Lambda1).
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DegenerateDataError
from .snapshots import as_state_array


@dataclass
class MetricSeries:
    """A non-negative metric over time; +inf marks diverged samples."""

    times: np.ndarray
    values: np.ndarray
    lyapunov_exponent: float = 1.0

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.times.shape != self.values.shape or self.times.ndim != 1:
            raise ConfigurationError("times and values must be equal-length vectors")
        if not self.lyapunov_exponent > 0:
            raise ConfigurationError("lyapunov_exponent must be positive")
        finite = self.values[np.isfinite(self.values)]
        if np.any(finite < 0.0):
            raise ConfigurationError("metric values must be non-negative")


def _checked(truth, pred, sigma):
    T = as_state_array(truth)
    P = as_state_array(pred)
    s = np.asarray(sigma, dtype=np.float64)
    if T.shape != P.shape:
        raise ConfigurationError(
            f"truth and pred shapes differ: {T.shape} vs {P.shape}")
    if s.shape != (T.shape[0],):
        raise ConfigurationError(
            f"sigma must have shape ({T.shape[0]},), got {s.shape}")
    zero = np.flatnonzero(s == 0.0)
    if zero.size:
        raise DegenerateDataError(
            f"sigma is zero for series {zero.tolist()[:8]}; "
            "constant truth series cannot be normalized")
    return T, P, s


def sigma_from_truth(truth) -> np.ndarray:
    """Per-series standard deviation of the ground truth over its window."""
    return as_state_array(truth).std(axis=1)


def nrmse(truth, pred, sigma, times=None,
          lyapunov_exponent: float = 1.0) -> MetricSeries:
    """Normalized root-mean-square error at each time.

    value(t) = sqrt(mean_i ((truth_i(t) - pred_i(t)) / sigma_i)^2).
    Columns where the prediction is non-finite come out as +inf (diverged).
    """
    T, P, s = _checked(truth, pred, sigma)
    if times is None:
        times = np.arange(T.shape[1], dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    if times.shape != (T.shape[1],):
        raise ConfigurationError(
            f"times must have shape ({T.shape[1]},), got {times.shape}")
    bad = ~np.all(np.isfinite(P), axis=0)
    with np.errstate(invalid="ignore", over="ignore"):
        z = (T - P) / s[:, np.newaxis]
        values = np.sqrt(np.mean(z**2, axis=0))
    values[bad] = np.inf
    return MetricSeries(times, values, lyapunov_exponent)


def nrse_field(truth, pred, sigma) -> np.ndarray:
    """Pointwise normalized errors |truth - pred| / sigma, one row per series."""
    T, P, s = _checked(truth, pred, sigma)
    return np.abs(T - P) / s[:, np.newaxis]


def vpt(series: MetricSeries, epsilon: float) -> float:
    """Valid prediction time in Lyapunov units.

    The prefix rule: t_f is the largest time such that every value up to
    and including it stays below epsilon; VPT = (t_f - t_start) * Lambda1.
    A violation at the first sample gives 0.
    """
    if not epsilon > 0:
        raise ConfigurationError(f"epsilon must be positive, got {epsilon}")
    if series.values.size == 0:
        raise ConfigurationError("empty metric series")
    ok = series.values < epsilon
    if not ok[0]:
        return 0.0
    violations = np.flatnonzero(~ok)
    last = violations[0] - 1 if violations.size else len(ok) - 1
    t_f = series.times[last] - series.times[0]
    return float(t_f * series.lyapunov_exponent)


def relative_l2(truth, pred) -> float:
    """Relative Frobenius error over the whole window."""
    T = as_state_array(truth)
    P = as_state_array(pred)
    if T.shape != P.shape:
        raise ConfigurationError(
            f"truth and pred shapes differ: {T.shape} vs {P.shape}")
    denom = np.linalg.norm(T)
    if denom == 0.0:
        raise DegenerateDataError("zero truth; relative error undefined")
    return float(np.linalg.norm(T - P) / denom)


def aggregate_vpt(vpts) -> dict:
    """Min/max/mean/population-std summary of VPT values across ICs."""
    v = np.asarray(list(vpts), dtype=np.float64)
    if v.size == 0:
        raise ConfigurationError("no VPT values to aggregate")
    return {
        "min": float(v.min()),
        "max": float(v.max()),
        "mean": float(v.mean()),
        "std": float(v.std()),
    }
