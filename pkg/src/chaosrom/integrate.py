"""ODE integration onto a uniform output grid.

Two methods: classical fixed-step RK4 at the output spacing, and an
embedded 4(5) adaptive pair (scipy's RK45 stepper) with dense output
evaluated exactly on the requested grid. The adaptive path is what the
experiments use, both for ground truth and for forecasting learned models.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import RK45

from .errors import ConfigurationError, IntegrationFailureError
from .snapshots import SnapshotMatrix


@dataclass(frozen=True)
class IntegratorSpec:
    method: str = "rk45_adaptive"
    rtol: float = 1e-6
    atol: float = 1e-9
    dt_output: float = 0.01
    max_steps: int = 10_000_000

    def __post_init__(self):
        if self.method not in ("rk4_fixed", "rk45_adaptive"):
            raise ConfigurationError(f"unknown method {self.method!r}")
        if self.method == "rk45_adaptive" and (self.rtol <= 0 or self.atol <= 0):
            raise ConfigurationError("rtol and atol must be positive")
        if not self.dt_output > 0:
            raise ConfigurationError("dt_output must be positive")
        if self.max_steps < 1:
            raise ConfigurationError("max_steps must be at least 1")


def output_grid(t0: float, t1: float, dt: float) -> np.ndarray:
    """Uniform grid t0 + i*dt covering [t0, t1]; t1 should be a multiple
    of dt away from t0 (the grid never overshoots t1)."""
    n = int(np.floor((t1 - t0) / dt + 1e-9)) + 1
    return t0 + dt * np.arange(n)


def integrate(rhs, q0, t0: float, t1: float, spec: IntegratorSpec) -> SnapshotMatrix:
    """Integrate dq/dt = rhs(q) from t0 to t1, sampling every dt_output.

    Parameters
    ----------
    rhs : callable
        Autonomous derivative function, rhs(q) -> dq of the same shape.
    q0 : ndarray
        Initial state at t0.
    t0, t1 : float
        Integration window, t1 > t0.
    spec : IntegratorSpec

    Returns
    -------
    SnapshotMatrix with one column per grid time.

    Raises
    ------
    IntegrationFailureError
        On NaN/Inf states or step-count exhaustion; the error carries the
        last valid time and the partial trajectory so the caller can mark
        the remaining horizon as diverged.
    """
    q0 = np.asarray(q0, dtype=np.float64)
    if q0.ndim != 1:
        raise ConfigurationError(f"q0 must be a vector, got shape {q0.shape}")
    if not t1 > t0:
        raise ConfigurationError(f"need t1 > t0, got [{t0}, {t1}]")
    if not np.all(np.isfinite(q0)):
        raise ConfigurationError("q0 contains non-finite entries")

    times = output_grid(t0, t1, spec.dt_output)
    if spec.method == "rk4_fixed":
        out = _run_rk4_fixed(rhs, q0, times, spec)
    else:
        out = _run_rk45(rhs, q0, times, spec)
    return SnapshotMatrix(out, spec.dt_output, t0=t0)


def _fail(times, out, filled, message):
    last_t = times[filled - 1] if filled > 0 else times[0]
    raise IntegrationFailureError(
        f"{message} (last valid time {last_t:g})",
        last_valid_time=float(last_t),
        partial_times=times[:filled].copy(),
        partial_states=out[:, :filled].copy())


def _run_rk4_fixed(rhs, q0, times, spec):
    n = q0.shape[0]
    out = np.empty((n, times.shape[0]))
    out[:, 0] = q0
    h = spec.dt_output
    q = q0.copy()
    for i in range(1, times.shape[0]):
        if i > spec.max_steps:
            _fail(times, out, i, f"exceeded max_steps={spec.max_steps}")
        k1 = rhs(q)
        k2 = rhs(q + 0.5 * h * k1)
        k3 = rhs(q + 0.5 * h * k2)
        k4 = rhs(q + h * k3)
        q = q + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(q)):
            _fail(times, out, i, "state became non-finite")
        out[:, i] = q
    return out


def _run_rk45(rhs, q0, times, spec):
    n = q0.shape[0]
    n_times = times.shape[0]
    out = np.empty((n, n_times))
    out[:, 0] = q0
    if n_times == 1:
        return out

    solver = RK45(lambda t, y: rhs(y), times[0], q0, t_bound=times[-1],
                  rtol=spec.rtol, atol=spec.atol)
    next_idx = 1
    steps = 0
    # Harvest tolerance: the grid is constructed exactly, but the solver's
    # internal clipping to t_bound can land within one ulp of it.
    tiny = 1e-12 * max(1.0, abs(times[-1]))
    while solver.status == "running":
        if steps >= spec.max_steps:
            _fail(times, out, next_idx, f"exceeded max_steps={spec.max_steps}")
        solver.step()
        steps += 1
        if solver.status == "failed" or not np.all(np.isfinite(solver.y)):
            _fail(times, out, next_idx, "adaptive step failed")
        dense = solver.dense_output()
        while next_idx < n_times and times[next_idx] <= solver.t + tiny:
            out[:, next_idx] = dense(times[next_idx])
            next_idx += 1
    if next_idx < n_times:
        _fail(times, out, next_idx, "solver stopped before the end time")
    if not np.all(np.isfinite(out)):
        _fail(times, out, 1, "dense output became non-finite")
    return out
