"""Tests for ODE integration onto uniform output grids."""

import numpy as np
import pytest

from chaosrom.errors import ConfigurationError, IntegrationFailureError
from chaosrom.integrate import IntegratorSpec, integrate, output_grid


def test_output_grid_exact_cover():
    g = output_grid(0.0, 1.0, 0.25)
    assert np.allclose(g, [0.0, 0.25, 0.5, 0.75, 1.0])
    g = output_grid(2.0, 2.3, 0.1)
    assert g.shape == (4,)
    assert g[-1] == pytest.approx(2.3)


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        IntegratorSpec(method="euler")
    with pytest.raises(ConfigurationError):
        IntegratorSpec(rtol=0.0)
    with pytest.raises(ConfigurationError):
        IntegratorSpec(dt_output=-0.1)
    with pytest.raises(ConfigurationError):
        IntegratorSpec(max_steps=0)


def test_integrate_argument_validation():
    spec = IntegratorSpec()
    with pytest.raises(ConfigurationError):
        integrate(lambda q: -q, np.ones((2, 2)), 0.0, 1.0, spec)
    with pytest.raises(ConfigurationError):
        integrate(lambda q: -q, np.ones(2), 1.0, 1.0, spec)
    with pytest.raises(ConfigurationError):
        integrate(lambda q: -q, np.array([np.nan, 1.0]), 0.0, 1.0, spec)


def test_exponential_decay_both_methods():
    # dq/dt = -q with q0 = 1 has the closed form exp(-t).
    for method in ("rk4_fixed", "rk45_adaptive"):
        spec = IntegratorSpec(method=method, dt_output=0.05,
                              rtol=1e-9, atol=1e-12)
        out = integrate(lambda q: -q, np.array([1.0]), 0.0, 2.0, spec)
        assert out.n_snapshots == 41
        assert out.dt == 0.05
        exact = np.exp(-out.times)
        assert np.max(np.abs(out.data[0] - exact)) < 1e-7


def test_harmonic_oscillator_energy():
    # (x, v) with dx = v, dv = -x conserves x^2 + v^2.
    spec = IntegratorSpec(rtol=1e-10, atol=1e-12, dt_output=0.1)
    rhs = lambda q: np.array([q[1], -q[0]])
    out = integrate(rhs, np.array([1.0, 0.0]), 0.0, 20.0, spec)
    energy = out.data[0] ** 2 + out.data[1] ** 2
    assert np.max(np.abs(energy - 1.0)) < 1e-7
    assert out.data[0, -1] == pytest.approx(np.cos(20.0), abs=1e-7)


def test_rk4_fixed_order():
    # Halving the step must shrink the end-point error about 16x.
    rhs = lambda q: np.array([q[1], -q[0]])
    q0 = np.array([1.0, 0.0])
    errs = []
    for dt in (0.1, 0.05):
        spec = IntegratorSpec(method="rk4_fixed", dt_output=dt)
        out = integrate(rhs, q0, 0.0, 5.0, spec)
        errs.append(abs(out.data[0, -1] - np.cos(5.0)))
    ratio = errs[0] / errs[1]
    assert 12.0 < ratio < 20.0


def test_nonzero_start_time():
    spec = IntegratorSpec(dt_output=0.25)
    out = integrate(lambda q: -q, np.array([1.0]), 2.0, 3.0, spec)
    assert out.t0 == 2.0
    assert np.allclose(out.times, [2.0, 2.25, 2.5, 2.75, 3.0])
    assert out.data[0, -1] == pytest.approx(np.exp(-1.0), rel=1e-5)


def _square(q):
    # Deliberate finite-time blow-up; the overflow on the way is expected.
    with np.errstate(over="ignore"):
        return q ** 2


def test_blow_up_keeps_partial_prefix():
    # dq/dt = q^2 from q0 = 1 blows up at t = 1.
    spec = IntegratorSpec(dt_output=0.05)
    with pytest.raises(IntegrationFailureError) as info:
        integrate(_square, np.array([1.0]), 0.0, 2.0, spec)
    err = info.value
    assert err.last_valid_time < 1.05
    assert err.partial_states.shape[0] == 1
    assert err.partial_states.shape[1] >= 1
    assert np.all(np.isfinite(err.partial_states))
    # Away from the singularity the prefix follows 1 / (1 - t).
    t = err.partial_times
    ok = t < 0.9
    assert np.allclose(err.partial_states[0, ok], 1.0 / (1.0 - t[ok]),
                       rtol=1e-3)


def test_max_steps_exhaustion():
    spec = IntegratorSpec(max_steps=3, dt_output=0.1)
    with pytest.raises(IntegrationFailureError):
        integrate(lambda q: -q, np.ones(1), 0.0, 100.0, spec)


def test_rk4_fixed_blow_up():
    spec = IntegratorSpec(method="rk4_fixed", dt_output=0.5)
    with pytest.raises(IntegrationFailureError):
        integrate(_square, np.array([2.0]), 0.0, 10.0, spec)
