"""Experiment steps: generate, reduce, train, forecast, evaluate, and
the restart consistency check.

Each step exists twice: a pure function working on in-memory objects
(used by the study recipes and the tests) and a cmd_* wrapper that reads
and writes files under an output directory (used by the CLI). File
wrappers only ever store relative file names in manifests so two runs
into different directories stay byte-identical.
"""

import json
import math
import os

import numpy as np

from .. import reduction
from ..dynamics import (Lorenz96Config, lorenz63_rhs, lorenz96_rhs,
                        quadratic_rhs)
from ..errors import (BlowUpError, ConfigurationError,
                      IntegrationFailureError)
from ..integrate import IntegratorSpec, integrate
from ..metrics import (MetricSeries, aggregate_vpt, nrmse, relative_l2,
                       sigma_from_truth, vpt)
from ..opinf import (GridSpec, RegularizerSpec, assemble_data_matrix,
                     estimate_derivatives, estimate_derivatives_spline,
                     gram_accumulate, grid_search,
                     solve_pseudoinverse, solve_regularized)
from ..snapshots import SnapshotMatrix, split_columns
from ..spectral import (KsConfig, etdrk4_coefficients, etdrk4_step,
                        grid_points, ks_initial_condition, simulate_ks)
from .config import dump_config
from .container import (read_basis, read_container, read_operators,
                        write_basis, write_container, write_operators)

SNAPSHOTS_FILE = "snapshots.opnf"
BASIS_FILE = "basis.opnf"
REDUCED_FILE = "reduced.opnf"
OPERATORS_FILE = "operators.opnf"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    return str(value)


def write_csv(path, header, rows):
    """Comma-separated report with a header row and floats at full
    precision (17 significant digits)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return path


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path} is not valid JSON: {exc}") from exc


def _integrator_spec(config, dt) -> IntegratorSpec:
    opts = config.integrator
    return IntegratorSpec(
        method=opts.get("method", "rk45_adaptive"),
        rtol=float(opts.get("rtol", 1e-6)),
        atol=float(opts.get("atol", 1e-9)),
        dt_output=dt)


def _system_rhs(config):
    """Right-hand side in full state space, or None when there is no
    cheap closed form (ks)."""
    params = config.system_params
    if config.system == "lorenz96":
        cfg = Lorenz96Config(
            n_vars=int(params.get("n_vars", 40)),
            forcing=float(params.get("forcing", 8.0)),
            damping=bool(params.get("damping", True)))
        return lambda x: lorenz96_rhs(x, cfg), cfg.n_vars
    if config.system == "synthetic":
        sigma = float(params.get("sigma", 10.0))
        rho = float(params.get("rho", 28.0))
        beta = float(params.get("beta", 8.0 / 3.0))
        return lambda x: lorenz63_rhs(x, sigma=sigma, rho=rho, beta=beta), 3
    return None, None


def _grid_index(t, t0, dt, what):
    j = (t - t0) / dt
    jr = int(round(j))
    if abs(j - jr) > 1e-6:
        raise ConfigurationError(
            f"{what} {t} is not on the dt={dt} grid starting at {t0}")
    return jr


# ---------------------------------------------------------------------------
# generate

def generate_snapshots(config, seed: int) -> SnapshotMatrix:
    """Simulate the configured system and discard the transient window."""
    if config.system == "ks":
        params = config.system_params
        ks = KsConfig(
            domain_length=float(params.get("domain_length", 200.0)),
            n_grid=int(params.get("n_grid", 512)),
            dt=float(params.get("dt", 0.125)),
            t_final=config.t_final,
            a_coeff=float(params.get("a_coeff", 1.0)),
            b_coeff=float(params.get("b_coeff", 1.0)))
        record = simulate_ks(ks)
    else:
        rhs, dim = _system_rhs(config)
        rng = np.random.default_rng(seed)
        q0 = rng.standard_normal(dim)
        spec = _integrator_spec(config, config.dt_output)
        record = integrate(rhs, q0, 0.0, config.t_final, spec)
        record = SnapshotMatrix(record.data, dt=record.dt, t0=record.t0,
                                system=config.system)

    n_skip = _grid_index(config.transient_discard, 0.0, record.dt,
                         "transient_discard")
    kept = record.data[:, n_skip:]
    if kept.shape[1] < 2:
        raise ConfigurationError(
            f"post-transient record is empty: t_final={config.t_final}, "
            f"transient_discard={config.transient_discard}")
    return SnapshotMatrix(kept.copy(), dt=record.dt,
                          t0=config.transient_discard, system=config.system)


def cmd_generate(config, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    snaps = generate_snapshots(config, config.seeds[0])
    write_container(os.path.join(out_dir, SNAPSHOTS_FILE), snaps.data,
                    dt=snaps.dt, t0=snaps.t0, system=snaps.system)
    dump_config(config, os.path.join(out_dir, "config_echo.json"))
    return snaps


# ---------------------------------------------------------------------------
# reduce

def reduce_snapshots(config, snaps: SnapshotMatrix):
    """Fit the basis on the training split and project the whole record.

    Returns (basis, reduced SnapshotMatrix, info dict). reduction none
    uses the identity basis so every later stage works the same way.
    """
    k = snaps.n_snapshots
    tr, va, te = split_columns(k, config.splits)
    kind = config.reduction.get("kind", "none")
    if kind == "none":
        basis = reduction.identity_basis(snaps.n_states)
        info = {"kind": "none", "r": snaps.n_states,
                "k_train": tr.stop - tr.start,
                "holdout_projection_error": None}
        return basis, snaps, info

    train = snaps.data[:, tr]
    if train.shape[1] < 2:
        raise ConfigurationError(
            f"training split has {train.shape[1]} columns; PCA needs >= 2")
    center = bool(config.reduction.get("center", True))
    basis = reduction.fit_pca(
        train,
        r=config.reduction.get("r"),
        energy=config.reduction.get("energy"),
        center=center)
    holdout = snaps.data[:, tr.stop:]
    holdout_err = (reduction.projection_error(holdout, basis)
                   if holdout.shape[1] > 0 else None)
    latent = reduction.project(basis, snaps.data)
    reduced = SnapshotMatrix(latent, dt=snaps.dt, t0=snaps.t0,
                             system=snaps.system)
    info = {"kind": "pca", "r": basis.r, "center": center,
            "k_train": train.shape[1],
            "holdout_projection_error": holdout_err}
    return basis, reduced, info


def cmd_reduce(config, out_dir):
    snaps, _ = read_container(os.path.join(out_dir, SNAPSHOTS_FILE))
    basis, reduced, info = reduce_snapshots(config, snaps)
    write_basis(os.path.join(out_dir, BASIS_FILE), basis,
                center=info.get("center", False))
    write_container(os.path.join(out_dir, REDUCED_FILE), reduced.data,
                    dt=reduced.dt, t0=reduced.t0, system=reduced.system)
    energies = np.cumsum(basis.singular_values**2)
    total = energies[-1] if energies.size and energies[-1] > 0 else 1.0
    rows = [(i + 1, float(basis.singular_values[i]),
             float(energies[i] / total))
            for i in range(basis.singular_values.size)]
    write_csv(os.path.join(out_dir, "variance.csv"),
              ["mode", "singular_value", "cumulative_energy"], rows)
    write_json(os.path.join(out_dir, "reduce_summary.json"), info)
    return basis, reduced, info


# ---------------------------------------------------------------------------
# train

def train_operators(config, reduced: SnapshotMatrix, basis=None):
    """Estimate derivatives on the training split and fit the operators.

    Returns (model, score_table or None, info dict).
    """
    k = reduced.n_snapshots
    tr, va, te = split_columns(k, config.splits)
    train = reduced.data[:, tr]
    if train.shape[1] < 3:
        raise ConfigurationError(
            f"training split has {train.shape[1]} columns; need >= 3")

    if config.derivative_source == "exact":
        rhs, dim = _system_rhs(config)
        if rhs is None:
            raise ConfigurationError(
                "exact derivatives are not available for the ks system")
        if basis is not None and basis.r != basis.n:
            raise ConfigurationError(
                "exact derivatives require the identity basis")
        R = np.empty_like(train)
        for j in range(train.shape[1]):
            R[:, j] = rhs(train[:, j])
    elif config.derivative_source == "spline":
        R = estimate_derivatives_spline(train, reduced.dt)
    else:
        R = estimate_derivatives(train, reduced.dt)

    solver = config.solver
    table = None
    if solver["kind"] == "pseudoinverse":
        D = assemble_data_matrix(train)
        model = solve_pseudoinverse(D, R)
    elif "lambdas" in solver:
        lams = [float(v) for v in solver["lambdas"]]
        if len(lams) != 4:
            raise ConfigurationError("solver.lambdas must have 4 entries")
        ne = gram_accumulate(train, None, R,
                             batch_size=int(solver.get("batch_size", 2048)))
        model = solve_regularized(ne, RegularizerSpec(*lams))
    else:
        val = reduced.data[:, va]
        if val.shape[1] < 2:
            raise ConfigurationError(
                "grid search needs a validation split with >= 2 columns")
        ne = gram_accumulate(train, None, R,
                             batch_size=int(solver.get("batch_size", 2048)))
        horizon = min((val.shape[1] - 1) * reduced.dt, config.forecast_horizon,
                      float(solver.get("grid_horizon", np.inf)))
        grid_opts = solver["grid"]
        unknown = set(grid_opts) - {"log10_min", "log10_max", "log10_step"}
        if unknown:
            raise ConfigurationError(
                f"unknown solver.grid keys: {sorted(unknown)}")
        spec = GridSpec(**{key: float(v) for key, v in grid_opts.items()})
        best, model, table = grid_search(
            ne, (val[:, 0], val), grid=spec, horizon=horizon,
            dt=reduced.dt, integrator=_integrator_spec(config, reduced.dt))

    reg = model.regularizer
    info = {"solver": model.solver, "residual": model.residual,
            "r": model.r, "k_train": train.shape[1],
            "derivative_source": config.derivative_source,
            "lambdas": None if reg is None else
            [reg.lambda1, reg.lambda2, reg.lambda3, reg.lambda4]}
    return model, table, info


def cmd_train(config, out_dir):
    reduced, _ = read_container(os.path.join(out_dir, REDUCED_FILE))
    basis, _ = read_basis(os.path.join(out_dir, BASIS_FILE))
    model, table, info = train_operators(config, reduced, basis)
    write_operators(os.path.join(out_dir, OPERATORS_FILE), model)
    rows = [] if table is None else [
        (e["lambda2"], e["lambda3"], e["score"], e["failure_time"])
        for e in table]
    write_csv(os.path.join(out_dir, "score_table.csv"),
              ["lambda2", "lambda3", "score", "failure_time"], rows)
    write_json(os.path.join(out_dir, "train_summary.json"), info)
    return model, table, info


# ---------------------------------------------------------------------------
# forecast

def sample_forecast_starts(k_test: int, n_steps: int, n_ic: int, seed: int,
                           rng=None):
    """Seeded draw of test-column start indices leaving room for the
    whole horizon. Returned sorted ascending."""
    count = k_test - n_steps
    if count < 1:
        raise ConfigurationError(
            f"test window ({k_test} columns) is shorter than the "
            f"forecast horizon ({n_steps} steps)")
    if n_ic > count:
        raise ConfigurationError(
            f"cannot draw {n_ic} distinct starts from {count} candidates")
    if rng is None:
        rng = np.random.default_rng(seed)
    return np.sort(rng.choice(count, size=n_ic, replace=False))


def forecast_trajectories(config, model, basis, reduced: SnapshotMatrix,
                          start_indices=None):
    """Integrate the learned model from test-set initial conditions.

    Per-IC integration failures are recorded, not raised: the result
    entry keeps the valid prefix and a failure_time.
    """
    k = reduced.n_snapshots
    tr, va, te = split_columns(k, config.splits)
    latent_test = reduced.data[:, te]
    dt = reduced.dt
    n_steps = int(math.floor(config.forecast_horizon / dt + 1e-9))
    if start_indices is None:
        start_indices = sample_forecast_starts(
            latent_test.shape[1], n_steps, config.n_initial_conditions,
            config.seeds[0])
    spec = _integrator_spec(config, dt)

    results = []
    for s in start_indices:
        s = int(s)
        q0 = latent_test[:, s]
        t_start = reduced.t0 + (te.start + s) * dt
        failure_time = None
        try:
            if n_steps == 0:
                latent = q0[:, np.newaxis].copy()
            else:
                pred = integrate(lambda q: quadratic_rhs(model, q), q0,
                                 0.0, n_steps * dt, spec)
                latent = pred.data
        except IntegrationFailureError as exc:
            latent = np.asarray(exc.partial_states, dtype=np.float64)
            if latent.ndim != 2 or latent.shape[1] == 0:
                latent = q0[:, np.newaxis]
            failure_time = float(exc.last_valid_time)
        full = reduction.reconstruct(basis, latent) if basis is not None \
            else latent
        results.append({
            "test_index": s,
            "column": int(te.start + s),
            "t_start": float(t_start),
            "latent": SnapshotMatrix(latent, dt=dt, t0=t_start,
                                     system=reduced.system),
            "full": SnapshotMatrix(np.ascontiguousarray(full), dt=dt,
                                   t0=t_start, system=reduced.system),
            "failure_time": failure_time,
        })
    return results


def cmd_forecast(config, out_dir):
    reduced, _ = read_container(os.path.join(out_dir, REDUCED_FILE))
    basis, _ = read_basis(os.path.join(out_dir, BASIS_FILE))
    model, _ = read_operators(os.path.join(out_dir, OPERATORS_FILE))
    results = forecast_trajectories(config, model, basis, reduced)
    manifest = {"dt": reduced.dt,
                "horizon": config.forecast_horizon,
                "n_steps": int(math.floor(config.forecast_horizon /
                                          reduced.dt + 1e-9)),
                "ics": []}
    for i, res in enumerate(results):
        latent_file = f"forecast_ic{i:03d}_latent.opnf"
        full_file = f"forecast_ic{i:03d}_full.opnf"
        write_container(os.path.join(out_dir, latent_file),
                        res["latent"].data, dt=res["latent"].dt,
                        t0=res["latent"].t0, system=res["latent"].system)
        write_container(os.path.join(out_dir, full_file),
                        res["full"].data, dt=res["full"].dt,
                        t0=res["full"].t0, system=res["full"].system)
        manifest["ics"].append({
            "test_index": res["test_index"], "column": res["column"],
            "t_start": res["t_start"], "failure_time": res["failure_time"],
            "latent_file": latent_file, "full_file": full_file})
    write_json(os.path.join(out_dir, "forecast_manifest.json"), manifest)
    return results


# ---------------------------------------------------------------------------
# evaluate

def evaluate_forecasts(config, truth: SnapshotMatrix, forecasts):
    """Score forecasts against the reference record they came from.

    truth must live in the same space as the forecasts being scored
    (latent or full, per config.metric_space). Returns the report dict;
    σ is computed per IC from the ground-truth evaluation window.
    """
    dt = truth.dt
    key = "latent" if config.metric_space == "latent" else "full"
    n_steps = int(math.floor(config.forecast_horizon / dt + 1e-9))
    rel_times = dt * np.arange(n_steps + 1)
    lam = config.lyapunov_exponent

    per_ic_values = []
    vpt_rows = []
    vpts = []
    for res in forecasts:
        pred_snap = res[key]
        if abs(pred_snap.dt - dt) > 1e-12:
            raise ConfigurationError(
                f"forecast dt {pred_snap.dt} does not match truth dt {dt}")
        j = _grid_index(pred_snap.t0, truth.t0, dt, "forecast start time")
        if j < 0 or j + n_steps > truth.n_snapshots - 1:
            raise ConfigurationError(
                f"truth record does not cover the forecast window "
                f"starting at t={pred_snap.t0}")
        truth_seg = truth.data[:, j:j + n_steps + 1]
        pred = np.full((truth.n_states, n_steps + 1), np.nan)
        p = min(pred_snap.n_snapshots, n_steps + 1)
        pred[:, :p] = pred_snap.data[:, :p]
        sigma = sigma_from_truth(truth_seg)
        series = nrmse(truth_seg, pred, sigma, times=rel_times,
                       lyapunov_exponent=lam)
        value = vpt(series, config.vpt_epsilon)
        per_ic_values.append(series.values)
        vpts.append(value)
        vpt_rows.append({"test_index": res.get("test_index"),
                         "t_start": float(pred_snap.t0),
                         "vpt": float(value),
                         "failure_time": res.get("failure_time")})

    stacked = np.vstack(per_ic_values)
    # Diverged forecasts carry inf tails; the envelope inherits them.
    with np.errstate(invalid="ignore"):
        mean = np.mean(stacked, axis=0)
        std = np.std(stacked, axis=0)
    return {
        "times": rel_times,
        "per_ic_nrmse": stacked,
        "vpt_rows": vpt_rows,
        "aggregate": aggregate_vpt(vpts),
        "envelope_mean": mean,
        "envelope_std": std,
        "epsilon": config.vpt_epsilon,
        "lyapunov_exponent": lam,
        "metric_space": config.metric_space,
    }


def cmd_evaluate(config, out_dir):
    truth_file = REDUCED_FILE if config.metric_space == "latent" \
        else SNAPSHOTS_FILE
    truth, _ = read_container(os.path.join(out_dir, truth_file))
    manifest = _read_json(os.path.join(out_dir, "forecast_manifest.json"))
    forecasts = []
    for entry in manifest["ics"]:
        latent, _ = read_container(os.path.join(out_dir, entry["latent_file"]))
        full, _ = read_container(os.path.join(out_dir, entry["full_file"]))
        forecasts.append({"latent": latent, "full": full,
                          "test_index": entry["test_index"],
                          "failure_time": entry["failure_time"]})
    report = evaluate_forecasts(config, truth, forecasts)

    times = report["times"]
    stacked = report["per_ic_nrmse"]
    header = ["time"] + [f"ic_{i:03d}" for i in range(stacked.shape[0])]
    rows = [(times[j], *stacked[:, j]) for j in range(times.size)]
    write_csv(os.path.join(out_dir, "nrmse_series.csv"), header, rows)
    write_csv(os.path.join(out_dir, "vpt.csv"),
              ["ic", "test_index", "t_start", "vpt", "failure_time"],
              [(i, e["test_index"], e["t_start"], e["vpt"], e["failure_time"])
               for i, e in enumerate(report["vpt_rows"])])
    write_csv(os.path.join(out_dir, "envelope.csv"),
              ["time", "mean", "std"],
              [(times[j], report["envelope_mean"][j],
                report["envelope_std"][j]) for j in range(times.size)])
    write_json(os.path.join(out_dir, "evaluate_summary.json"), {
        "aggregate_vpt": report["aggregate"],
        "epsilon": report["epsilon"],
        "lyapunov_exponent": report["lyapunov_exponent"],
        "metric_space": report["metric_space"],
        "n_initial_conditions": stacked.shape[0],
        "failures": [e["failure_time"] for e in report["vpt_rows"]],
    })
    return report


# ---------------------------------------------------------------------------
# restart consistency check

def restart_check(config, truth: SnapshotMatrix, forecast_full: SnapshotMatrix,
                  t_pick: float, duration: float):
    """Run the reference spectral solver from a predicted state.

    Reconstructed state at t_pick seeds the reference stepper for
    `duration` seconds; the result is compared pointwise against the
    ground-truth continuation. Blow-up is reported as a finding in the
    summary, with the valid prefix kept.
    """
    if config.system != "ks":
        raise ConfigurationError(
            "the restart check drives the spectral solver; system must be ks")
    params = config.system_params
    ks = KsConfig(
        domain_length=float(params.get("domain_length", 200.0)),
        n_grid=int(params.get("n_grid", 512)),
        dt=float(params.get("dt", 0.125)),
        t_final=0.0,
        a_coeff=float(params.get("a_coeff", 1.0)),
        b_coeff=float(params.get("b_coeff", 1.0)))
    dt = ks.dt
    if abs(truth.dt - dt) > 1e-12:
        raise ConfigurationError(
            f"truth dt {truth.dt} does not match the solver dt {dt}")
    if duration < 0:
        raise ConfigurationError("duration must be >= 0")

    j_f = _grid_index(t_pick, forecast_full.t0, dt, "t_pick")
    if not 0 <= j_f < forecast_full.n_snapshots:
        raise ConfigurationError(
            f"t_pick {t_pick} is outside the forecast window")
    j_t = _grid_index(t_pick, truth.t0, dt, "t_pick")
    n_steps = int(round(duration / dt))
    if abs(n_steps * dt - duration) > 1e-9:
        raise ConfigurationError(
            f"duration {duration} is not a multiple of dt={dt}")
    if j_t < 0 or j_t + n_steps >= truth.n_snapshots:
        raise ConfigurationError(
            "truth record does not cover [t_pick, t_pick + duration]")

    u0 = forecast_full.data[:, j_f]
    coeffs = etdrk4_coefficients(ks)
    state_hat = np.fft.fft(u0)
    columns = [u0.copy()]
    blow_up_time = None
    for i in range(n_steps):
        try:
            state_hat = etdrk4_step(state_hat, coeffs, ks, step_index=i)
        except BlowUpError:
            blow_up_time = t_pick + (i + 1) * dt
            break
        columns.append(np.real(np.fft.ifft(state_hat)))

    restarted = np.column_stack(columns)
    p = restarted.shape[1]
    reference = truth.data[:, j_t:j_t + n_steps + 1]
    abs_error = np.abs(restarted - reference[:, :p])

    x = grid_points(ks)
    trace_idx = [int(round(i * ks.n_grid / 6)) for i in range(6)]
    summary = {
        "t_pick": float(t_pick),
        "duration": float(duration),
        "steps_completed": int(p - 1),
        "blow_up": blow_up_time is not None,
        "blow_up_time": blow_up_time,
        "max_abs_error": float(np.max(abs_error)),
        "relative_l2": float(relative_l2(reference[:, :p], restarted)),
        "trace_locations": [float(x[i]) for i in trace_idx],
    }
    return {
        "restarted": SnapshotMatrix(restarted, dt=dt, t0=t_pick, system="ks"),
        "reference": SnapshotMatrix(reference.copy(), dt=dt, t0=t_pick,
                                    system="ks"),
        "abs_error": SnapshotMatrix(abs_error, dt=dt, t0=t_pick, system="ks"),
        "trace_indices": trace_idx,
        "summary": summary,
    }


def cmd_restart_check(config, out_dir):
    opts = config.restart
    if ("t_pick" in opts) == ("t_pick_offset" in opts):
        raise ConfigurationError(
            "restart needs exactly one of t_pick (absolute seconds) or "
            "t_pick_offset (seconds after the forecast start)")
    duration = float(opts.get("duration", 20.0))
    ic_index = int(opts.get("ic_index", 0))

    truth, _ = read_container(os.path.join(out_dir, SNAPSHOTS_FILE))
    manifest = _read_json(os.path.join(out_dir, "forecast_manifest.json"))
    if not 0 <= ic_index < len(manifest["ics"]):
        raise ConfigurationError(
            f"restart.ic_index {ic_index} is out of range")
    entry = manifest["ics"][ic_index]
    forecast_full, _ = read_container(
        os.path.join(out_dir, entry["full_file"]))
    if "t_pick" in opts:
        t_pick = float(opts["t_pick"])
    else:
        offset = float(opts["t_pick_offset"])
        steps = round(offset / truth.dt)
        t_pick = forecast_full.t0 + steps * truth.dt

    report = restart_check(config, truth, forecast_full, t_pick, duration)
    for name, snap in (("restart_restarted.opnf", report["restarted"]),
                       ("restart_reference.opnf", report["reference"]),
                       ("restart_error.opnf", report["abs_error"])):
        write_container(os.path.join(out_dir, name), snap.data,
                        dt=snap.dt, t0=snap.t0, system=snap.system)
    times = t_pick + truth.dt * np.arange(report["restarted"].n_snapshots)
    header = ["time"]
    for i in report["trace_indices"]:
        header += [f"x{i}_restarted", f"x{i}_reference", f"x{i}_abs_error"]
    rows = []
    for j in range(times.size):
        row = [times[j]]
        for i in report["trace_indices"]:
            row += [report["restarted"].data[i, j],
                    report["reference"].data[i, j],
                    report["abs_error"].data[i, j]]
        rows.append(row)
    write_csv(os.path.join(out_dir, "restart_traces.csv"), header, rows)
    write_json(os.path.join(out_dir, "restart_summary.json"),
               report["summary"])
    return report
