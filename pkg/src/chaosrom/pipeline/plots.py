"""Static SVG figures rendered from report files.

Every figure is deterministic: the Agg backend, a fixed svg.hashsalt,
and no Date metadata make repeated runs byte-identical, which the
pipeline's determinism guarantee extends to its artifacts.
"""

import json
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ..errors import ConfigurationError

matplotlib.rcParams["svg.hashsalt"] = "chaosrom"
matplotlib.rcParams["figure.dpi"] = 100

_SAVE_OPTS = {"format": "svg", "metadata": {"Date": None}}


def _require_rows(arr, path):
    if arr.size == 0:
        raise ConfigurationError(f"{path}: empty series, nothing to plot")


def _read_csv(path):
    data = np.genfromtxt(path, delimiter=",", names=True,
                         filling_values=np.nan)
    arr = np.atleast_1d(data)
    _require_rows(arr, path)
    return arr


def envelope_plot(times, mean, std, epsilon, lyapunov_exponent, out_path):
    """Mean NRMSE with a +/- one-sigma band and the threshold line."""
    times = np.asarray(times, dtype=np.float64)
    _require_rows(times, out_path)
    x = times * lyapunov_exponent
    mean = np.asarray(mean, dtype=np.float64)
    std = np.asarray(std, dtype=np.float64)
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    finite = np.isfinite(mean)
    ax.fill_between(x[finite], (mean - std)[finite], (mean + std)[finite],
                    alpha=0.3, color="tab:blue", label="±1σ")
    ax.plot(x[finite], mean[finite], color="tab:blue", label="mean NRMSE")
    ax.axhline(epsilon, linestyle="--", color="black",
               label=f"ε = {epsilon:g}")
    ax.set_xlabel("time (Lyapunov units)")
    ax.set_ylabel("NRMSE")
    ax.legend(loc="upper left")
    fig.savefig(out_path, **_SAVE_OPTS)
    plt.close(fig)
    return out_path


def series_plot(times, series, labels, out_path, xlabel="time (s)",
                ylabel="NRMSE"):
    times = np.asarray(times, dtype=np.float64)
    _require_rows(times, out_path)
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    for values, label in zip(series, labels):
        values = np.asarray(values, dtype=np.float64)
        finite = np.isfinite(values)
        ax.plot(times[finite], values[finite], linewidth=0.8, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if len(labels) <= 12:
        ax.legend(loc="upper left", fontsize="small")
    fig.savefig(out_path, **_SAVE_OPTS)
    plt.close(fig)
    return out_path


def variance_plot(modes, cumulative, out_path, r=None):
    modes = np.asarray(modes)
    _require_rows(modes, out_path)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(modes, cumulative, color="tab:blue")
    if r is not None:
        ax.axvline(r, linestyle="--", color="black", label=f"r = {r}")
        ax.legend(loc="lower right")
    ax.set_xlabel("mode")
    ax.set_ylabel("cumulative explained variance")
    ax.set_ylim(0.0, 1.02)
    fig.savefig(out_path, **_SAVE_OPTS)
    plt.close(fig)
    return out_path


def vpt_plot(indices, vpts, out_path):
    indices = np.asarray(indices)
    _require_rows(indices, out_path)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.bar(np.arange(len(vpts)), vpts, color="tab:blue")
    ax.set_xticks(np.arange(len(vpts)))
    ax.set_xticklabels([str(i) for i in indices], fontsize="small")
    ax.set_xlabel("initial condition")
    ax.set_ylabel("VPT (Lyapunov units)")
    fig.savefig(out_path, **_SAVE_OPTS)
    plt.close(fig)
    return out_path


def field_plot(panels, titles, dt, t0, out_path, x_extent=None):
    """Stacked space-time heatmaps with labeled colorbars.

    panels are n x k matrices; the color scale is linear and each panel
    gets its own colorbar of absolute values.
    """
    if not panels or panels[0].size == 0:
        raise ConfigurationError(f"{out_path}: empty field, nothing to plot")
    n_panels = len(panels)
    fig, axes = plt.subplots(n_panels, 1,
                             figsize=(8.0, 2.6 * n_panels), squeeze=False)
    for ax, field, title in zip(axes[:, 0], panels, titles):
        k = field.shape[1]
        extent = [t0, t0 + dt * max(k - 1, 1), 0.0,
                  field.shape[0] if x_extent is None else x_extent]
        im = ax.imshow(field, aspect="auto", origin="lower",
                       interpolation="nearest", extent=extent,
                       cmap="viridis")
        cbar = fig.colorbar(im, ax=ax)
        cbar.set_label("absolute value" if "error" in title.lower()
                       else "value")
        ax.set_title(title, fontsize="medium")
        ax.set_ylabel("x")
    axes[-1, 0].set_xlabel("time (s)")
    fig.tight_layout()
    fig.savefig(out_path, **_SAVE_OPTS)
    plt.close(fig)
    return out_path


def traces_plot(times, groups, locations, out_path):
    """One subplot per probe location, restarted vs reference curves."""
    times = np.asarray(times, dtype=np.float64)
    _require_rows(times, out_path)
    n = len(locations)
    fig, axes = plt.subplots(n, 1, figsize=(8.0, 1.6 * n), sharex=True,
                             squeeze=False)
    for ax, (restarted, reference), loc in zip(axes[:, 0], groups, locations):
        ax.plot(times, reference, color="black", linewidth=0.9,
                label="reference")
        ax.plot(times, restarted, color="tab:red", linewidth=0.9,
                linestyle="--", label="restarted")
        ax.set_ylabel(f"x = {loc:g}", fontsize="small")
    axes[0, 0].legend(loc="upper right", fontsize="small")
    axes[-1, 0].set_xlabel("time (s)")
    fig.tight_layout()
    fig.savefig(out_path, **_SAVE_OPTS)
    plt.close(fig)
    return out_path


def cmd_plot(config, out_dir):
    """Render every report present in out_dir; returns written paths."""
    from ..metrics import nrse_field, sigma_from_truth
    from .container import read_container

    written = []
    env_path = os.path.join(out_dir, "envelope.csv")
    summary_path = os.path.join(out_dir, "evaluate_summary.json")
    if os.path.exists(env_path):
        env = _read_csv(env_path)
        epsilon, lam = 0.5, 1.0
        if os.path.exists(summary_path):
            with open(summary_path, encoding="utf-8") as fh:
                summary = json.load(fh)
            epsilon = summary.get("epsilon", epsilon)
            lam = summary.get("lyapunov_exponent", lam)
        elif config is not None:
            epsilon, lam = config.vpt_epsilon, config.lyapunov_exponent
        written.append(envelope_plot(
            env["time"], env["mean"], env["std"], epsilon, lam,
            os.path.join(out_dir, "envelope.svg")))

    series_path = os.path.join(out_dir, "nrmse_series.csv")
    if os.path.exists(series_path):
        table = _read_csv(series_path)
        names = [nm for nm in table.dtype.names if nm != "time"]
        written.append(series_plot(
            table["time"], [table[nm] for nm in names], names,
            os.path.join(out_dir, "nrmse_series.svg")))

    var_path = os.path.join(out_dir, "variance.csv")
    if os.path.exists(var_path):
        table = _read_csv(var_path)
        r = None
        reduce_path = os.path.join(out_dir, "reduce_summary.json")
        if os.path.exists(reduce_path):
            with open(reduce_path, encoding="utf-8") as fh:
                r = json.load(fh).get("r")
        written.append(variance_plot(
            table["mode"], table["cumulative_energy"],
            os.path.join(out_dir, "variance.svg"), r=r))

    vpt_path = os.path.join(out_dir, "vpt.csv")
    if os.path.exists(vpt_path):
        table = _read_csv(vpt_path)
        written.append(vpt_plot(
            table["ic"].astype(int), table["vpt"],
            os.path.join(out_dir, "vpt.svg")))

    manifest_path = os.path.join(out_dir, "forecast_manifest.json")
    snaps_path = os.path.join(out_dir, "snapshots.opnf")
    if os.path.exists(manifest_path) and os.path.exists(snaps_path):
        with open(manifest_path, encoding="utf-8") as fh:
            manifest = json.load(fh)
        if manifest["ics"]:
            entry = manifest["ics"][0]
            truth, _ = read_container(snaps_path)
            pred, _ = read_container(
                os.path.join(out_dir, entry["full_file"]))
            j = int(round((pred.t0 - truth.t0) / truth.dt))
            width = min(pred.n_snapshots, truth.n_snapshots - j)
            if width > 0 and 0 <= j:
                t_seg = truth.data[:, j:j + width]
                p_seg = pred.data[:, :width]
                sigma = sigma_from_truth(t_seg)
                written.append(field_plot(
                    [t_seg, p_seg, nrse_field(t_seg, p_seg, sigma)],
                    ["ground truth", "prediction", "NRSE error"],
                    truth.dt, pred.t0,
                    os.path.join(out_dir, "forecast_field.svg")))

    for stem in ("restarted", "reference", "error"):
        if not os.path.exists(os.path.join(out_dir, f"restart_{stem}.opnf")):
            break
    else:
        fields = []
        for stem in ("restarted", "reference", "error"):
            snap, _ = read_container(
                os.path.join(out_dir, f"restart_{stem}.opnf"))
            fields.append(snap)
        width = min(f.n_snapshots for f in fields)
        written.append(field_plot(
            [f.data[:, :width] for f in fields],
            ["restarted solution", "reference solution", "absolute error"],
            fields[0].dt, fields[0].t0,
            os.path.join(out_dir, "restart_fields.svg")))

    traces_path = os.path.join(out_dir, "restart_traces.csv")
    if os.path.exists(traces_path):
        table = _read_csv(traces_path)
        names = [nm for nm in table.dtype.names if nm.endswith("_restarted")]
        x_locations = None
        restart_summary = os.path.join(out_dir, "restart_summary.json")
        if os.path.exists(restart_summary):
            with open(restart_summary, encoding="utf-8") as fh:
                x_locations = json.load(fh).get("trace_locations")
        locations, groups = [], []
        for pos, nm in enumerate(names):
            stem = nm[:-len("_restarted")]
            if x_locations and pos < len(x_locations):
                locations.append(float(x_locations[pos]))
            else:
                locations.append(float(stem.lstrip("x")))
            groups.append((table[nm], table[stem + "_reference"]))
        written.append(traces_plot(
            table["time"], groups, locations,
            os.path.join(out_dir, "restart_traces.svg")))

    if not written:
        raise ConfigurationError(
            f"no report files found under {out_dir}; run the earlier "
            "pipeline steps first")
    return written
