"""End-to-end command-line tests: every stage, exit codes, determinism."""

import json
import os

import pytest

from chaosrom.pipeline.cli import build_parser, main

SYNTH_CONFIG = {
    "system": "synthetic",
    "t_final": 40.0,
    "transient_discard": 10.0,
    "splits": [0.6, 0.2, 0.2],
    "n_initial_conditions": 2,
    "forecast_horizon": 1.0,
    "reduction": {"kind": "none"},
    "solver": {"kind": "pseudoinverse"},
    "derivative_source": "exact",
    "seeds": [3],
}

KS_CONFIG = {
    "system": "ks",
    "system_params": {"domain_length": 22.0, "n_grid": 64, "dt": 0.25},
    "t_final": 300.0,
    "transient_discard": 50.0,
    "splits": [0.8, 0.1, 0.1],
    "n_initial_conditions": 2,
    "forecast_horizon": 5.0,
    "reduction": {"kind": "pca", "energy": 0.999},
    "solver": {"kind": "regularized", "lambdas": [1e-8, 1e-8, 1e-6, 0.0]},
    "derivative_source": "spline",
    "metric_space": "full",
    "restart": {"t_pick_offset": 1.0, "duration": 5.0},
    "seeds": [7],
}

STAGES = ("generate", "reduce", "train", "forecast", "evaluate")


def _write_config(tmp, doc):
    path = os.path.join(tmp, "config.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
    return path


def _run_chain(tmp, doc, stages):
    cfg = _write_config(tmp, doc)
    out = os.path.join(tmp, "out")
    for stage in stages:
        code = main([stage, "--config", cfg, "--out", out])
        assert code == 0, f"stage {stage} failed"
    return out


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    tmp = str(tmp_path_factory.mktemp("synth"))
    return _run_chain(tmp, SYNTH_CONFIG, STAGES + ("plot",))


@pytest.fixture(scope="module")
def ks_dir(tmp_path_factory):
    tmp = str(tmp_path_factory.mktemp("ks"))
    return _run_chain(tmp, KS_CONFIG, STAGES + ("restart-check", "plot"))


def test_parser_covers_all_stages():
    parser = build_parser()
    for stage in STAGES + ("restart-check", "plot"):
        args = parser.parse_args([stage, "--config", "c.json"])
        assert args.command == stage
        assert args.out == "out"
        assert args.threads == 1
        assert args.seed is None


def test_missing_config_is_exit_1(tmp_path, capsys):
    assert main(["generate", "--out", str(tmp_path)]) == 1
    assert "config" in capsys.readouterr().err


def test_unreadable_config_is_exit_1(tmp_path):
    assert main(["generate", "--config", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path)]) == 1


def test_invalid_json_config_is_exit_1(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["generate", "--config", str(path),
                 "--out", str(tmp_path)]) == 1


def test_unknown_config_key_is_exit_1(tmp_path):
    doc = dict(SYNTH_CONFIG, typo_key=1)
    path = _write_config(str(tmp_path), doc)
    assert main(["generate", "--config", path, "--out", str(tmp_path)]) == 1


def test_stage_out_of_order_is_exit_1(tmp_path):
    path = _write_config(str(tmp_path), SYNTH_CONFIG)
    out = str(tmp_path / "empty")
    assert main(["reduce", "--config", path, "--out", out]) == 1
    assert main(["evaluate", "--config", path, "--out", out]) == 1


def test_plot_empty_dir_is_exit_1(tmp_path):
    assert main(["plot", "--out", str(tmp_path)]) == 1


def test_synth_chain_file_inventory(synth_dir):
    expected = [
        "basis.opnf", "config_echo.json", "envelope.csv", "envelope.svg",
        "evaluate_summary.json", "forecast_field.svg",
        "forecast_ic000_full.opnf", "forecast_ic000_latent.opnf",
        "forecast_ic001_full.opnf", "forecast_ic001_latent.opnf",
        "forecast_manifest.json", "nrmse_series.csv", "nrmse_series.svg",
        "operators.opnf", "reduce_summary.json", "reduced.opnf",
        "score_table.csv", "snapshots.opnf", "train_summary.json",
        "variance.csv", "variance.svg", "vpt.csv", "vpt.svg",
    ]
    assert sorted(os.listdir(synth_dir)) == expected


def test_synth_chain_learns_the_system(synth_dir):
    with open(os.path.join(synth_dir, "evaluate_summary.json")) as fh:
        summary = json.load(fh)
    # Exact derivatives and no reduction: the model is essentially the
    # truth, so every forecast stays valid for the whole horizon.
    horizon_lyap = 1.0 * 0.9056
    assert summary["aggregate_vpt"]["min"] == pytest.approx(horizon_lyap,
                                                            rel=1e-6)
    assert summary["n_initial_conditions"] == 2
    assert summary["failures"] == [None, None]


def test_synth_chain_csv_headers(synth_dir):
    with open(os.path.join(synth_dir, "vpt.csv")) as fh:
        assert fh.readline().strip() == "ic,test_index,t_start,vpt,failure_time"
    with open(os.path.join(synth_dir, "envelope.csv")) as fh:
        assert fh.readline().strip() == "time,mean,std"
    with open(os.path.join(synth_dir, "nrmse_series.csv")) as fh:
        assert fh.readline().strip() == "time,ic_000,ic_001"
    with open(os.path.join(synth_dir, "variance.csv")) as fh:
        assert fh.readline().strip() == "mode,singular_value,cumulative_energy"


def test_synth_manifest_alignment(synth_dir):
    with open(os.path.join(synth_dir, "forecast_manifest.json")) as fh:
        manifest = json.load(fh)
    assert manifest["n_steps"] == 100
    assert len(manifest["ics"]) == 2
    for entry in manifest["ics"]:
        assert os.path.exists(os.path.join(synth_dir, entry["latent_file"]))
        assert entry["failure_time"] is None


def test_ks_chain_file_inventory(ks_dir):
    names = set(os.listdir(ks_dir))
    for required in ("snapshots.opnf", "basis.opnf", "reduced.opnf",
                     "operators.opnf", "forecast_manifest.json",
                     "evaluate_summary.json", "restart_summary.json",
                     "restart_traces.csv", "restart_restarted.opnf",
                     "restart_reference.opnf", "restart_error.opnf",
                     "restart_fields.svg", "restart_traces.svg",
                     "envelope.svg", "forecast_field.svg"):
        assert required in names, required


def test_ks_chain_reduces_dimension(ks_dir):
    with open(os.path.join(ks_dir, "reduce_summary.json")) as fh:
        summary = json.load(fh)
    assert summary["kind"] == "pca"
    assert 1 <= summary["r"] < 64
    assert 0.0 <= summary["holdout_projection_error"] < 0.5


def test_ks_restart_summary(ks_dir):
    with open(os.path.join(ks_dir, "restart_summary.json")) as fh:
        summary = json.load(fh)
    assert summary["duration"] == 5.0
    assert summary["steps_completed"] == 20
    assert len(summary["trace_locations"]) == 6
    assert summary["max_abs_error"] >= 0.0


def test_ks_restart_traces_header(ks_dir):
    with open(os.path.join(ks_dir, "restart_traces.csv")) as fh:
        header = fh.readline().strip().split(",")
    assert header[0] == "time"
    assert len(header) == 1 + 3 * 6
    assert header[1].endswith("_restarted")
    assert header[2].endswith("_reference")
    assert header[3].endswith("_abs_error")


def test_seed_override_changes_output(tmp_path):
    cfg = _write_config(str(tmp_path), SYNTH_CONFIG)
    out_a = str(tmp_path / "a")
    out_b = str(tmp_path / "b")
    assert main(["generate", "--config", cfg, "--out", out_a,
                 "--seed", "3"]) == 0
    assert main(["generate", "--config", cfg, "--out", out_b,
                 "--seed", "4"]) == 0
    a = open(os.path.join(out_a, "snapshots.opnf"), "rb").read()
    b = open(os.path.join(out_b, "snapshots.opnf"), "rb").read()
    assert a != b


def test_chain_is_byte_deterministic(tmp_path):
    (tmp_path / "ra").mkdir()
    (tmp_path / "rb").mkdir()
    out_a = _run_chain(str(tmp_path / "ra"), SYNTH_CONFIG, STAGES + ("plot",))
    out_b = _run_chain(str(tmp_path / "rb"), SYNTH_CONFIG, STAGES + ("plot",))
    names = sorted(os.listdir(out_a))
    assert names == sorted(os.listdir(out_b))
    for name in names:
        with open(os.path.join(out_a, name), "rb") as fh:
            blob_a = fh.read()
        with open(os.path.join(out_b, name), "rb") as fh:
            blob_b = fh.read()
        assert blob_a == blob_b, f"{name} differs between identical runs"
