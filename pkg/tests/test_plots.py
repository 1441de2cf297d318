"""Tests for SVG report rendering."""

import numpy as np
import pytest

from chaosrom.errors import ConfigurationError
from chaosrom.pipeline.plots import (cmd_plot, envelope_plot, field_plot,
                                     series_plot, traces_plot, variance_plot,
                                     vpt_plot)


def _times(n=50):
    return 0.01 * np.arange(n)


def test_envelope_plot_writes_svg(tmp_path):
    t = _times()
    mean = np.linspace(0.0, 1.0, t.size)
    std = np.full(t.size, 0.1)
    out = envelope_plot(t, mean, std, 0.5, 1.68, tmp_path / "e.svg")
    text = (tmp_path / "e.svg").read_text()
    assert text.startswith("<?xml")
    assert "svg" in text


def test_envelope_plot_deterministic(tmp_path):
    t = _times()
    mean = np.linspace(0.0, 1.0, t.size)
    std = np.full(t.size, 0.1)
    envelope_plot(t, mean, std, 0.5, 1.68, tmp_path / "a.svg")
    envelope_plot(t, mean, std, 0.5, 1.68, tmp_path / "b.svg")
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


def test_envelope_plot_skips_inf_tail(tmp_path):
    t = _times()
    mean = np.linspace(0.0, 1.0, t.size)
    mean[30:] = np.inf
    std = np.zeros(t.size)
    envelope_plot(t, mean, std, 0.5, 1.0, tmp_path / "e.svg")
    assert (tmp_path / "e.svg").exists()


def test_empty_series_rejected(tmp_path):
    empty = np.array([])
    with pytest.raises(ConfigurationError):
        envelope_plot(empty, empty, empty, 0.5, 1.0, tmp_path / "e.svg")
    with pytest.raises(ConfigurationError):
        series_plot(empty, [], [], tmp_path / "s.svg")
    with pytest.raises(ConfigurationError):
        variance_plot(empty, empty, tmp_path / "v.svg")
    with pytest.raises(ConfigurationError):
        vpt_plot(empty, empty, tmp_path / "b.svg")
    with pytest.raises(ConfigurationError):
        field_plot([np.empty((0, 0))], ["x"], 0.1, 0.0, tmp_path / "f.svg")
    with pytest.raises(ConfigurationError):
        traces_plot(empty, [], [], tmp_path / "t.svg")


def test_series_plot_many_labels_no_legend(tmp_path):
    t = _times(20)
    series = [np.sin(t + i) for i in range(15)]
    labels = [f"ic_{i:03d}" for i in range(15)]
    series_plot(t, series, labels, tmp_path / "s.svg")
    assert (tmp_path / "s.svg").exists()


def test_variance_plot_with_marker(tmp_path):
    modes = np.arange(1, 11)
    cume = np.linspace(0.5, 1.0, 10)
    variance_plot(modes, cume, tmp_path / "v.svg", r=4)
    assert (tmp_path / "v.svg").exists()


def test_field_plot_three_panels(tmp_path):
    rng = np.random.default_rng(0)
    panels = [rng.standard_normal((16, 30)) for _ in range(3)]
    field_plot(panels, ["truth", "prediction", "error"], 0.25, 5.0,
               tmp_path / "f.svg", x_extent=22.0)
    assert (tmp_path / "f.svg").exists()


def test_traces_plot(tmp_path):
    t = _times(40)
    groups = [(np.sin(t), np.sin(t) + 0.01) for _ in range(6)]
    locations = [0.0, 3.7, 7.3, 11.0, 14.7, 18.3]
    traces_plot(t, groups, locations, tmp_path / "tr.svg")
    assert (tmp_path / "tr.svg").exists()


def test_cmd_plot_empty_dir_rejected(tmp_path):
    with pytest.raises(ConfigurationError):
        cmd_plot(None, str(tmp_path))


def test_cmd_plot_from_report_files(tmp_path):
    # A hand-written envelope.csv and vpt.csv are enough to render two
    # figures without running the pipeline.
    (tmp_path / "envelope.csv").write_text(
        "time,mean,std\n0,0,0\n0.5,0.3,0.05\n1,0.8,0.1\n")
    (tmp_path / "vpt.csv").write_text(
        "ic,test_index,t_start,vpt,failure_time\n0,12,5.0,3.2,\n1,80,9.1,4.0,\n")
    written = cmd_plot(None, str(tmp_path))
    names = sorted(p.split("/")[-1] for p in map(str, written))
    assert names == ["envelope.svg", "vpt.svg"]
