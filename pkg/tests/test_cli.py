"""End-to-end runs of main.main() against temporary output directories."""

import json
import os

import numpy as np
import pandas as pd
import pytest

import main
from output import TRAJECTORY_COLUMNS

SHORT = ["--rounds", "3000", "--transient", "1000"]


def run(capsys, *argv):
    code = main.main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def error_line(err):
    lines = [line for line in err.splitlines() if line.startswith("error[")]
    assert len(lines) == 1
    return lines[0]


@pytest.fixture
def trajectory(tmp_path, capsys, reference_config):
    out = tmp_path / "sim"
    code, _, _ = run(capsys, "simulate", "--config", reference_config, "--out", out, *SHORT)
    assert code == 0
    return out / "trajectory.csv"


def test_simulate_writes_trajectory_and_metadata(tmp_path, capsys, reference_config):
    out = tmp_path / "run"
    code, stdout, _ = run(capsys, "simulate", "--config", reference_config, "--out", out, *SHORT)
    assert code == 0
    assert '"rounds_kept": 2000' in stdout

    frame = pd.read_csv(out / "trajectory.csv")
    assert list(frame.columns) == TRAJECTORY_COLUMNS
    assert len(frame) == 2000
    assert frame["round"].iloc[0] == 1001
    np.testing.assert_array_equal(frame["tau_B"], 2 * frame["K"])

    meta = json.loads((out / "trajectory_meta.json").read_text(encoding="utf-8"))
    assert meta["seed"] == 0
    assert meta["kept"] == 2000
    assert meta["params"]["sigma"] == 0.02
    assert meta["params"]["i0"] == "random"


def test_simulate_is_byte_identical_for_the_same_seed(tmp_path, capsys, reference_config):
    for name in ("a", "b"):
        assert run(capsys, "simulate", "--config", reference_config, "--out", tmp_path / name, "--seed", "7", *SHORT)[0] == 0
    assert (tmp_path / "a" / "trajectory.csv").read_bytes() == (tmp_path / "b" / "trajectory.csv").read_bytes()


def test_simulate_json_format(tmp_path, capsys, reference_config):
    code, _, _ = run(capsys, "simulate", "--config", reference_config, "--out", tmp_path, "--format", "json", *SHORT)
    assert code == 0
    records = json.loads((tmp_path / "trajectory.json").read_text(encoding="utf-8"))
    assert len(records) == 2000
    assert set(records[0]) == set(TRAJECTORY_COLUMNS)


def test_missing_required_key_exits_2(tmp_path, capsys, reference_config):
    conf = tmp_path / "no_sigma.conf"
    lines = [line for line in open(reference_config, encoding="utf-8") if not line.startswith("sigma")]
    conf.write_text("".join(lines), encoding="utf-8")
    code, _, err = run(capsys, "simulate", "--config", conf, "--out", tmp_path)
    assert code == 2
    assert error_line(err).startswith("error[2]:")
    assert "sigma" in error_line(err)


def test_invalid_flag_value_exits_2(tmp_path, capsys, reference_config):
    code, _, err = run(capsys, "simulate", "--config", reference_config, "--out", tmp_path, "--u", "3")
    assert code == 2
    assert "u:" in error_line(err)


@pytest.mark.parametrize("argv", [[], ["bogus"], ["spectrum"], ["simulate", "--no-such-flag"]])
def test_usage_errors_exit_1(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert error_line(err).startswith("error[1]:")


def test_spectrum_of_integrated_returns(tmp_path, capsys, trajectory):
    out = tmp_path / "spectrum"
    code, _, _ = run(capsys, "spectrum", trajectory, "--column", "r", "--resolutions", "8,16", "--out", out)
    assert code == 0
    frame = pd.read_csv(out / "spectrum.csv")
    assert list(frame.columns) == ["resolution", "alpha", "f"]
    assert sorted(frame["resolution"].unique()) == [125, 250]
    peak = json.loads((out / "spectrum_peak.json").read_text(encoding="utf-8"))
    assert peak["resolution"] == 250
    assert 0.0 < peak["peak_alpha"] < 1.5


def test_spectrum_output_ignores_worker_count(tmp_path, capsys, trajectory):
    for workers in ("1", "4"):
        code, _, _ = run(
            capsys, "spectrum", trajectory, "--column", "K", "--transform", "levels",
            "--resolutions", "4,8,16", "--workers", workers, "--out", tmp_path / workers,
        )
        assert code == 0
    assert (tmp_path / "1" / "spectrum.csv").read_bytes() == (tmp_path / "4" / "spectrum.csv").read_bytes()


def test_spectrum_of_kinetic_levels(tmp_path, capsys, trajectory):
    code, _, _ = run(
        capsys, "spectrum", trajectory, "--column", "K", "--transform", "kinetic",
        "--resolutions", "8,16", "--out", tmp_path,
    )
    assert code == 0
    peak = json.loads((tmp_path / "spectrum_peak.json").read_text(encoding="utf-8"))
    assert peak["peak_alpha"] > 0.5

    # returns take both signs
    code, _, err = run(capsys, "spectrum", trajectory, "--column", "r", "--transform", "kinetic", "--out", tmp_path)
    assert code == 2
    assert "non-positive K" in error_line(err)


def test_spectrum_missing_column_exits_2(tmp_path, capsys, trajectory):
    code, _, err = run(capsys, "spectrum", trajectory, "--column", "q", "--out", tmp_path)
    assert code == 2
    assert "'q'" in error_line(err)


def test_spectrum_degenerate_signal_exits_3(tmp_path, capsys):
    path = tmp_path / "flat.csv"
    pd.DataFrame({"v": np.ones(4096)}).to_csv(path, index=False)
    code, _, err = run(capsys, "spectrum", path, "--column", "v", "--transform", "levels", "--out", tmp_path)
    assert code == 3
    assert "no valid boxes" in error_line(err)


def test_density_of_uniform_column(tmp_path, capsys):
    path = tmp_path / "uniform.csv"
    pd.DataFrame({"K": np.random.default_rng(0).uniform(1.0, 2.0, 100_000)}).to_csv(path, index=False)
    code, _, _ = run(capsys, "density", path, "--out", tmp_path)
    assert code == 0
    fit = json.loads((tmp_path / "power_law_fit.json").read_text(encoding="utf-8"))
    assert fit["slope"] == pytest.approx(0.0, abs=0.05)
    assert len(pd.read_csv(tmp_path / "histogram.csv")) == 16


def test_density_errors(tmp_path, capsys):
    path = tmp_path / "few.csv"
    pd.DataFrame({"K": [0.1, 0.2, 0.3, 0.4, 0.5]}).to_csv(path, index=False)
    assert run(capsys, "density", path, "--out", tmp_path)[0] == 3

    pd.DataFrame({"K": [0.1, -0.2, 0.3]}).to_csv(path, index=False)
    assert run(capsys, "density", path, "--out", tmp_path)[0] == 2


def test_staircase(tmp_path, capsys, trajectory):
    code, _, _ = run(capsys, "staircase", trajectory, "--out", tmp_path)
    assert code == 0
    frame = pd.read_csv(tmp_path / "staircase.csv")
    assert list(frame.columns) == ["round", "theta_cumulative"]
    assert len(frame) == 2000
    assert frame["round"].iloc[0] == 1001
    assert frame["theta_cumulative"].is_monotonic_increasing


def test_staircase_of_empty_trajectory_exits_2(tmp_path, capsys):
    path = tmp_path / "empty.csv"
    path.write_text(",".join(TRAJECTORY_COLUMNS) + "\n", encoding="utf-8")
    assert run(capsys, "staircase", path, "--out", tmp_path)[0] == 2


def test_stats(tmp_path, capsys, trajectory):
    code, _, _ = run(capsys, "stats", trajectory, "--out", tmp_path, "--max-lag", "10")
    assert code == 0
    stats = json.loads((tmp_path / "stats.json").read_text(encoding="utf-8"))
    assert stats["n"] == 2000
    assert len(stats["acf_abs"]) == 10
    assert stats["excess_kurtosis"] > 0


def test_stats_edge_cases(tmp_path, capsys):
    path = tmp_path / "flat.csv"
    pd.DataFrame({"r": np.full(30, 0.01)}).to_csv(path, index=False)
    assert run(capsys, "stats", path, "--out", tmp_path)[0] == 0
    stats = json.loads((tmp_path / "stats.json").read_text(encoding="utf-8"))
    assert stats["excess_kurtosis"] is None

    assert run(capsys, "stats", path, "--out", tmp_path, "--max-lag", "30")[0] == 2


def test_compare_simulation_with_vix_fixture(tmp_path, capsys, trajectory, fixtures_dir):
    market = os.path.join(fixtures_dir, "vix_sample.csv")
    code, _, _ = run(
        capsys, "compare", trajectory, "--market", market, "--resolutions", "2,3", "--out", tmp_path,
    )
    assert code == 0
    doc = json.loads((tmp_path / "comparison.json").read_text(encoding="utf-8"))
    assert doc["market"]["rows_read"] == 200
    assert doc["market"]["rows_kept"] == 195
    assert doc["peak_delta"] == pytest.approx(doc["market"]["peak_alpha"] - doc["sim"]["peak_alpha"])
    assert isinstance(doc["market_alpha_above_one"], bool)


def test_compare_flags_super_unit_exponents(tmp_path, capsys, fixtures_dir):
    market = os.path.join(fixtures_dir, "vix_heavy_tail.csv")
    code, _, _ = run(
        capsys, "compare", market, "--column", "Close", "--market", market,
        "--resolutions", "2,4", "--out", tmp_path,
    )
    assert code == 0
    doc = json.loads((tmp_path / "comparison.json").read_text(encoding="utf-8"))
    assert doc["market_alpha_above_one"] is True
    assert doc["market"]["peak_alpha"] > 1.0
    assert doc["peak_delta"] == pytest.approx(0.0, abs=1e-12)


def test_compare_missing_market_file_exits_2(tmp_path, capsys, trajectory):
    code, _, err = run(capsys, "compare", trajectory, "--market", tmp_path / "nope.csv", "--out", tmp_path)
    assert code == 2
    assert error_line(err).startswith("error[2]:")
