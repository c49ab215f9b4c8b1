import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from harness.cli import main
from rmt.laws import configure_cache

CONFIG_DIR = Path(__file__).parent.parent / "configs"


def _runner() -> CliRunner:
    try:
        return CliRunner(mix_stderr=False)
    except TypeError:
        return CliRunner()


runner = _runner()


@pytest.fixture(autouse=True)
def reset_cache():
    """Detach any table cache a test attached"""
    yield
    configure_cache(None)


def test_cdf_to_stdout():
    result = runner.invoke(main, ["cdf", "--K", "2", "--N", "100", "--runs", "50", "--seed", "3"])
    assert result.exit_code == 0, result.stderr
    lines = result.stdout.splitlines()
    assert lines[0] == "x,empirical_cdf,fixedk_cdf,largek_cdf"
    assert len(lines) == 51


def test_csv_to_stdout_logs_fit_summary():
    result = runner.invoke(main, ["cdf", "--K", "2", "--N", "100", "--runs", "50", "--seed", "3"])
    assert result.exit_code == 0, result.stderr
    assert "ks_fixedk=" in result.stderr
    assert "ks_largek=" in result.stderr
    assert "ks_fixedk" not in result.stdout


def test_detect_to_stdout_logs_worst_errors():
    result = runner.invoke(main, [
        "detect", "--detector", "MED", "--snr-db", "-5", "--runs", "100", "--N", "400",
        "--pfa", "0.1",
    ])
    assert result.exit_code == 0, result.stderr
    assert "max_abs_error_fixedk=" in result.stderr


def test_threshold_from_config_with_overrides():
    result = runner.invoke(main, [
        "threshold", "--config", str(CONFIG_DIR / "cnd_threshold.yaml"),
        "--runs", "200", "--N", "500",
    ])
    assert result.exit_code == 0, result.stderr
    lines = result.stdout.splitlines()
    assert lines[0] == "target_pfa,eps_fixedk,eps_largek,eps_simulated"
    assert len(lines) == 11


def test_json_output():
    result = runner.invoke(main, [
        "threshold", "--detector", "CND", "--runs", "100", "--pfa", "0.05", "--pfa", "0.1",
        "--format", "json", "--timing",
    ])
    assert result.exit_code == 0, result.stderr
    document = json.loads(result.stdout)
    assert document["spec"]["pfa_grid"] == [0.05, 0.1]
    assert document["metadata"]["detector"] == "CND"
    assert "wall_time_s" in document["metadata"]
    assert len(document["records"]) == 2


def test_detect_writes_file_and_sidecar(tmp_path):
    out = tmp_path / "pd.csv"
    result = runner.invoke(main, [
        "detect", "--config", str(CONFIG_DIR / "cnd_detection.yaml"),
        "--runs", "100", "--N", "500", "--pfa", "0.1", "--out", str(out),
    ])
    assert result.exit_code == 0, result.stderr
    assert result.stdout == ""
    assert out.read_text(encoding="utf-8").startswith("target_pfa,eps_sim,pd_empirical")
    metadata = json.loads((tmp_path / "pd.csv.meta.json").read_text(encoding="utf-8"))
    assert metadata["calibration"] == "simulation"
    assert metadata["snr_db"] == pytest.approx(-15.0)


def test_detect_with_theory_calibration():
    result = runner.invoke(main, [
        "detect", "--detector", "MED", "--snr-db", "-5", "--runs", "100", "--N", "400",
        "--pfa", "0.1", "--calibration", "theory",
    ])
    assert result.exit_code == 0, result.stderr
    assert result.stdout.splitlines()[0].startswith("target_pfa,eps_fixedk,")


def test_sweep_over_n():
    result = runner.invoke(main, [
        "sweep", "--detector", "CND", "--snr-db", "-5", "--runs", "100",
        "--axis", "N", "--value", "300", "--value", "600", "--pfa", "0.1",
    ])
    assert result.exit_code == 0, result.stderr
    lines = result.stdout.splitlines()
    assert lines[0].startswith("N,eps_fixedk,")
    assert [line.split(",")[0] for line in lines[1:]] == ["300", "600"]


def test_worker_count_does_not_change_output():
    args = ["threshold", "--detector", "CND", "--runs", "300", "--N", "400", "--pfa", "0.1"]
    one = runner.invoke(main, args + ["--workers", "1"])
    two = runner.invoke(main, args + ["--workers", "2"])
    assert one.exit_code == 0 and two.exit_code == 0
    assert one.stdout == two.stdout


def test_invalid_pfa_is_config_error():
    result = runner.invoke(main, ["threshold", "--pfa", "1.5"])
    assert result.exit_code == 2
    assert "Configuration error" in result.stderr


def test_cnd_single_antenna_is_config_error():
    result = runner.invoke(main, ["cdf", "--detector", "CND", "--K", "1"])
    assert result.exit_code == 2


def test_missing_tracy_widom_is_runtime_error(tmp_path):
    config = tmp_path / "bad.yaml"
    config.write_text(
        "experiment: cdf\nK: 2\nN: 100\nn_runs: 10\ntracy_widom: /nonexistent/tw.yaml\n",
        encoding="utf-8",
    )
    result = runner.invoke(main, ["cdf", "--config", str(config)])
    assert result.exit_code == 1
    assert "cdf failed" in result.stderr


def test_tables_needs_cache_dir():
    result = runner.invoke(main, ["tables", "--K", "2"])
    assert result.exit_code == 2


def test_tables_fill_cache(tmp_path):
    cache = tmp_path / "tables"
    result = runner.invoke(main, ["--cache-dir", str(cache), "tables", "--K", "2", "--case", "real"])
    assert result.exit_code == 0, result.stderr
    assert len(result.stdout.splitlines()) == 5
    assert len(list(cache.glob("*.npz"))) >= 4
