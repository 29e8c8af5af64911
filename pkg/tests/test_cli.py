import json

import pandas as pd
import pytest

from coopic.cli import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, RunConfig, main


def test_ld_capacity_report(tmp_path):
    out = tmp_path / "report.json"
    assert main(["ld-capacity", "4", "2", "2", "4", "1", "--out", str(out), "--verbose", "False"]) == EXIT_OK
    document = json.loads(out.read_text())
    assert document["capacity"] == 6
    assert document["achievable"] == 6
    assert document["regime"] == "I"
    assert document["bounds"]["u4"] == 8


def test_ld_verify_small_grid(tmp_path):
    out = tmp_path / "grid.csv"
    assert main(["ld-verify", "--grid", "0..1", "--all_rows", "True", "--out", str(out), "--verbose", "False"]) == EXIT_OK
    df = pd.read_csv(out)
    assert len(df) == 32
    assert df["match"].all()


@pytest.mark.parametrize("grid", ["x..y", "3..1", "9"])
def test_ld_verify_bad_grid(grid):
    assert main(["ld-verify", "--grid", grid, "--verbose", "False"]) == EXIT_USAGE


def test_ld_sim(tmp_path):
    out, trace = tmp_path / "sim.csv", tmp_path / "trace.json"
    code = main(["ld-sim", "--example", "1", "--T", "16", "--seeds", "3", "--out", str(out), "--trace", str(trace), "--verbose", "False"])
    assert code == EXIT_OK
    df = pd.read_csv(out)
    assert len(df) == 3
    assert (df["errors"] == 0).all()
    assert json.loads(trace.read_text())["T"] == 16


def test_ld_sim_rejects_even_field_for_example3():
    assert main(["ld-sim", "--example", "3", "--p", "2", "--seeds", "1", "--verbose", "False"]) == EXIT_USAGE


def test_gauss_report_zero_channel(tmp_path):
    out = tmp_path / "zero.json"
    assert main(["gauss-report", "--magnitudes", "0", "0", "0", "0", "0", "--out", str(out), "--verbose", "False"]) == EXIT_OK
    document = json.loads(out.read_text())
    assert document["upper"] == 0.0
    assert document["bounds"]["u1"] == 0.0
    assert document["bounds"]["u4"] == 0.0


def test_gauss_report_symmetric_point(tmp_path):
    out = tmp_path / "sym.json"
    assert main(["gauss-report", "--symmetric", "100", "10", "--out", str(out), "--verbose", "False"]) == EXIT_OK
    document = json.loads(out.read_text())
    assert document["symmetric"]["C"] > 0
    assert "gap_to_C" in document["symmetric"]


def test_gauss_gap_count_zero():
    assert main(["gauss-gap", "--count", "0", "--verbose", "False"]) == EXIT_USAGE


def test_gauss_gap_is_deterministic(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (first, second):
        assert main(["gauss-gap", "--count", "3", "--seed", "1", "--out", str(out), "--verbose", "False"]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    assert len(pd.read_csv(first)) == 3


def test_feedback_ld_capacity(capsys):
    assert main(["feedback", "--ld", "2", "1", "--json", "True"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["capacity"] == 3


def test_fig2_table(tmp_path):
    out = tmp_path / "fig2.csv"
    assert main(["fig2", "--alpha_step", "0.25", "--out", str(out), "--verbose", "False"]) == EXIT_OK
    df = pd.read_csv(out)
    assert list(df.columns) == ["alpha", "normalized_C", "analytic_limit"]
    assert len(df) == 9


def test_fig2_tolerance_window(capsys):
    assert main(["fig2", "--alpha_step", "0.25", "--json", "True"]) == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["tolerance"] == 0.05
    assert summary["window_deviation"] <= 0.05
    assert summary["excluded_alphas"] == [0.0, 0.25, 1.75, 2.0]
    assert summary["max_deviation"] > 0.05


def test_fig2_reports_deviation_at_small_alpha(capsys):
    # at alpha = 0 the curve is 0.1 below its limit
    assert main(["fig2", "--alpha_step", "0.25", "--tol_alpha_min", "0", "--json", "True"]) == EXIT_VIOLATION
    summary = json.loads(capsys.readouterr().out)
    assert summary["window_deviation"] > 0.05
    assert summary["excluded_alphas"] == [1.75, 2.0]


def test_fig2_empty_window():
    assert main(["fig2", "--tol_alpha_min", "1.5", "--tol_alpha_max", "0.5"]) == EXIT_USAGE


def test_reversibility_small(tmp_path):
    out = tmp_path / "rev.csv"
    assert main(["reversibility", "--grid", "0..2", "--random", "20", "--out", str(out), "--verbose", "False"]) == EXIT_OK
    assert pd.read_csv(out)["primed_equal"].dtype == bool


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig("gauss-gap", db_min=10, db_max=0)
    with pytest.raises(ValueError):
        RunConfig("ld-verify", grid=range(0))
    with pytest.raises(ValueError):
        RunConfig("gauss-gap", jobs=-1)
