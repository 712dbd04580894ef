"""End-to-end checks of the command-line front end.

Every test drives ``wavebound.cli.main`` in process and inspects the JSON
summary, the exit status, and any CSV artifacts.  Exit semantics under
test: 0 success, 1 validation/usage error, 2 property violation.
"""

import csv
import json
import math
import types

import numpy as np
import pytest

import wavebound as wb
from wavebound import cli


@pytest.fixture(autouse=True)
def _run_in_tmp(tmp_path, monkeypatch):
    # bound/energy write CSVs to the working directory by default.
    monkeypatch.chdir(tmp_path)


def run_cli(capsys, *argv):
    status = cli.main(list(argv))
    captured = capsys.readouterr()
    summary = json.loads(captured.out) if captured.out.strip() else None
    return status, summary, captured.err


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


# ---------------------------------------------------------------- solve


def test_solve_summary_reports_grid_and_cfl(capsys):
    status, summary, _ = run_cli(capsys, "solve", "--imax", "20",
                              "--tmax", "0.5")
    assert status == 0
    assert summary["command"] == "solve"
    res = summary["results"]
    assert res["cfl"] is True
    assert res["i_max"] == 20
    assert res["dx"] == pytest.approx(0.05)
    assert 0.0 < res["a"] < 1.0
    assert res["final_norm_dx"] > 0.0
    assert res["final_max_abs"] > 0.0
    # the resolved dt is echoed back into the config block
    assert summary["config"]["dt"] == res["dt"]


def test_solve_energy_drift_is_tiny(capsys):
    status, summary, _ = run_cli(capsys, "solve", "--imax", "25",
                              "--tmax", "1.0")
    assert status == 0
    energy = summary["results"]["energy"]
    assert energy["first"] > 0.0
    assert energy["max_rel_drift"] <= 1e-10


def test_solve_no_energy_flag_omits_block(capsys):
    status, summary, _ = run_cli(capsys, "solve", "--imax", "10",
                              "--tmax", "0.25", "--no-energy")
    assert status == 0
    assert "energy" not in summary["results"]


def test_solve_field_csv_covers_every_node(capsys, tmp_path):
    path = tmp_path / "field.csv"
    status, summary, _ = run_cli(capsys, "solve", "--imax", "8",
                              "--tmax", "0.3", "--field-csv", str(path))
    assert status == 0
    header, rows = read_csv(path)
    assert header == ["i", "k", "value"]
    k_max = summary["results"]["k_max"]
    assert len(rows) == 9 * (k_max + 1)
    # boundary rows are written as exact zeros
    for i, k, value in rows:
        if i in ("0", "8"):
            assert float(value) == 0.0


def test_solve_oracle_mode_runs_on_small_grids(capsys):
    status, summary, _ = run_cli(capsys, "solve", "--imax", "8",
                              "--tmax", "0.25", "--mode", "oracle",
                              "--oracle", "rational")
    assert status == 0
    assert summary["results"]["final_max_abs"] > 0.0


def test_solve_table_case_uses_supplied_samples(capsys, tmp_path):
    table = tmp_path / "p0.json"
    table.write_text(json.dumps([0.0, 0.25, 1.0, 0.25, 0.0]))
    status, summary, _ = run_cli(capsys, "solve", "--case", "table",
                              "--imax", "4", "--tmax", "1.0",
                              "--p0-table", str(table))
    assert status == 0
    assert summary["results"]["final_max_abs"] > 0.0


def test_solve_table_without_samples_is_a_usage_error(capsys):
    status, _, err = run_cli(capsys, "solve", "--case", "table", "--imax", "4",
                        "--tmax", "1.0")
    assert status == 1
    assert "p0_table" in err


# ------------------------------------------------------------- converge


def test_converge_measured_order_is_near_two(capsys, tmp_path):
    path = tmp_path / "sweep.csv"
    status, summary, _ = run_cli(
        capsys, "converge", "--dx", "0.04", "--dx", "0.02", "--dx", "0.01",
        "--tmax", "1.0", "--csv", str(path))
    assert status == 0
    assert 1.5 <= summary["results"]["order"] <= 2.5
    header, rows = read_csv(path)
    assert header == ["dx", "dt", "max_k_norm_e"]
    assert len(rows) == 3
    # CSV cells round-trip and agree with the JSON points exactly
    for row, point in zip(rows, summary["results"]["points"]):
        assert float(row[0]) == point["dx"]
        assert float(row[2]) == point["max_k_norm_e"]


def test_converge_self_test_fits_exactly_two(capsys):
    status, summary, _ = run_cli(capsys, "converge", "--self-test")
    assert status == 0
    assert summary["results"]["order"] == pytest.approx(2.0, abs=1e-9)


def test_converge_needs_three_resolutions(capsys):
    status, _, err = run_cli(capsys, "converge", "--dx", "0.05", "--dx", "0.025")
    assert status == 1
    assert "3 resolutions" in err


# ------------------------------------------------------------- roundoff


def test_roundoff_small_bump_passes_every_check(capsys, tmp_path):
    path = tmp_path / "deltas.csv"
    status, summary, _ = run_cli(
        capsys, "roundoff", "--imax", "10", "--kmax", "15",
        "--oracle", "rational", "--csv", str(path))
    assert status == 0
    res = summary["results"]
    assert res["delta_bound_ok"] is True
    assert res["a_gap_ok"] is True
    assert res["global_bound_ok"] is True
    # 150 nodes is below the reconstruction threshold, so it ran
    assert res["reconstruction_exact"] is True
    assert res["oracle_mode"] == "oracle-rational"
    assert 0.0 < res["max_abs_delta"] <= res["delta_bound"]
    header, rows = read_csv(path)
    assert header == ["k", "max_abs_delta", "max_abs_Delta", "roundoff_bound"]
    assert len(rows) == 16
    assert [r[0] for r in rows] == [str(k) for k in range(16)]


def test_roundoff_zero_case_has_no_roundoff(capsys):
    status, summary, _ = run_cli(capsys, "roundoff", "--case", "zero",
                              "--imax", "6", "--kmax", "8")
    assert status == 0
    res = summary["results"]
    assert res["max_abs_delta"] == 0.0
    assert res["max_abs_Delta"] == 0.0
    assert res["reconstruction_exact"] is True


def test_roundoff_rational_node_guard_requires_force(capsys):
    status, _, err = run_cli(capsys, "roundoff", "--imax", "300", "--kmax", "200",
                        "--oracle", "rational")
    assert status == 1
    assert "--force" in err


def test_roundoff_exits_two_when_a_bound_is_violated(capsys, monkeypatch):
    # An honest run never trips the global bound, so shrink it to zero and
    # check the violation surfaces as exit status 2.
    monkeypatch.setattr(cli, "roundoff_bound", lambda k: 0.0)
    status, summary, _ = run_cli(capsys, "roundoff", "--imax", "10",
                              "--kmax", "12", "--oracle", "rational")
    assert status == 2
    res = summary["results"]
    assert res["global_bound_ok"] is False
    assert res["max_abs_Delta"] > 0.0


def test_roundoff_csv_round_trips_binary64(capsys, tmp_path):
    path = tmp_path / "deltas.csv"
    status, summary, _ = run_cli(
        capsys, "roundoff", "--imax", "9", "--kmax", "11",
        "--oracle", "rational", "--csv", str(path))
    assert status == 0
    _, rows = read_csv(path)
    csv_max = max(float(r[2]) for r in rows)
    assert csv_max == summary["results"]["max_abs_Delta"]
    bounds = [float(r[3]) for r in rows]
    assert bounds == [wb.roundoff_bound(k) for k in range(12)]


# ---------------------------------------------------------------- bound


def test_bound_writes_surface_and_line(capsys, tmp_path):
    surface_csv = tmp_path / "surface.csv"
    line_csv = tmp_path / "line.csv"
    status, summary, _ = run_cli(
        capsys, "bound", "--tmax", "1.0",
        "--dx-min", "0.02", "--dx-max", "0.1",
        "--dt-min", "0.005", "--dt-max", "0.5",
        "--points", "4", "--line-points", "3",
        "--surface-csv", str(surface_csv), "--line-csv", str(line_csv))
    assert status == 0
    res = summary["results"]

    consts = wb.bound_constants(wb.bump_case(), 0.1, 1.0)
    assert res["constants"]["mu"] == consts.mu
    assert res["constants"]["C_prime"] == consts.C_prime
    assert res["constants"]["C_Delta"] == consts.C_Delta

    header, rows = read_csv(surface_csv)
    assert header == ["dx", "dt", "bound", "cfl_ok", "valid"]
    assert len(rows) == 16
    flags = {r[4] for r in rows}
    assert flags == {"true", "false"}  # dt up to 0.5 breaks CFL somewhere
    assert res["surface"]["points"] == 16
    assert res["surface"]["valid_points"] == sum(
        1 for r in rows if r[4] == "true")
    assert res["surface"]["min_valid_bound"] > 0.0

    header, rows = read_csv(line_csv)
    assert header == ["dx", "bound", "effective_error"]
    assert len(rows) == 3
    assert res["line"]["effective_below_bound"] is True
    for _, bound, eff in rows:
        assert float(eff) < float(bound)


def test_bound_minimum_matches_library_evaluation(capsys, tmp_path):
    status, summary, _ = run_cli(
        capsys, "bound", "--tmax", "1.0",
        "--dx-min", "0.02", "--dx-max", "0.1",
        "--dt-min", "0.01", "--dt-max", "0.05",
        "--points", "2", "--no-line",
        "--surface-csv", str(tmp_path / "s.csv"))
    assert status == 0
    minimum = summary["results"]["cfl_line_minimum"]
    consts = wb.bound_constants(wb.bump_case(), 0.1, 1.0)
    expected = wb.cfl_line_minimum(consts, wb.PhysicsParams(c=1.0, xi=0.1))
    assert minimum["dx_star"] == expected.dx_star
    assert minimum["value"] == expected.value
    assert "line" not in summary["results"]


def test_bound_rejects_a_different_speed(capsys):
    status, _, err = run_cli(capsys, "bound", "--c", "2.0", "--tmax", "1.0",
                        "--no-line")
    assert status == 1
    assert "speed" in err


# --------------------------------------------------------------- energy


def test_energy_report_passes_on_bump(capsys, tmp_path):
    path = tmp_path / "series.csv"
    status, summary, _ = run_cli(capsys, "energy", "--imax", "30",
                              "--tmax", "1.0", "--csv", str(path))
    assert status == 0
    res = summary["results"]
    assert res["all_ok"] is True
    assert res["nonneg_ok"] is True
    assert res["under_ok"] is True
    assert res["over_ok"] is True
    assert res["failures"] == []
    assert res["energy"]["max_rel_drift"] <= 1e-10
    header, rows = read_csv(path)
    assert header == ["k", "energy"]
    assert len(rows) > 1  # one energy value per half step
    assert [r[0] for r in rows] == [str(k) for k in range(len(rows))]
    assert all(float(r[1]) >= 0.0 for r in rows)


def test_energy_exits_two_on_violation(capsys, monkeypatch):
    # Honest runs never violate the inequalities; fake a failing report to
    # exercise the exit path.
    fake = types.SimpleNamespace(
        series=types.SimpleNamespace(values=np.array([1.0, 1.0, 1.0])),
        over_ok=np.array([True, True, True]),
        under_ok=np.array([True, False, True]),
        nonneg_ok=np.array([True, True, True]),
        exact_checks=False,
        failures=(("under", 1),),
        all_ok=False,
    )
    monkeypatch.setattr(cli, "energy_bounds_check", lambda *a, **k: fake)
    status, summary, _ = run_cli(capsys, "energy", "--imax", "8",
                              "--tmax", "0.25", "--csv", "fake.csv")
    assert status == 2
    res = summary["results"]
    assert res["all_ok"] is False
    assert res["under_ok"] is False
    assert res["failures"] == [["under", 1]]


# ------------------------------------------------- config, out, determinism


def test_config_file_merges_under_flags(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"imax": 8, "tmax": 0.25}))
    status, summary, _ = run_cli(capsys, "solve", "--config", str(cfg),
                              "--imax", "12")
    assert status == 0
    assert summary["config"]["imax"] == 12      # flag wins
    assert summary["config"]["tmax"] == 0.25    # file beats default
    assert summary["results"]["i_max"] == 12


def test_config_unknown_keys_are_rejected(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"imaxx": 8}))
    status, _, err = run_cli(capsys, "solve", "--config", str(cfg))
    assert status == 1
    assert "unknown config keys" in err


def test_config_must_hold_an_object(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps([1, 2, 3]))
    status, _, err = run_cli(capsys, "solve", "--config", str(cfg))
    assert status == 1


def test_out_writes_summary_file_and_stays_quiet(capsys, tmp_path):
    out = tmp_path / "summary.json"
    status = cli.main(["solve", "--imax", "8", "--tmax", "0.25",
                       "--out", str(out)])
    assert status == 0
    assert capsys.readouterr().out == ""
    summary = json.loads(out.read_text())
    assert summary["command"] == "solve"
    assert summary["results"]["cfl"] is True


def test_csv_artifacts_are_deterministic(capsys, tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        status, _, _ = run_cli(capsys, "roundoff", "--imax", "8", "--kmax", "10",
                            "--oracle", "rational", "--csv", str(path))
        assert status == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_summary_json_is_deterministic(capsys):
    _, first, _ = run_cli(capsys, "solve", "--imax", "10", "--tmax", "0.5")
    _, second, _ = run_cli(capsys, "solve", "--imax", "10", "--tmax", "0.5")
    assert first == second


# ------------------------------------------------------------ usage errors


def test_unknown_flag_exits_one(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["solve", "--bogus"])
    assert exc.value.code == 1
    assert "error" in capsys.readouterr().err


def test_bad_choice_exits_one(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["solve", "--mode", "float32"])
    assert exc.value.code == 1
    assert "invalid choice" in capsys.readouterr().err


def test_missing_subcommand_exits_one(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 1
    assert "required" in capsys.readouterr().err
