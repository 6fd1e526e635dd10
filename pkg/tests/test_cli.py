import csv
import io
import json
import subprocess
import sys

import pytest

from hill_krein import cli, kreinindex as ki

TWO_KAPPA = ["--kappa", "1", "--gamma", "2", "--branch", "one", "--profile", "cnoidal", "--space", "full", "--k", "0.5", "--L", "6.283185307"]


def _run(capsys, argv):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_unstable(capsys):
    code, out, err = _run(capsys, ["classify", *TWO_KAPPA])
    assert code == 0 and err == ""
    assert "verdict  unstable" in out and "K_Ham=3" in out


def test_classify_json_schema_and_round_trip(capsys):
    code, out, _ = _run(capsys, ["classify", *TWO_KAPPA, "--format", "json"])
    d = json.loads(out)
    assert code == 0
    for key in ("case", "wave", "space", "spectra", "V", "K_Ham", "verdict", "paper_expected", "jl"):
        assert key in d
    assert d["schema"] == "hill-krein/1"
    assert set(d["case"]) == {"kappa", "gamma", "branch", "B"}
    assert set(d["wave"]) == {"k", "L", "omega", "profile", "N"}
    assert set(d["V"]) == {"matrix", "n_neg"} and set(d["jl"]) == {"max_real", "verdict"}
    assert all(set(s) == {"beta", "n", "z", "kernel"} for s in d["spectra"])
    assert d["K_Ham"] == 3 and d["verdict"] == "unstable"
    assert ki.StabilityReport.from_dict(d).to_dict() == d


def test_classify_inadmissible(capsys):
    code, out, err = _run(capsys, ["classify", "--branch", "bplus", "--gamma", "1", "--kappa", "1"])
    assert code == 1 and out == ""
    assert "bplus requires gamma > 2*kappa" in err


def test_odd_cnoidal_rejected(capsys):
    code, _, err = _run(capsys, ["classify", "--space", "odd"])
    assert code == 1 and "snoidal" in err


def test_inconclusive_exit_code(capsys):
    code, out, _ = _run(capsys, ["classify", "--gamma", "1", "--no-jl", "--format", "csv"])
    assert code == 2
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["verdict"] == "inconclusive" and row["K_Ham"] == "4"


def test_open_case_exit_code(capsys):
    code, out, _ = _run(capsys, ["classify", "--branch", "minus_one", "--gamma", "0.5", "--profile", "snoidal", "--no-jl", "--format", "json"])
    assert code == 2 and json.loads(out)["paper_expected"] == "paper_open"


def test_omega_input(capsys):
    code, out, _ = _run(capsys, ["classify", "--profile", "snoidal", "--omega", "2.0", "--no-jl", "--format", "json"])
    d = json.loads(out)
    assert code == 0
    assert d["wave"]["omega"] == pytest.approx(2.0, rel=1e-9)


def test_sweep_order_and_jobs(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv("HILL_KREIN_JOBS", "2")
    target = tmp_path / "sweep.csv"
    argv = ["sweep", "--profile", "snoidal", "--gamma", "0,1,3", "--k", "0.4:0.6:2", "--no-jl", "--format", "csv", "--out", str(target)]
    code, out, err = _run(capsys, argv)
    assert code == 0 and out == "" and err == ""
    rows = list(csv.DictReader(target.open()))
    assert [(float(r["gamma"]), float(r["k"])) for r in rows] == [(g, k) for g in (0, 1, 3) for k in (0.4, 0.6)]
    assert [r["verdict"] for r in rows] == ["stable"] * 2 + ["unstable"] * 2 + ["stable"] * 2
    assert list(rows[0]) == list(cli.REPORT_COLUMNS)


def test_bad_jobs(capsys):
    code, _, err = _run(capsys, ["sweep", "--gamma", "0", "--jobs", "zero"])
    assert code == 1 and "jobs" in err


def test_float_list():
    assert cli._float_list("0.3,0.5") == [0.3, 0.5]
    assert cli._float_list("0:1:3") == [0.0, 0.5, 1.0]


def test_table_csv(capsys):
    code, out, _ = _run(capsys, ["table", "--format", "csv", "--k", "0.3,0.5,0.8", "--include-open", "--jobs", "2"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ",".join(cli.TABLE_COLUMNS)
    rows = list(csv.DictReader(io.StringIO(out)))
    status = [r["status"] for r in rows]
    assert status.count("PASS") == len(ki.EXPECTED_CELLS) and "FAIL" not in status
    assert status.count("OPEN") == len(ki.OPEN_CELLS)
    assert all(r["verdict"] != "varies" for r in rows)
    assert {r["paper_verdict"] for r in rows if r["status"] == "OPEN"} == {"paper_open"}


def test_selftest_quick(capsys):
    code, out, _ = _run(capsys, ["selftest", "--quick"])
    assert code == 0
    assert out.count("PASS") == 3


@pytest.mark.slow
def test_selftest_sabotaged_tau_z(capsys):
    code, out, _ = _run(capsys, ["selftest", "--tau-z", "0.1"])
    assert code != 0
    assert "criterion  4 FAIL" in out


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hill_krein.cli", "classify", "--branch", "bplus", "--gamma", "1"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 1 and proc.stdout == ""
    assert "bplus requires gamma > 2*kappa" in proc.stderr
