import csv
import io
import json
import subprocess
import sys

import pytest

from upolar.bounds import bound_table
from upolar.cli import TABLE_FIELDS, TRACK_FIELDS, main
from upolar.construction import build_rate_half, parse_plan


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_tables_csv_round_trips(capsys):
    code, out = run(capsys, "tables", "--capacity", "0.5", "--n", "40")
    assert code == 0
    rows = rows_of(out)
    assert tuple(rows[0]) == TABLE_FIELDS
    ref = bound_table(0.5, 40)
    assert len(rows) == 41
    for row, r in zip(rows, ref):
        assert (int(row["n"]), float(row["lower"]), float(row["upper"])) == (r.n, r.lowerI, r.upperI)


def test_tables_row_filter_and_file(tmp_path, capsys):
    path = tmp_path / "t.csv"
    code, out = run(capsys, "tables", "--capacity", "0.8", "--n", "20", "--rows", "1,5,20", "-o", str(path))
    assert code == 0 and out == ""
    assert [int(r["n"]) for r in rows_of(path.read_text())] == [1, 5, 20]


def test_build_writes_reference_layout(capsys):
    code, out = run(capsys, "build", "--n", "3", "--K", "4")
    assert code == 0
    plan, spec = parse_plan(out)
    assert plan == build_rate_half(3, 4) and spec is None
    assert "labels L1.1 L2.1 L3.1" in out


def test_build_with_fast_stage(tmp_path, capsys):
    path = tmp_path / "p.utp"
    assert run(capsys, "build", "--n", "2", "--K", "4", "--m", "3", "-o", str(path))[0] == 0
    plan, spec = parse_plan(path.read_text())
    assert spec.M == 8 and spec.plan == plan


def test_track_csv(tmp_path, capsys):
    code, out = run(capsys, "track", "--n", "2", "--K", "4", "--channel", "bec:0.5", "--budget", "0")
    assert code == 0
    rows = rows_of(out)
    assert tuple(rows[0]) == TRACK_FIELDS and len(rows) == 8
    good = [r for r in rows if r["good"] == "1"]
    assert all(r["label"] == "R2.1" for r in good)
    for r in good:
        assert float(r["capacity"]) == pytest.approx(bound_table(0.5, 2)[2].upperI, abs=1e-12)
    total = sum(float(r["capacity"]) for r in rows)
    assert total == pytest.approx(4.0, abs=1e-12)


def test_track_reads_plan_file(tmp_path, capsys):
    path = tmp_path / "p.utp"
    run(capsys, "build", "--n", "2", "--K", "4", "-o", str(path))
    _, a = run(capsys, "track", "--plan", str(path), "--channel", "bsc:0.11")
    _, b = run(capsys, "track", "--n", "2", "--K", "4", "--channel", "bsc:0.11")
    assert a == b


@pytest.mark.parametrize("suite", ["universality", "less_noisy", "bounds", "general_rate"])
def test_verify_suites_pass(suite, capsys):
    code, out = run(capsys, "verify", "--suite", suite, "--pairs", "5", "--levels", "5", "--bound-levels", "5")
    report = json.loads(out)
    assert code == 0 and report["pass"] and report["suite"] == suite
    for rec in report["records"]:
        assert set(rec) == {"assertion", "values", "pass"}


def test_verify_all_writes_file(tmp_path, capsys):
    path = tmp_path / "v.json"
    code, _ = run(capsys, "verify", "--pairs", "3", "--levels", "4", "--bound-levels", "4", "-o", str(path))
    report = json.loads(path.read_text())
    assert code == 0 and report["pass"]
    assert [r["suite"] for r in report["reports"]] == ["universality", "less_noisy", "bounds", "general_rate"]


def test_verify_exits_nonzero_on_failure(monkeypatch, capsys):
    from upolar import analysis
    monkeypatch.setattr(analysis, "verify_universality",
                        lambda *a, **k: analysis.make_report("universality", [analysis.make_record("x", {}, False)]))
    code, out = run(capsys, "verify", "--suite", "universality")
    assert code == 1 and json.loads(out)["pass"] is False


def test_simulate_stdout_and_config(tmp_path, capsys):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("n = 3\nK = 4\nm = 3\nchannel = bsc:0.1\ntrials = 100\nseed = 5\n")
    code, out = run(capsys, "simulate", "--config", str(cfg))
    first = json.loads(out)
    assert code == 0 and first["trials"] == 100 and "wall_time" not in first
    _, out = run(capsys, "simulate", "--config", str(cfg), "--trials", "50", "--wall-time")
    second = json.loads(out)
    assert second["trials"] == 50 and second["wall_time"] > 0


def test_simulate_file_output_is_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["simulate", "--n", "3", "--K", "4", "--m", "2", "--channel", "bec:0.3", "--trials", "64"]
    run(capsys, *args, "-o", str(a))
    run(capsys, *args, "--workers", "2", "-o", str(b))
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("argv", [
    ["simulate", "--channel", "awgn:1", "--trials", "5"],
    ["simulate", "--n", "3", "--K", "4", "--delta", "2", "--trials", "5"],
    ["track", "--channel", "bsc:0.9"],
    ["build", "--b", "4", "--g", "2", "--m", "2"],
    ["track", "--plan", "/nonexistent/plan.utp"],
])
def test_errors_exit_with_status_two(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
    assert "upolar: error:" in capsys.readouterr().err


def test_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_console_module_entry():
    proc = subprocess.run([sys.executable, "-m", "upolar.cli", "tables", "--n", "2"], capture_output=True, text=True,
                          check=True)
    assert proc.stdout.splitlines()[0] == "n,lower,upper"
