import subprocess
import sys

import pytest

from aubalance.cli import run_pipeline
from aubalance.formats import read_manifest, read_records
from aubalance.model import BalancingSolution, ObjectiveConfig, group_records
from aubalance.objective import objective
from aubalance.plan import AugmentationPlan, verify_plan
from aubalance.report import parse_csv
from aubalance.solver import brute_force_solve


@pytest.fixture
def tiny_csv(tmp_path):
    # groups [1,0] x1 and [1,1] x3
    path = tmp_path / "tiny.csv"
    path.write_text("record_id,AU01,AU02\na,1,0\nb,1,1\nc,1,1\nd,1,1\n", encoding="utf-8")
    return path


@pytest.fixture
def medium_csv(tmp_path):
    from aubalance.formats import write_records
    from aubalance.synthetic import table_with_column_sums

    path = tmp_path / "medium.csv"
    write_records(table_with_column_sums([300, 80, 150, 20], 400, seed=1, class_names=("A", "B", "C", "D")), path)
    return path


def test_brute_solver_report_matches_fixture(tiny_csv, tmp_path):
    out = tmp_path / "r.csv"
    assert run_pipeline(["--input", str(tiny_csv), "--solver", "brute", "--lambda", "1",
                         "--report-out", str(out), "--report-format", "csv"]) == 0
    report = parse_csv(out.read_text(encoding="utf-8"))
    oracle = brute_force_solve(group_records(read_records(tiny_csv), ObjectiveConfig(1.0)))
    assert report.metrics["objective"][1] == oracle.objective_value == 1.0


def test_report_to_stdout(tiny_csv, capsys):
    assert run_pipeline(["--input", str(tiny_csv)]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].split() == ["class", "before", "after"]
    assert "imbalance_term" in out


def test_zero_iterations_keeps_distribution(medium_csv, tmp_path):
    out = tmp_path / "r.csv"
    plan = tmp_path / "m.jsonl"
    assert run_pipeline(["--input", str(medium_csv), "--max-iters", "0", "--report-out", str(out),
                         "--report-format", "csv", "--plan-out", str(plan)]) == 0
    report = parse_csv(out.read_text(encoding="utf-8"))
    assert report.after == report.before
    assert report.records_after == report.records_before == 400
    assert len(read_manifest(plan).entries) == 0


def test_budget_below_base_total_exits_3(tiny_csv, capsys):
    assert run_pipeline(["--input", str(tiny_csv), "--budget", "3"]) == 3
    assert "--budget" in capsys.readouterr().err


def test_budget_caps_total(medium_csv, tmp_path):
    out = tmp_path / "r.csv"
    assert run_pipeline(["--input", str(medium_csv), "--budget", "450", "--report-out", str(out),
                         "--report-format", "csv"]) == 0
    assert parse_csv(out.read_text(encoding="utf-8")).records_after <= 450


def test_brute_force_too_large_exits_3(medium_csv, capsys):
    assert run_pipeline(["--input", str(medium_csv), "--solver", "brute"]) == 3
    assert "--solver" in capsys.readouterr().err


def test_format_error_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("record_id,AU01\na,2\n", encoding="utf-8")
    assert run_pipeline(["--input", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "--input" in err and "line 2" in err and "AU01" in err


def test_missing_file_exits_2(tmp_path, capsys):
    assert run_pipeline(["--input", str(tmp_path / "nope.csv")]) == 2
    assert "--input" in capsys.readouterr().err


@pytest.mark.parametrize("flags", [["--max-factor", "1"], ["--lambda", "-1"], ["--solver", "genetic"], ["--seed", "-4"]])
def test_bad_flag_values_exit_2(tiny_csv, flags, capsys):
    with pytest.raises(SystemExit) as exc:
        run_pipeline(["--input", str(tiny_csv), *flags])
    assert exc.value.code == 2
    assert flags[0] in capsys.readouterr().err


def test_unwritable_output_exits_1(tiny_csv, tmp_path, capsys):
    assert run_pipeline(["--input", str(tiny_csv), "--report-out", str(tmp_path / "no" / "dir" / "r.txt")]) == 1
    assert "--report-out" in capsys.readouterr().err


@pytest.mark.parametrize("solver", ["local", "anneal"])
def test_end_to_end_determinism_and_consistency(medium_csv, tmp_path, solver):
    outputs = []
    for run in range(2):
        plan = tmp_path / f"m{run}.jsonl"
        report = tmp_path / f"r{run}.csv"
        assert run_pipeline(["--input", str(medium_csv), "--solver", solver, "--seed", "11", "--plan-out", str(plan),
                             "--report-out", str(report), "--report-format", "csv"]) == 0
        outputs.append((plan.read_bytes(), report.read_bytes()))
    assert outputs[0] == outputs[1]

    # the report's after-column equals totals recomputed from records + manifest
    table = read_records(medium_csv)
    problem = group_records(table)
    report = parse_csv(outputs[0][1].decode())
    manifest = read_manifest(tmp_path / "m0.jsonl")
    counts = problem.base_counts.copy()
    group_of = {rid: tuple(row) for rid, row in table.rows()}
    index = problem.group_index()
    for e in manifest.entries:
        counts[index[group_of[e.record_id]]] += 1
    sol = BalancingSolution(counts, *objective(problem, counts))
    check = verify_plan(AugmentationPlan(manifest.entries, sol, manifest.seed), table, problem)
    assert check.passed, check.lines()
    assert tuple(check.totals.tolist()) == report.after
    assert report.metrics["objective"][1] == sol.objective_value


def test_workers_do_not_change_output(medium_csv, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert run_pipeline(["--input", str(medium_csv), "--report-out", str(a)]) == 0
    assert run_pipeline(["--input", str(medium_csv), "--report-out", str(b), "--workers", "4"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point_help():
    result = subprocess.run([sys.executable, "-m", "aubalance", "--help"], capture_output=True, text=True)
    assert result.returncode == 0
    assert "--budget" in result.stdout and "EXTENSION" in result.stdout
