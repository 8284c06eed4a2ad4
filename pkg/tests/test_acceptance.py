"""Exit criteria. Each test records one PASS/FAIL line, printed in the terminal summary."""
import time

import numpy as np
import pytest

from aubalance.cli import run_pipeline
from aubalance.formats import write_records
from aubalance.model import group_records
from aubalance.objective import class_totals, imbalance_term, objective
from aubalance.plan import expand_plan, expanded_table
from aubalance.report import format_text, report_from_totals
from aubalance.model import feasible_box
from aubalance.solver import SolverSettings, brute_force_solve, local_search_solve, solve
from aubalance.synthetic import (
    AU_NAMES,
    AUG1_RECORDS,
    AUG1_TOTALS,
    NON_AUG_RECORDS,
    NON_AUG_TOTALS,
    random_problem,
    skewed_au_table,
    table_with_column_sums,
)

RESULTS = []

SUITE_SIZE = 200
LAMBDAS = (0.0, 0.5, 1.0, 10.0)


def record(criterion, passed, detail, status=None):
    RESULTS.append(f"{status or ('PASS' if passed else 'FAIL')}  C{criterion}  {detail}")
    return passed


def oracle_suite():
    rng = np.random.default_rng(20201)
    problems = []
    for i in range(SUITE_SIZE):
        # cycle lambda so every weight is covered equally
        problems.append(random_problem(rng, max_groups=3, max_classes=4, max_slack=20, lambdas=(LAMBDAS[i % 4],)))
    return problems


def feasible(problem, counts):
    lower, upper = feasible_box(problem)
    return bool(((lower <= counts) & (counts <= upper)).all())


def test_c1_oracle_equivalence():
    start = time.perf_counter()
    matched = infeasible = 0
    for i, p in enumerate(oracle_suite()):
        lower, upper = feasible_box(p)
        assert p.group_count <= 3 and p.class_count <= 4 and (upper - lower).max() <= 20
        best = brute_force_solve(p)
        got = local_search_solve(p, SolverSettings(seed=i))
        matched += abs(got.objective_value - best.objective_value) <= 1e-9
        infeasible += not feasible(p, got.counts)
    elapsed = time.perf_counter() - start
    ok = matched >= 0.95 * SUITE_SIZE and infeasible == 0 and elapsed < 30
    record(1, ok, f"oracle equivalence: {matched}/{SUITE_SIZE} optimal (need >= 95%), {infeasible} infeasible, {elapsed:.1f}s (< 30s)")
    assert ok


def test_c2_published_totals_metrics():
    before = imbalance_term(np.array(NON_AUG_TOTALS))
    after = imbalance_term(np.array(AUG1_TOTALS))
    report = report_from_totals(AU_NAMES, NON_AUG_TOTALS, AUG1_TOTALS, NON_AUG_RECORDS, AUG1_RECORDS)
    footer = next(line for line in format_text(report).splitlines() if line.startswith("records")).split()
    ok = (
        abs(before - 125741.0) <= 1e-6
        and abs(after - 80805.0) <= 1e-6
        and after < before
        and report.metrics["imbalance_term"] == (before, after)
        and footer == ["records", "322551", "378041"]
    )
    record(2, ok, f"non-aug -> aug-1 imbalance {before!r} -> {after!r} (expect 125741.0 -> 80805.0), footer {footer[1]} -> {footer[2]}")
    assert ok


def _one_step_improvable(p):
    """Some group with slack holds an under-represented class and one more copy of it lowers the imbalance."""
    lower, upper = feasible_box(p)
    z = class_totals(p, lower)
    base = imbalance_term(z)
    below = z * p.class_count < z.sum()
    for r in range(p.group_count):
        if upper[r] > lower[r] and (p.combinations[r].astype(bool) & below).any():
            counts = lower.copy()
            counts[r] += 1
            if imbalance_term(class_totals(p, counts)) < base:
                return True
    return False


def test_c3_improvement_guarantee():
    rng = np.random.default_rng(33)
    problems = oracle_suite() + [random_problem(rng, max_groups=8, max_classes=6, max_slack=200) for _ in range(200)]
    worse = strict_cases = strict_misses = 0
    for i, p in enumerate(problems):
        s = local_search_solve(p, SolverSettings(seed=i))
        f0 = objective(p, p.base_counts)[0]
        worse += s.objective_value > f0
        imb0 = imbalance_term(class_totals(p, p.base_counts))
        if p.config.lambda_weight == 0 and imb0 > 0 and _one_step_improvable(p):
            strict_cases += 1
            # imbalance moves in quanta of 1/K per count
            strict_misses += not (imb0 - s.imbalance_term >= 1.0 / p.class_count - 1e-9)
    ok = worse == 0 and strict_cases > 0 and strict_misses == 0
    record(3, ok, f"improvement: {worse}/{len(problems)} worse than n0; strict reduction missed {strict_misses}/{strict_cases} lambda=0 cases")
    assert ok


def test_c4_constraint_satisfaction_fuzz():
    rng = np.random.default_rng(44)
    start = time.perf_counter()
    violations = 0
    for i in range(1000):
        p = random_problem(rng, max_groups=int(rng.integers(1, 9)), max_classes=6, max_slack=int(rng.integers(1, 500)))
        mode = ("local_search", "annealing")[i % 2]
        base_total = int(p.base_counts.sum())
        budget = base_total + int(rng.integers(0, 50)) if rng.random() < 0.25 else None
        settings = SolverSettings(
            seed=int(rng.integers(0, 2**63)),
            restarts=int(rng.integers(1, 6)),
            max_iterations=int(rng.integers(0, 1500)),
            mode=mode,
            budget=budget,
        )
        s = solve(p, settings)
        bad = not feasible(p, s.counts) or (budget is not None and s.counts.sum() > budget)
        violations += bad
    elapsed = time.perf_counter() - start
    ok = violations == 0 and elapsed < 60
    record(4, ok, f"constraint fuzz: {violations} violations in 1000 runs, {elapsed:.1f}s (< 60s)")
    assert ok


def test_c5_plan_round_trip():
    rng = np.random.default_rng(55)
    failures = 0
    for i in range(50):
        k = int(rng.integers(1, 6))
        n = int(rng.integers(5, 400))
        sums = rng.integers(0, n + 1, k)
        table = table_with_column_sums(sums, n, seed=i)
        problem = group_records(table)
        sol = local_search_solve(problem, SolverSettings(seed=i, restarts=2))
        plan = expand_plan(table, problem, sol, seed=i)
        regrouped = group_records(expanded_table(table, plan))
        same = np.array_equal(regrouped.combinations, problem.combinations) and regrouped.base_counts.tolist() == sol.counts.tolist()
        per_record = dict.fromkeys(table.record_ids, 0)
        for e in plan.entries:
            per_record[e.record_id] += 1
        spread_ok = True
        for r in range(problem.group_count):
            members = [rid for rid, row in table.rows() if row == problem.combination(r)]
            copies = [per_record[m] for m in members]
            spread_ok &= max(copies) - min(copies) <= 1
        failures += not (same and spread_ok)
    ok = failures == 0
    record(5, ok, f"plan round trip: {50 - failures}/50 instances reproduce counts with per-record spread <= 1")
    assert ok


@pytest.mark.slow
def test_c6_pipeline_determinism(tmp_path):
    csv_path = tmp_path / "skewed_au.csv"
    write_records(skewed_au_table(NON_AUG_RECORDS, seed=6), csv_path)
    outputs, times = [], []
    for run in range(2):
        plan, report = tmp_path / f"manifest{run}.jsonl", tmp_path / f"report{run}.txt"
        start = time.perf_counter()
        code = run_pipeline(["--input", str(csv_path), "--seed", "6", "--plan-out", str(plan), "--report-out", str(report)])
        times.append(time.perf_counter() - start)
        assert code == 0
        outputs.append((plan.read_bytes(), report.read_bytes()))
    identical = outputs[0] == outputs[1]
    ok = identical and max(times) < 60
    record(6, ok, f"pipeline determinism on 322551 records: identical={identical}, slowest run {max(times):.1f}s (< 60s)")
    assert ok


def test_c7_model_results_out_of_scope():
    record(7, True, status="N/A ", detail="downstream F1 scores not reproducible at desk scale (restricted data + model training); covered by C1-C6")
    pytest.skip("downstream F1 results require restricted datasets and a trained model")
