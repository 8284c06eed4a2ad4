"""Expansion of a group-level solution into a per-record augmentation manifest."""
from __future__ import annotations

import functools
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConsistencyError, DomainError
from .model import BalancingProblem, BalancingSolution, RecordTable, group_assignment, group_records
from .objective import check_feasible, class_totals
from .solver import derive_seed

OPS = ("flip", "gaussian_blur", "linear_contrast", "additive_gaussian_noise", "multiply", "perspective_transform")

# by subset size, then lexicographic in OPS order
RECIPE_POOL: tuple[tuple[str, ...], ...] = tuple(
    combo for size in range(1, len(OPS) + 1) for combo in itertools.combinations(OPS, size)
)


@dataclass(frozen=True)
class AugmentationRecipe:
    ops: tuple[str, ...]
    variant_index: int = 0

    def __post_init__(self):
        ops = tuple(self.ops)
        if not ops:
            raise ValueError("a recipe needs at least one op")
        if len(set(ops)) != len(ops):
            raise ValueError(f"duplicate op in recipe {ops}")
        unknown = [op for op in ops if op not in OPS]
        if unknown:
            raise ValueError(f"unknown augmentation ops {unknown}")
        if self.variant_index < 0:
            raise ValueError("variant_index must be non-negative")
        object.__setattr__(self, "ops", ops)


@functools.lru_cache(maxsize=4096)
def _recipe(ops: tuple[str, ...], variant: int) -> AugmentationRecipe:
    return AugmentationRecipe(ops, variant)


class PlanEntry(NamedTuple):
    record_id: str
    copy_index: int
    recipe: AugmentationRecipe


@dataclass(frozen=True)
class AugmentationPlan:
    entries: tuple[PlanEntry, ...]
    solution: BalancingSolution | None
    seed: int

    def __len__(self):
        return len(self.entries)


def _group_label(problem: BalancingProblem, r: int) -> str:
    return "".join(map(str, problem.combination(r)))


def recipe_cycle(problem: BalancingProblem, r: int, seed: int) -> list[tuple[str, ...]]:
    """The recipe pool shuffled once for group ``r``."""
    rng = np.random.default_rng(derive_seed(seed, "plan", _group_label(problem, r)))
    return [RECIPE_POOL[i] for i in rng.permutation(len(RECIPE_POOL))]


def _check_table(table: RecordTable, problem: BalancingProblem) -> np.ndarray:
    regrouped = group_records(table, problem.config)
    if not (
        np.array_equal(regrouped.combinations, problem.combinations)
        and np.array_equal(regrouped.base_counts, problem.base_counts)
    ):
        raise ConsistencyError("record table does not reproduce the problem's groups and base counts")
    return group_assignment(table, problem)


def expand_plan(table: RecordTable, problem: BalancingProblem, solution: BalancingSolution, seed: int = 0) -> AugmentationPlan:
    """Distribute each group's extra copies round-robin over its records.

    Records of a group are visited in ``record_id`` order, so per-record copy
    counts within a group differ by at most one. Copy ``t`` of a group takes
    the ``t``-th recipe of that group's shuffled pool (cycling).
    """
    assignment = _check_table(table, problem)
    try:
        check_feasible(problem, solution.counts)
    except DomainError as exc:
        raise ConsistencyError(f"solution infeasible for problem: {exc}") from None
    ids = np.array(table.record_ids, dtype=object)
    extra = (solution.counts - problem.base_counts).tolist()
    entries = []
    for r in range(problem.group_count):
        if extra[r] == 0:
            continue
        members = sorted(ids[assignment == r].tolist())
        cycle = recipe_cycle(problem, r, seed)
        n = len(members)
        # a record's m-th copy repeats its recipe every `period` copies
        period = len(cycle) // math.gcd(n, len(cycle))
        for t in range(extra[r]):
            m = t // n
            entries.append(PlanEntry(members[t - m * n], m + 1, _recipe(cycle[t % len(cycle)], m // period)))
    entries.sort(key=lambda e: (e.record_id, e.copy_index))
    return AugmentationPlan(tuple(entries), solution, int(seed))


def expanded_table(table: RecordTable, plan: AugmentationPlan) -> RecordTable:
    """Base records plus one pseudo-record per manifest entry (id ``<record_id>#<copy_index>``)."""
    row_of = {rid: i for i, rid in enumerate(table.record_ids)}
    rows = [row_of[e.record_id] for e in plan.entries]
    ids = table.record_ids + tuple(f"{e.record_id}#{e.copy_index}" for e in plan.entries)
    labels = np.concatenate([table.labels, table.labels[rows]]) if rows else table.labels
    return RecordTable(ids, labels, table.class_names)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}" + (f": {self.detail}" if self.detail else "")


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)
    totals: np.ndarray | None = None  # class totals recomputed from records + manifest

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def add(self, name, passed, detail=""):
        self.checks.append(Check(name, bool(passed), detail))

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]


def verify_plan(plan: AugmentationPlan, table: RecordTable, problem: BalancingProblem) -> VerificationReport:
    """Recheck every plan invariant from scratch. Never raises; failures become report lines."""
    report = VerificationReport()
    try:
        _verify(plan, table, problem, report)
    except Exception as exc:  # noqa: BLE001
        report.add("verification", False, f"{type(exc).__name__}: {exc}")
    return report


def _verify(plan, table, problem, report):
    try:
        assignment = _check_table(table, problem)
        report.add("table_matches_problem", True)
    except (ConsistencyError, ValueError) as exc:
        report.add("table_matches_problem", False, str(exc))
        return
    solution = plan.solution
    if solution is None:
        report.add("solution_attached", False, "plan carries no solution")
        return
    try:
        check_feasible(problem, solution.counts)
        report.add("solution_feasible", True)
    except (DomainError, ValueError) as exc:
        report.add("solution_feasible", False, str(exc))

    row_of = {rid: i for i, rid in enumerate(table.record_ids)}
    unknown = [e.record_id for e in plan.entries if e.record_id not in row_of]
    report.add("entries_reference_known_records", not unknown, f"{len(unknown)} unknown, e.g. {unknown[0]!r}" if unknown else "")
    entries = [e for e in plan.entries if e.record_id in row_of]

    pairs = Counter((e.record_id, e.copy_index) for e in plan.entries)
    dupes = [p for p, n in pairs.items() if n > 1]
    report.add("unique_record_copy_pairs", not dupes, f"{len(dupes)} duplicated, e.g. {dupes[0]}" if dupes else "")
    bad_index = [e for e in plan.entries if not (isinstance(e.copy_index, int) and e.copy_index >= 1)]
    report.add("copy_index_positive", not bad_index)
    bad_ops = [e for e in plan.entries if e.recipe.ops not in RECIPE_POOL]
    report.add("recipes_valid", not bad_ops)

    rows = np.array([row_of[e.record_id] for e in entries], dtype=np.int64)
    entry_groups = assignment[rows] if rows.size else np.empty(0, dtype=np.int64)
    per_group = np.bincount(entry_groups, minlength=problem.group_count)
    expected = solution.counts - problem.base_counts
    for r in range(problem.group_count):
        got, want = int(per_group[r]), int(expected[r])
        report.add(f"group_count[{r}]", got == want, f"{_group_label(problem, r)}: {got} entries, expected {want}")

    per_record = np.bincount(rows, minlength=len(table)) if rows.size else np.zeros(len(table), dtype=np.int64)
    uneven = []
    for r in range(problem.group_count):
        copies = per_record[assignment == r]
        if copies.size and copies.max() - copies.min() > 1:
            uneven.append(r)
    report.add("even_spread", not uneven, f"groups {uneven}" if uneven else "")

    totals = table.labels.sum(axis=0, dtype=np.int64)
    if rows.size:
        totals = totals + table.labels[rows].sum(axis=0, dtype=np.int64)
    report.totals = totals
    want_totals = class_totals(problem, solution.counts)
    report.add("class_totals", np.array_equal(totals, want_totals), f"recomputed {totals.tolist()} vs {want_totals.tolist()}")
