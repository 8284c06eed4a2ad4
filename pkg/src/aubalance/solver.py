"""Integer solvers for the balancing objective over the feasible box.

``brute_force_solve`` enumerates the whole box and is the correctness oracle
for small instances. ``local_search_solve`` is a restarted coordinate pattern
search and ``annealing_solve`` a restarted Metropolis chain finished by one
pattern-search descent; both run their inner loops in ``aubalance.kernels``.
"""
from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InfeasibleError, SearchSpaceTooLarge
from .model import BalancingProblem, BalancingSolution, feasible_box
from .objective import objective

__all__ = [
    "SolverSettings",
    "feasible_box",
    "default_step_schedule",
    "derive_seed",
    "brute_force_solve",
    "local_search_solve",
    "annealing_solve",
    "solve",
]

MODES = ("local_search", "annealing", "brute_force")
BRUTE_FORCE_LIMIT = 10**7
_CHUNK = 1 << 17


def derive_seed(seed: int, *labels) -> int:
    """64-bit sub-seed from a root seed and a label path (stable across runs and platforms)."""
    h = hashlib.blake2b(digest_size=8)
    h.update(int(seed).to_bytes(8, "little", signed=False))
    for label in labels:
        h.update(b"/" + str(label).encode())
    return int.from_bytes(h.digest(), "little")


def default_step_schedule(problem: BalancingProblem) -> tuple[int, ...]:
    """Powers of two from the largest one not exceeding the widest group slack, down to 1."""
    lower, upper = feasible_box(problem)
    slack = int((upper - lower).max())
    top = max(slack, 1).bit_length() - 1
    return tuple(1 << p for p in range(top, -1, -1))


@dataclass(frozen=True)
class SolverSettings:
    seed: int = 0
    restarts: int = 8
    max_iterations: int = 10_000
    step_schedule: tuple[int, ...] | None = None
    mode: str = "local_search"
    budget: int | None = None  # cap on sum(counts); extension, off by default
    polish_iterations: int = 10_000
    initial_temperature: float | None = None
    workers: int = 1
    backend: str | None = None

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.restarts < 1:
            raise ValueError("restarts must be positive")
        if self.max_iterations < 0 or self.polish_iterations < 0:
            raise ValueError("iteration budgets must be non-negative")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.step_schedule is not None:
            steps = tuple(int(s) for s in self.step_schedule)
            if not steps or steps[-1] != 1 or any(a <= b for a, b in zip(steps, steps[1:])) or steps[-1] < 1:
                raise ValueError("step_schedule must be strictly decreasing positive integers ending at 1")
            object.__setattr__(self, "step_schedule", steps)
        if self.workers < 1:
            raise ValueError("workers must be positive")

    def steps_for(self, problem: BalancingProblem) -> np.ndarray:
        steps = self.step_schedule or default_step_schedule(problem)
        return np.array(steps, dtype=np.int64)


def _check_budget(problem: BalancingProblem, budget: int | None) -> int:
    if budget is None:
        return -1
    base_total = int(problem.base_counts.sum())
    if budget < base_total:
        raise InfeasibleError(f"budget {budget} is below the base record total {base_total}")
    return int(budget)


def _solution(problem, counts, solver, restart=None, evaluations=0) -> BalancingSolution:
    value, imbalance, variance = objective(problem, counts)
    return BalancingSolution(np.asarray(counts, dtype=np.int64), value, imbalance, variance, solver, restart, evaluations)


def _random_start(problem, lower, upper, budget, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    point = rng.integers(lower, upper, endpoint=True)
    if budget >= 0 and point.sum() > budget:
        # shrink the excess proportionally back into the budget
        extra = point - lower
        room = budget - int(lower.sum())
        point = lower + (extra * room) // int(extra.sum())
    return point.astype(np.int64)


def _best(candidates):
    """Lowest objective, then lexicographically smallest counts, then lowest restart index."""
    return min(candidates, key=lambda c: (c[0], tuple(c[1].tolist()), c[2]))


def _run_restarts(problem, settings, label, run_one):
    budget = _check_budget(problem, settings.budget)
    lower, upper = feasible_box(problem)
    # random starts need evaluations to be worth anything; a zero budget keeps only restart 0
    n = settings.restarts if settings.max_iterations > 0 else 1
    starts = [lower.copy()] + [
        _random_start(problem, lower, upper, budget, derive_seed(settings.seed, label, "start", r)) for r in range(1, n)
    ]
    jobs = [(r, starts[r]) for r in range(n)]
    if settings.workers > 1 and n > 1:
        with ThreadPoolExecutor(settings.workers) as pool:
            results = list(pool.map(lambda job: run_one(job[0], job[1], lower, upper, budget), jobs))
    else:
        results = [run_one(r, s, lower, upper, budget) for r, s in jobs]
    f, counts, restart, evals = _best([(f, c, r, e) for r, (f, c, e) in zip(range(n), results)])
    return _solution(problem, counts, label, restart, sum(e for _, _, e in results))


def local_search_solve(problem: BalancingProblem, settings: SolverSettings | None = None, *, trace=None) -> BalancingSolution:
    """Restarted coordinate pattern search.

    Each restart starts at the lower bound (restart 0) or a seeded uniform point
    in the box, sweeps the coordinates trying ``+-step`` clamped to the box and
    keeps the best strict improvement per coordinate. A sweep without any
    accepted move advances to the next (smaller) step; the restart ends after a
    fruitless sweep at step 1 or after ``max_iterations`` evaluations.

    If ``trace`` is a list, it receives one array per restart holding the
    best-so-far objective after every evaluation.
    """
    settings = settings or SolverSettings()
    kern = kernels.get_backend(settings.backend)
    steps = settings.steps_for(problem)
    traces = {}

    def run_one(r, start, lower, upper, budget):
        counts = start.copy()
        buf = np.empty(settings.max_iterations if trace is not None else 0, dtype=np.float64)
        evals, f = kern.descend(
            problem.combinations, problem.base_counts, lower, upper, counts, steps,
            settings.max_iterations, problem.config.lambda_weight, budget, buf,
        )
        if trace is not None:
            traces[r] = buf[:evals].copy()
        return f, counts, evals

    solution = _run_restarts(problem, settings, "local_search", run_one)
    if trace is not None:
        trace.extend(traces[r] for r in sorted(traces))
    return solution


def _temperatures(t0: float, n: int) -> np.ndarray:
    if n == 0:
        return np.empty(0)
    # geometric cooling over four decades
    return t0 * np.power(1e-4, np.arange(n, dtype=np.float64) / max(n - 1, 1))


def annealing_solve(problem: BalancingProblem, settings: SolverSettings | None = None) -> BalancingSolution:
    """Restarted simulated annealing, each chain polished by one pattern-search descent."""
    settings = settings or SolverSettings(mode="annealing")
    kern = kernels.get_backend(settings.backend)
    steps = settings.steps_for(problem)
    lam = problem.config.lambda_weight
    g = problem.group_count
    n = settings.max_iterations

    def run_one(r, start, lower, upper, budget):
        counts = start.copy()
        rng = np.random.default_rng(derive_seed(settings.seed, "annealing", "chain", r))
        coords = rng.integers(0, g, n).astype(np.int64)
        step_idx = rng.integers(0, len(steps), n).astype(np.int64)
        signs = np.where(rng.random(n) < 0.5, -1, 1).astype(np.int64)
        uniforms = rng.random(n)
        t0 = settings.initial_temperature
        if t0 is None:
            f0 = kern.evaluate(problem.combinations, problem.base_counts, counts, lam)
            t0 = max(0.1 * f0, 1.0)
        evals, _ = kern.anneal(
            problem.combinations, problem.base_counts, lower, upper, counts, steps, lam, budget,
            coords, step_idx, signs, uniforms, _temperatures(t0, n),
        )
        polish, f = kern.descend(
            problem.combinations, problem.base_counts, lower, upper, counts, steps,
            settings.polish_iterations, lam, budget, np.empty(0),
        )
        return f, counts, evals + polish

    return _run_restarts(problem, settings, "annealing", run_one)


def brute_force_solve(problem: BalancingProblem, budget: int | None = None, limit: int = BRUTE_FORCE_LIMIT) -> BalancingSolution:
    """Global integer minimum by exhaustive enumeration of the box.

    Points are scanned in lexicographic order; a vectorized pass screens for
    near-optimal points, which are then re-scored with the reference objective.
    Ties go to the lexicographically smallest counts.
    """
    lower, upper = feasible_box(problem)
    dims = tuple(int(d) for d in (upper - lower + 1))
    size = math.prod(dims)
    if size > limit:
        raise SearchSpaceTooLarge(size, limit)
    cap = _check_budget(problem, budget)
    combos = problem.combinations
    base = problem.base_counts.astype(np.float64)
    k = problem.class_count
    lam = problem.config.lambda_weight

    best_approx = math.inf
    shortlist = []
    for start in range(0, size, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, size))
        points = np.stack(np.unravel_index(idx, dims), axis=1).astype(np.int64) + lower
        z = points @ combos
        imbalance = np.abs(k * z - z.sum(axis=1, keepdims=True)).sum(axis=1) / k
        ratios = points / base
        values = imbalance + lam * ratios.var(axis=1)
        if cap >= 0:
            values[points.sum(axis=1) > cap] = np.inf
        chunk_min = values.min()
        if not np.isfinite(chunk_min):
            continue
        best_approx = min(best_approx, chunk_min)
        tol = 1e-9 * max(1.0, abs(best_approx))
        shortlist = [p for p in shortlist if p[0] <= best_approx + tol]
        shortlist.extend((float(values[i]), points[i]) for i in np.flatnonzero(values <= best_approx + tol))
    if not shortlist:
        raise InfeasibleError("no feasible point within the budget")
    exact = [(objective(problem, p)[0], tuple(p.tolist())) for _, p in shortlist]
    _, counts = min(exact)
    return _solution(problem, counts, "brute_force", evaluations=size)


def solve(problem: BalancingProblem, settings: SolverSettings | None = None) -> BalancingSolution:
    settings = settings or SolverSettings()
    if settings.mode == "brute_force":
        return brute_force_solve(problem, settings.budget)
    if settings.mode == "annealing":
        return annealing_solve(problem, settings)
    return local_search_solve(problem, settings)
