"""Class totals and the balancing objective.

The objective of a count vector ``n`` is

    sum_c |z_c - mean(z)|  +  lambda * Var(n / n0)

where ``z = sum_r n_r * y_r`` are the per-class totals, the mean runs over
classes and Var is the population variance over groups.

The arithmetic here is the reference that the solver kernels reproduce bit for
bit: the imbalance is accumulated exactly in integers as
``sum_c |K z_c - sum(z)|`` and divided by K once, and the variance uses two
sequential left-to-right passes over the ratios.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DimensionError, DomainError
from .model import BalancingProblem, feasible_box

ClassTotals = np.ndarray


def _as_counts(problem: BalancingProblem, counts) -> np.ndarray:
    arr = np.asarray(counts)
    if arr.shape != (problem.group_count,):
        raise DimensionError(f"counts has shape {arr.shape}, expected ({problem.group_count},)")
    if np.issubdtype(arr.dtype, np.integer):
        return arr.astype(np.int64, copy=False)
    if np.array_equal(arr, np.round(arr)):
        return arr.astype(np.int64)
    return arr.astype(np.float64, copy=False)


def class_totals(problem: BalancingProblem, counts) -> ClassTotals:
    """Per-class record totals ``z``; exact int64 when ``counts`` are integral."""
    n = _as_counts(problem, counts)
    return n @ problem.combinations


def imbalance_term(z) -> float:
    """Sum of absolute deviations of the class totals from their mean."""
    z = np.asarray(z)
    if z.ndim != 1 or z.size < 1:
        raise DimensionError("class totals must be a non-empty vector")
    k = z.size
    if np.issubdtype(z.dtype, np.integer) or np.array_equal(z, np.round(z)):
        values = [int(v) for v in z.tolist()]
        total = sum(values)
        return float(sum(abs(k * v - total) for v in values)) / k
    mean = math.fsum(z.tolist()) / k
    return math.fsum(abs(v - mean) for v in z.tolist())


def ratio_variance(ratios) -> float:
    """Population variance by two sequential passes (the kernels' exact arithmetic)."""
    g = len(ratios)
    acc = 0.0
    for r in ratios:
        acc += r
    mean = acc / g
    acc = 0.0
    for r in ratios:
        d = r - mean
        acc += d * d
    return acc / g


def growth_variance_term(problem: BalancingProblem, counts) -> float:
    """Population variance of ``counts / base_counts``; lambda is not applied."""
    n = _as_counts(problem, counts)
    return ratio_variance([c / b for c, b in zip(n.tolist(), problem.base_counts.tolist())])


def check_feasible(problem: BalancingProblem, counts) -> None:
    n = _as_counts(problem, counts)
    lower, upper = feasible_box(problem)
    bad = np.flatnonzero((n < lower) | (n > upper))
    if bad.size:
        r = int(bad[0])
        raise DomainError(
            f"counts[{r}]={n[r]} outside feasible range [{lower[r]}, {upper[r]}]"
            + (f" ({bad.size} groups violate the box)" if bad.size > 1 else "")
        )


def objective(problem: BalancingProblem, counts) -> tuple[float, float, float]:
    """Return ``(objective_value, imbalance_term, variance_term)`` for feasible counts."""
    check_feasible(problem, counts)
    imbalance = imbalance_term(class_totals(problem, counts))
    variance = growth_variance_term(problem, counts)
    return imbalance + problem.config.lambda_weight * variance, imbalance, variance
