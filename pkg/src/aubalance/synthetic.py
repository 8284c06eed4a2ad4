"""Seeded synthetic record tables and small random problems for tests and benchmarks."""
from __future__ import annotations

import itertools

import numpy as np

from .model import BalancingProblem, ObjectiveConfig, RecordTable

# per-class totals of the combined non-augmented training sets (AU01 ... AU25)
AU_NAMES = ("AU01", "AU02", "AU04", "AU06", "AU12", "AU15", "AU20", "AU25")
NON_AUG_TOTALS = (62180, 12699, 48209, 18455, 33237, 5306, 9600, 28175)
NON_AUG_RECORDS = 322551
AUG1_TOTALS = (62874, 24754, 48365, 33091, 35417, 17748, 25681, 35416)
AUG1_RECORDS = 378041
AFFWILD_TOTALS = (47548, 2271, 32387, 9290, 22964, 1537, 3490, 7463)
AFFWILD_RECORDS = 232842


def table_with_column_sums(column_sums, n_records, seed=0, class_names=None, id_prefix="rec") -> RecordTable:
    """Random table of ``n_records`` rows whose per-class column sums are exactly ``column_sums``.

    Each class marks a uniformly chosen subset of records, independently of the
    other classes.
    """
    rng = np.random.default_rng(seed)
    k = len(column_sums)
    labels = np.zeros((n_records, k), dtype=np.uint8)
    for c, total in enumerate(column_sums):
        if not 0 <= total <= n_records:
            raise ValueError(f"column sum {total} impossible with {n_records} records")
        labels[rng.choice(n_records, size=int(total), replace=False), c] = 1
    width = len(str(n_records - 1))
    ids = tuple(f"{id_prefix}{i:0{width}d}" for i in range(n_records))
    names = tuple(class_names) if class_names is not None else tuple(f"class_{c}" for c in range(k))
    return RecordTable(ids, labels, names)


def skewed_au_table(n_records=NON_AUG_RECORDS, seed=0) -> RecordTable:
    """Eight-AU table with class frequencies proportional to the non-augmented totals."""
    sums = [round(t * n_records / NON_AUG_RECORDS) for t in NON_AUG_TOTALS]
    return table_with_column_sums(sums, n_records, seed, AU_NAMES)


def random_problem(rng, max_groups=3, max_classes=4, max_slack=20, lambdas=(0.0, 0.5, 1.0, 10.0)) -> BalancingProblem:
    """Small random problem whose per-group slack stays within ``max_slack``."""
    k = int(rng.integers(1, max_classes + 1))
    g = int(rng.integers(1, min(max_groups, 2**k) + 1))
    all_combos = list(itertools.product((0, 1), repeat=k))
    pick = sorted(rng.choice(len(all_combos), size=g, replace=False).tolist())
    combos = [all_combos[i] for i in pick]
    if rng.random() < 0.3:
        # bound factor 10 forces tiny base counts
        base = rng.integers(1, 3, g)
        factor = 10.0
    else:
        base = rng.integers(1, 15, g)
        factor = 1.0 + float(rng.uniform(0.05, 1.0)) * max_slack / int(base.max())
    lam = float(lambdas[int(rng.integers(len(lambdas)))])
    return BalancingProblem(combos, base, ObjectiveConfig(lam, factor))


def main(argv=None):
    import argparse

    from .formats import write_records

    parser = argparse.ArgumentParser(
        prog="python -m aubalance.synthetic",
        description="Write a synthetic eight-AU record CSV with class frequencies proportional to the non-augmented totals.",
    )
    parser.add_argument("--out", required=True)
    parser.add_argument("--records", type=int, default=NON_AUG_RECORDS)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    write_records(skewed_au_table(args.records, args.seed), args.out)


if __name__ == "__main__":
    main()
