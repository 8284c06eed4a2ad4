"""Time the compiled and pure-Python solver kernels on the same problems.

    python benchmarks/bench_kernels.py --records 322551 --repeat 3
"""
import argparse
import time

import numpy as np

from aubalance import kernels
from aubalance.model import feasible_box, group_records
from aubalance.solver import SolverSettings, annealing_solve, default_step_schedule, local_search_solve
from aubalance.synthetic import skewed_au_table


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--records", type=int, default=322551)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-iters", type=int, default=10_000)
    parser.add_argument("--restarts", type=int, default=8)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    problem = group_records(skewed_au_table(args.records, seed=args.seed))
    lower, upper = feasible_box(problem)
    steps = np.array(default_step_schedule(problem), dtype=np.int64)
    print(f"{args.records} records, {problem.group_count} groups, {problem.class_count} classes; "
          f"backends: {', '.join(sorted(kernels.BACKENDS))}")

    rows = []
    for name in sorted(kernels.BACKENDS):
        kern = kernels.get_backend(name)

        def evaluate():
            counts = lower.copy()
            for _ in range(1000):
                kern.evaluate(problem.combinations, problem.base_counts, counts, 1.0)

        def descend():
            counts = lower.copy()
            return kern.descend(problem.combinations, problem.base_counts, lower, upper, counts, steps,
                                args.max_iters, 1.0, -1, np.empty(0))

        settings = SolverSettings(seed=args.seed, restarts=args.restarts, max_iterations=args.max_iters, backend=name)
        t_eval, _ = best_of(evaluate, args.repeat)
        t_desc, (evals, f) = best_of(descend, args.repeat)
        t_ls, ls = best_of(lambda: local_search_solve(problem, settings), args.repeat)
        t_an, an = best_of(lambda: annealing_solve(problem, settings), args.repeat)
        rows.append((name, t_eval, t_desc, evals, t_ls, t_an, ls.objective_value, an.objective_value))

    print(f"{'backend':<8} {'1k full evals':>14} {'one descent':>12} {'evals':>6} {'local search':>13} {'annealing':>10}")
    for name, t_eval, t_desc, evals, t_ls, t_an, *_ in rows:
        print(f"{name:<8} {t_eval:>13.4f}s {t_desc:>11.4f}s {evals:>6} {t_ls:>12.4f}s {t_an:>9.4f}s")
    if len(rows) == 2:
        (_, *c), (_, *p) = rows
        print(f"speedup  {p[0] / c[0]:>13.1f}x {p[1] / c[1]:>11.1f}x {'':>6} {p[3] / c[3]:>12.1f}x {p[4] / c[4]:>9.1f}x")
        same = rows[0][6:] == rows[1][6:]
        print(f"objectives identical across backends: {same}")


if __name__ == "__main__":
    main()
