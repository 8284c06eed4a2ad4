"""Command line: read records, solve the balancing problem, emit manifest and report."""
from __future__ import annotations

import argparse
import logging
import sys

from . import kernels
from .errors import FormatError, InfeasibleError, InputError, SearchSpaceTooLarge
from .formats import read_records, write_manifest
from .model import ObjectiveConfig, group_records
from .plan import expand_plan, verify_plan
from .report import build_report, render, write_report
from .solver import SolverSettings, solve

log = logging.getLogger("aubalance")

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2, 3
SOLVERS = {"local": "local_search", "anneal": "annealing", "brute": "brute_force"}


def _non_negative_float(text):
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _factor(text):
    value = float(text)
    if not value > 1:
        raise argparse.ArgumentTypeError(f"must be > 1, got {text}")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _non_negative_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be a non-negative integer, got {text}")
    return value


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"must be an unsigned 64-bit integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="aubalance",
        description="Plan augmentations that balance a multi-label dataset. Records sharing a label "
        "combination are grouped; per-group counts are optimized inside [n0, floor(max_factor*n0)].",
    )
    p.add_argument("--input", required=True, help="CSV with header record_id,<class_1>,...,<class_K> and 0/1 cells")
    p.add_argument("--lambda", dest="lambda_weight", type=_non_negative_float, default=1.0,
                   help="weight of the growth-ratio variance penalty (default: 1.0)")
    p.add_argument("--max-factor", type=_factor, default=10.0, help="upper bound factor on per-group counts (default: 10)")
    p.add_argument("--solver", choices=sorted(SOLVERS), default="local", help="optimizer (default: local)")
    p.add_argument("--seed", type=_seed, default=0, help="root seed for solver restarts and recipe assignment (default: 0)")
    p.add_argument("--restarts", type=_positive_int, default=8, help="solver restarts (default: 8)")
    p.add_argument("--max-iters", type=_non_negative_int, default=10_000,
                   help="objective evaluations per restart (default: 10000)")
    p.add_argument("--plan-out", help="write the JSON-lines augmentation manifest here")
    p.add_argument("--report-out", help="write the distribution report here (default: stdout)")
    p.add_argument("--report-format", choices=("text", "csv"), default="text", help="report format (default: text)")
    p.add_argument("--budget", type=_non_negative_int, default=None,
                   help="EXTENSION, not part of the original method: cap on the total record count after augmentation")
    p.add_argument("--workers", type=_positive_int, default=1, help="threads for independent restarts; output is unchanged")
    p.add_argument("--backend", choices=sorted(kernels.BACKENDS), default=None,
                   help=f"solver kernel backend (default: {kernels.BACKEND})")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    return p


def run_pipeline(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")

    try:
        table = read_records(args.input)
    except FileNotFoundError:
        print(f"error: --input: file not found: {args.input}", file=sys.stderr)
        return EXIT_INPUT
    except (FormatError, InputError) as exc:
        print(f"error: --input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: --input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    log.info("read %d records with %d classes", len(table), table.class_count)

    problem = group_records(table, ObjectiveConfig(args.lambda_weight, args.max_factor))
    settings = SolverSettings(
        seed=args.seed,
        restarts=args.restarts,
        max_iterations=args.max_iters,
        mode=SOLVERS[args.solver],
        budget=args.budget,
        workers=args.workers,
        backend=args.backend,
    )
    log.info("%d unique label combinations; solving with %s (%s kernels)", problem.group_count, settings.mode,
             args.backend or kernels.BACKEND)
    try:
        solution = solve(problem, settings)
    except SearchSpaceTooLarge as exc:
        print(f"error: --solver brute: {exc}; use --solver local", file=sys.stderr)
        return EXIT_INFEASIBLE
    except InfeasibleError as exc:
        print(f"error: --budget: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE

    plan = expand_plan(table, problem, solution, args.seed)
    check = verify_plan(plan, table, problem)
    if not check.passed:
        for c in check.failures():
            print(f"error: plan verification: {c.line()}", file=sys.stderr)
        return EXIT_FAILED
    log.info("objective %r -> %d extra copies", solution.objective_value, len(plan))

    report = build_report(problem, solution)
    try:
        if args.plan_out:
            write_manifest(plan, args.plan_out)
        if args.report_out:
            write_report(report, args.report_out, args.report_format)
        else:
            sys.stdout.write(render(report, args.report_format))
    except OSError as exc:
        flag = "--plan-out" if args.plan_out and args.plan_out in str(exc) else "--report-out"
        print(f"error: {flag}: {exc}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def main(argv=None):
    sys.exit(run_pipeline(argv))
