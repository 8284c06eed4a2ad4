"""Before/after class distribution reports in text and CSV form."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .model import BalancingProblem, BalancingSolution
from .objective import class_totals, imbalance_term, objective

METRIC_ORDER = ("imbalance_term", "variance_term", "objective", "growth_ratio")


@dataclass(frozen=True)
class DistributionReport:
    class_names: tuple[str, ...]
    before: tuple[int, ...]
    after: tuple[int, ...]
    records_before: int
    records_after: int
    metrics: dict[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "class_names", tuple(self.class_names))
        object.__setattr__(self, "before", tuple(int(v) for v in self.before))
        object.__setattr__(self, "after", tuple(int(v) for v in self.after))
        if not len(self.class_names) == len(self.before) == len(self.after):
            raise ValueError("class names, before and after totals must have equal length")
        shrunk = [n for n, b, a in zip(self.class_names, self.before, self.after) if a < b]
        if shrunk:
            raise ValueError(f"after-totals below before-totals for {shrunk}")
        metrics = {name: (float(b), float(a)) for name, (b, a) in self.metrics.items()}
        object.__setattr__(self, "metrics", {k: metrics[k] for k in sorted(metrics, key=_metric_key)})


def _metric_key(name):
    return (METRIC_ORDER.index(name), "") if name in METRIC_ORDER else (len(METRIC_ORDER), name)


def report_from_totals(class_names, before, after, records_before, records_after) -> DistributionReport:
    """Report for given class-total vectors; only the metrics computable from totals are filled in."""
    metrics = {
        "imbalance_term": (imbalance_term(np.asarray(before, dtype=np.int64)), imbalance_term(np.asarray(after, dtype=np.int64))),
        "growth_ratio": (1.0, records_after / records_before),
    }
    return DistributionReport(class_names, before, after, records_before, records_after, metrics)


def build_report(problem: BalancingProblem, solution: BalancingSolution, class_names=None) -> DistributionReport:
    names = class_names or problem.class_names or tuple(f"class_{c}" for c in range(problem.class_count))
    base = problem.base_counts
    f0, imb0, var0 = objective(problem, base)
    records_before = int(base.sum())
    records_after = int(solution.counts.sum())
    metrics = {
        "imbalance_term": (imb0, solution.imbalance_term),
        "variance_term": (var0, solution.variance_term),
        "objective": (f0, solution.objective_value),
        "growth_ratio": (1.0, records_after / records_before),
    }
    return DistributionReport(
        names,
        class_totals(problem, base).tolist(),
        class_totals(problem, solution.counts).tolist(),
        records_before,
        records_after,
        metrics,
    )


def format_text(report: DistributionReport) -> str:
    name_w = max([len("records"), len("metric")] + [len(n) for n in report.class_names] + [len(m) for m in report.metrics])
    num_w = max([len("before"), len("after")] + [len(str(v)) for v in (*report.before, *report.after, report.records_before, report.records_after)])
    for b, a in report.metrics.values():
        num_w = max(num_w, len(repr(b)), len(repr(a)))
    rule = "-" * (name_w + 2 * (num_w + 2))
    out = [f"{'class':<{name_w}}  {'before':>{num_w}}  {'after':>{num_w}}", rule]
    for name, b, a in zip(report.class_names, report.before, report.after):
        out.append(f"{name:<{name_w}}  {b:>{num_w}}  {a:>{num_w}}")
    out.append(rule)
    out.append(f"{'records':<{name_w}}  {report.records_before:>{num_w}}  {report.records_after:>{num_w}}")
    out.append("")
    out.append(f"{'metric':<{name_w}}  {'before':>{num_w}}  {'after':>{num_w}}")
    out.append(rule)
    for name, (b, a) in report.metrics.items():
        out.append(f"{name:<{name_w}}  {b!r:>{num_w}}  {a!r:>{num_w}}")
    return "\n".join(out) + "\n"


def format_csv(report: DistributionReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["section", "name", "before", "after"])
    for name, b, a in zip(report.class_names, report.before, report.after):
        w.writerow(["class", name, b, a])
    w.writerow(["total", "records", report.records_before, report.records_after])
    for name, (b, a) in report.metrics.items():
        w.writerow(["metric", name, repr(b), repr(a)])
    return buf.getvalue()


def parse_csv(text: str) -> DistributionReport:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["section", "name", "before", "after"]:
        raise ValueError("not a distribution report CSV")
    names, before, after, metrics = [], [], [], {}
    records = (0, 0)
    for section, name, b, a in rows[1:]:
        if section == "class":
            names.append(name)
            before.append(int(b))
            after.append(int(a))
        elif section == "total":
            records = (int(b), int(a))
        elif section == "metric":
            metrics[name] = (float(b), float(a))
        else:
            raise ValueError(f"unknown report section {section!r}")
    return DistributionReport(names, before, after, records[0], records[1], metrics)


def render(report: DistributionReport, fmt: str = "text") -> str:
    if fmt == "text":
        return format_text(report)
    if fmt == "csv":
        return format_csv(report)
    raise ValueError(f"unknown report format {fmt!r}")


def write_report(report: DistributionReport, path, fmt: str = "text") -> None:
    Path(path).write_text(render(report, fmt), encoding="utf-8", newline="\n")
