"""CSV record tables and the JSON-lines augmentation manifest."""
from __future__ import annotations

import csv
import json
from collections import Counter
from pathlib import Path

import numpy as np

from .errors import FormatError, InputError
from .model import RecordTable
from .plan import AugmentationPlan, AugmentationRecipe, PlanEntry

MANIFEST_SCHEMA_VERSION = 1


def read_records(path) -> RecordTable:
    """Read ``record_id,<class_1>,...,<class_K>`` CSV with 0/1 cells."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0].strip() != "record_id":
            raise FormatError("missing header row 'record_id,<class_1>,...'", path=path, line=1)
        class_names = [h.strip() for h in header[1:]]
        if not class_names:
            raise FormatError("header names no label classes", path=path, line=1)
        if len(set(class_names)) != len(class_names):
            raise FormatError("duplicate class name in header", path=path, line=1)
        width = len(header)
        ids: list[str] = []
        cells: list[list[str]] = []
        first_line: dict[str, int] = {}
        allowed = {"0", "1"}
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != width:
                raise FormatError(f"expected {width} fields, found {len(row)}", path=path, line=line)
            record_id = row[0]
            values = row[1:]
            if not allowed.issuperset(values):
                values = [c.strip() for c in values]
            if not allowed.issuperset(values):
                col = next(i for i, v in enumerate(values) if v not in allowed)
                raise FormatError(f"label cell {values[col]!r} is not 0 or 1", path=path, line=line, column=class_names[col])
            if record_id in first_line:
                raise FormatError(
                    f"duplicate record_id {record_id!r} (first seen on line {first_line[record_id]})", path=path, line=line
                )
            first_line[record_id] = line
            ids.append(record_id)
            cells.append(values)
    if not ids:
        raise InputError(f"{path}: no records after the header")
    labels = (np.array(cells, dtype="U1") == "1").astype(np.uint8)
    return RecordTable(tuple(ids), labels, tuple(class_names))


def write_records(table: RecordTable, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(("record_id",) + table.class_names) + "\n")
        for record_id, row in zip(table.record_ids, table.labels.tolist()):
            fh.write(record_id + "," + ",".join(map(str, row)) + "\n")


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def manifest_lines(plan: AugmentationPlan):
    """Serialized lines; each equals ``_dumps`` of the corresponding object."""
    yield _dumps({"schema_version": MANIFEST_SCHEMA_VERSION, "seed": plan.seed})
    ops_json: dict[tuple[str, ...], str] = {}
    for e in sorted(plan.entries, key=lambda e: (e.record_id, e.copy_index)):
        ops = ops_json.get(e.recipe.ops)
        if ops is None:
            ops = ops_json[e.recipe.ops] = _dumps(list(e.recipe.ops))
        yield f'{{"record_id":{_dumps(e.record_id)},"copy_index":{int(e.copy_index)},"ops":{ops}}}'


def write_manifest(plan: AugmentationPlan, path) -> None:
    """Header object, then one entry object per line sorted by (record_id, copy_index); UTF-8, LF."""
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for line in manifest_lines(plan):
            fh.write(line + "\n")


def read_manifest(path) -> AugmentationPlan:
    """Parse a manifest back into a plan (without solution); variant indices are recomputed."""
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise FormatError("empty manifest", path=path, line=1)
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg}", path=path, line=1) from None
    if not isinstance(header, dict) or header.get("schema_version") != MANIFEST_SCHEMA_VERSION or "seed" not in header:
        raise FormatError(f"expected header with schema_version {MANIFEST_SCHEMA_VERSION} and seed", path=path, line=1)
    entries = []
    seen: Counter = Counter()
    for n, text in enumerate(lines[1:], start=2):
        try:
            obj = json.loads(text)
            record_id, copy_index, ops = obj["record_id"], obj["copy_index"], tuple(obj["ops"])
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise FormatError(f"bad manifest entry ({exc})", path=path, line=n) from None
        if set(obj) != {"record_id", "copy_index", "ops"}:
            raise FormatError(f"unexpected keys {sorted(obj)}", path=path, line=n)
        try:
            recipe = AugmentationRecipe(ops, seen[record_id, ops])
        except ValueError as exc:
            raise FormatError(str(exc), path=path, line=n) from None
        seen[record_id, ops] += 1
        entries.append(PlanEntry(record_id, int(copy_index), recipe))
    return AugmentationPlan(tuple(entries), None, int(header["seed"]))
