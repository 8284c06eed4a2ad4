"""Problem and solution types, and grouping of raw records into unique label combinations."""
from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, FormatError, InputError

LabelCombination = tuple[int, ...]


def _frozen(array, dtype) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def as_combination(bits: Iterable[int]) -> LabelCombination:
    combo = tuple(int(b) for b in bits)
    if not combo:
        raise DimensionError("label combination must have at least one class")
    if any(b not in (0, 1) for b in combo):
        raise ValueError(f"label combination must be binary, got {combo}")
    return combo


@dataclass(frozen=True)
class ObjectiveConfig:
    lambda_weight: float = 1.0
    max_factor: float = 10.0

    def __post_init__(self):
        if not self.lambda_weight >= 0:
            raise ValueError(f"lambda_weight must be >= 0, got {self.lambda_weight}")
        if not self.max_factor > 1:
            raise ValueError(f"max_factor must be > 1, got {self.max_factor}")


@dataclass(frozen=True, eq=False)
class RecordTable:
    """Record identifiers with their binary class labels.

    ``labels`` is an (N, K) read-only uint8 array aligned with ``record_ids``.
    """

    record_ids: tuple[str, ...]
    labels: np.ndarray
    class_names: tuple[str, ...]

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 2:
            raise DimensionError("labels must be a 2-d array")
        if labels.shape[0] != len(self.record_ids):
            raise DimensionError(f"{labels.shape[0]} label rows for {len(self.record_ids)} record ids")
        if len(self.class_names) != labels.shape[1]:
            raise DimensionError(f"{len(self.class_names)} class names for {labels.shape[1]} label columns")
        if labels.size and not np.isin(labels, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")
        if len(set(self.record_ids)) != len(self.record_ids):
            raise ValueError("record_id values must be unique")
        object.__setattr__(self, "record_ids", tuple(self.record_ids))
        object.__setattr__(self, "class_names", tuple(self.class_names))
        object.__setattr__(self, "labels", _frozen(labels, np.uint8))

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[str, Sequence[int]]], class_names: Sequence[str] | None = None) -> RecordTable:
        ids, labels = [], []
        width = None if class_names is None else len(class_names)
        for n, (record_id, bits) in enumerate(rows):
            combo = as_combination(bits)
            if width is None:
                width = len(combo)
            elif len(combo) != width:
                raise FormatError(f"record {record_id!r} has {len(combo)} labels, expected {width}", line=n + 1)
            ids.append(str(record_id))
            labels.append(combo)
        if width is None:
            raise InputError("record table is empty")
        if class_names is None:
            class_names = [f"class_{c}" for c in range(width)]
        return cls(tuple(ids), np.array(labels, dtype=np.uint8).reshape(len(ids), width), tuple(class_names))

    def __len__(self):
        return len(self.record_ids)

    @property
    def class_count(self) -> int:
        return self.labels.shape[1]

    def rows(self):
        for record_id, row in zip(self.record_ids, self.labels.tolist()):
            yield record_id, tuple(row)


@dataclass(frozen=True, eq=False)
class BalancingProblem:
    """Unique label combinations (rows of ``combinations``) with their base counts."""

    combinations: np.ndarray
    base_counts: np.ndarray
    config: ObjectiveConfig = field(default_factory=ObjectiveConfig)
    class_names: tuple[str, ...] | None = None

    def __post_init__(self):
        combos = np.asarray(self.combinations)
        base = np.asarray(self.base_counts)
        if combos.ndim != 2 or combos.shape[0] < 1 or combos.shape[1] < 1:
            raise DimensionError("combinations must be a non-empty (G, K) matrix")
        if base.shape != (combos.shape[0],):
            raise DimensionError(f"base_counts has shape {base.shape}, expected ({combos.shape[0]},)")
        if not np.isin(combos, (0, 1)).all():
            raise ValueError("combinations must be binary")
        if not np.array_equal(base, np.round(base)) or (base < 1).any():
            raise ValueError("base_counts must be positive integers")
        if len({tuple(r) for r in combos.tolist()}) != combos.shape[0]:
            raise ValueError("combinations must be pairwise distinct")
        if self.class_names is not None:
            if len(self.class_names) != combos.shape[1]:
                raise DimensionError("class_names length must equal the class count")
            object.__setattr__(self, "class_names", tuple(self.class_names))
        object.__setattr__(self, "combinations", _frozen(combos, np.int64))
        object.__setattr__(self, "base_counts", _frozen(base, np.int64))

    @property
    def group_count(self) -> int:
        return self.combinations.shape[0]

    @property
    def class_count(self) -> int:
        return self.combinations.shape[1]

    def combination(self, r: int) -> LabelCombination:
        return tuple(self.combinations[r].tolist())

    def group_index(self) -> dict[LabelCombination, int]:
        return {tuple(row): r for r, row in enumerate(self.combinations.tolist())}

    def __eq__(self, other):
        if not isinstance(other, BalancingProblem):
            return NotImplemented
        return (
            np.array_equal(self.combinations, other.combinations)
            and np.array_equal(self.base_counts, other.base_counts)
            and self.config == other.config
            and self.class_names == other.class_names
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class BalancingSolution:
    counts: np.ndarray
    objective_value: float
    imbalance_term: float
    variance_term: float
    solver: str = ""
    restart: int | None = None
    evaluations: int = 0

    def __post_init__(self):
        object.__setattr__(self, "counts", _frozen(self.counts, np.int64))

    def __eq__(self, other):
        if not isinstance(other, BalancingSolution):
            return NotImplemented
        return (
            np.array_equal(self.counts, other.counts)
            and self.objective_value == other.objective_value
            and self.imbalance_term == other.imbalance_term
            and self.variance_term == other.variance_term
        )

    __hash__ = None


def _bit_weights(k: int) -> np.ndarray:
    return np.left_shift(np.int64(1), np.arange(k - 1, -1, -1, dtype=np.int64))


def group_records(table: RecordTable, config: ObjectiveConfig | None = None) -> BalancingProblem:
    """Collapse records into one group per distinct label combination.

    Groups are ordered lexicographically by their bit sequence, so the result
    does not depend on row order.
    """
    if len(table) == 0:
        raise InputError("record table is empty")
    labels = table.labels
    if labels.ndim != 2 or labels.shape[1] < 1:
        raise FormatError("inconsistent label width")
    k = labels.shape[1]
    if k <= 62:
        # first class is the most significant bit, so numeric order is lexicographic order
        keys, counts = np.unique(labels.astype(np.int64) @ _bit_weights(k), return_counts=True)
        combos = (keys[:, None] >> np.arange(k - 1, -1, -1, dtype=np.int64)) & 1
    else:
        combos, counts = np.unique(labels, axis=0, return_counts=True)
    return BalancingProblem(combos, counts, config or ObjectiveConfig(), table.class_names)


def group_assignment(table: RecordTable, problem: BalancingProblem) -> np.ndarray:
    """Group index of every record in ``table``; -1 where the combination is unknown to ``problem``."""
    if table.class_count != problem.class_count:
        raise DimensionError(f"table has {table.class_count} classes, problem has {problem.class_count}")
    if problem.class_count <= 62:
        weights = _bit_weights(problem.class_count)
        keys = table.labels.astype(np.int64) @ weights
        combo_keys = problem.combinations @ weights
        order = np.argsort(combo_keys)
        pos = np.searchsorted(combo_keys[order], keys)
        pos = np.minimum(pos, len(order) - 1)
        found = combo_keys[order][pos] == keys
        return np.where(found, order[pos], -1)
    lookup = problem.group_index()
    return np.array([lookup.get(tuple(row), -1) for row in table.labels.tolist()], dtype=np.int64)


def feasible_box(problem: BalancingProblem) -> tuple[np.ndarray, np.ndarray]:
    """Inclusive integer bounds ``[base_counts, floor(max_factor * base_counts)]``."""
    lower = problem.base_counts.copy()
    upper = np.floor(problem.config.max_factor * lower.astype(np.float64)).astype(np.int64)
    return lower, np.maximum(upper, lower)
