"""Loading, validating and slicing prediction tables.

A table holds one row per scored individual: the observed binary outcome,
the protected-group label (exactly two distinct labels) and the model's
predicted probability, plus optional extra columns used for conditioning.
"""

from __future__ import annotations

import csv
import io
import json
import math
import operator
import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import IO, Any, Mapping, Sequence, Union

import numpy as np

from .errors import (
    EmptyInput,
    EmptySubgroup,
    GroupCardinality,
    IncompatibleCondition,
    InvalidParameter,
    MissingColumn,
    MissingValue,
    NonBinaryOutcome,
    ProbOutOfRange,
    UnparsableCondition,
    UnparsableInput,
)

FORMATS = ("csv", "json")

_OPS = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
    "==": operator.eq,
    "!=": operator.ne,
}
NUMERIC_OPS = frozenset({"<", "<=", ">", ">="})
_NEGATED = {"<": ">=", ">=": "<", ">": "<=", "<=": ">", "==": "!=", "!=": "=="}
_CONDITION_RE = re.compile(r"^\s*(<=|>=|==|!=|<|>)\s*(.*?)\s*$")
_MISSING_TOKENS = frozenset({"", "na", "nan", "null", "none"})


@dataclass(frozen=True)
class ColumnMap:
    """Names of the input columns holding each field."""

    outcome: str
    group: str
    prob: str
    extras: tuple[str, ...] = ()


@dataclass(frozen=True)
class CutoffRule:
    cutoff: float = 0.5

    def __post_init__(self) -> None:
        c = self.cutoff
        if isinstance(c, bool) or not isinstance(c, (int, float)) or not 0.0 <= c <= 1.0:
            raise InvalidParameter(f"cutoff must be a number in [0, 1], got {c!r}")
        object.__setattr__(self, "cutoff", float(c))


Cutoff = Union[float, CutoffRule]


def as_cutoff(rule: Cutoff) -> float:
    if isinstance(rule, CutoffRule):
        return rule.cutoff
    return CutoffRule(rule).cutoff


@dataclass(frozen=True)
class ConditionSpec:
    """A comparison ``<column> <op> <value>`` used to select a subgroup."""

    op: str
    value: float | str
    column: str | None = None

    def __post_init__(self) -> None:
        if self.op not in _OPS:
            raise UnparsableCondition(f"unknown operator {self.op!r}")

    @property
    def is_numeric(self) -> bool:
        return not isinstance(self.value, str)

    def bind(self, column: str) -> ConditionSpec:
        return ConditionSpec(self.op, self.value, column)

    def negate(self) -> ConditionSpec:
        return ConditionSpec(_NEGATED[self.op], self.value, self.column)

    def describe(self) -> str:
        value = _format_literal(self.value)
        if self.column is None:
            return f"{self.op} {value}"
        return f"{self.column} {self.op} {value}"


def _format_literal(value: float | str) -> str:
    if isinstance(value, str):
        return value
    return str(int(value)) if float(value).is_integer() else repr(value)


def parse_condition(text: str, column: str | None = None) -> ConditionSpec:
    """Parse ``">=60"`` / ``"== Male"`` style condition strings.

    The literal is numeric when it parses as a finite number, otherwise a
    string (optionally wrapped in single or double quotes).
    """
    m = _CONDITION_RE.match(text)
    if m is None:
        raise UnparsableCondition(f"cannot parse condition {text!r}; expected <op><value>")
    op, literal = m.groups()
    if not literal or literal[0] in "<>=!":
        raise UnparsableCondition(f"cannot parse condition {text!r}; expected <op><value>")
    if len(literal) >= 2 and literal[0] == literal[-1] and literal[0] in "'\"":
        return ConditionSpec(op, literal[1:-1], column)
    try:
        number = float(literal)
    except ValueError:
        return ConditionSpec(op, literal, column)
    if not math.isfinite(number):
        raise UnparsableCondition(f"non-finite literal in condition {text!r}")
    return ConditionSpec(op, number, column)


def _frozen(values: np.ndarray) -> np.ndarray:
    arr = np.array(values, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class AuditTable:
    """Validated, immutable columnar prediction table.

    ``group`` holds 0/1 codes indexing into ``labels``; ``labels[0]`` is
    group 1 and ``labels[1]`` is group 2 (the reference, i.e. the ratio
    denominator).
    """

    outcome: np.ndarray
    group: np.ndarray
    prob: np.ndarray
    labels: tuple[str, str]
    extras: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        outcome = _frozen(np.asarray(self.outcome, dtype=np.int8))
        group = _frozen(np.asarray(self.group, dtype=np.int8))
        prob = _frozen(np.asarray(self.prob, dtype=np.float64))
        n = len(outcome)
        if n == 0:
            raise EmptyInput("table has no rows")
        if len(group) != n or len(prob) != n:
            raise InvalidParameter("outcome, group and prob columns differ in length")
        if len(self.labels) != 2 or self.labels[0] == self.labels[1]:
            raise GroupCardinality(f"expected two distinct group labels, got {self.labels!r}")
        if not np.isin(outcome, (0, 1)).all():
            raise NonBinaryOutcome("outcome values must be 0 or 1")
        if not np.isin(group, (0, 1)).all():
            raise GroupCardinality("group codes must be 0 or 1")
        if not ((prob >= 0.0) & (prob <= 1.0)).all():
            raise ProbOutOfRange("probabilities must lie in [0, 1]")
        missing = [lab for code, lab in enumerate(self.labels) if not (group == code).any()]
        if missing:
            raise GroupCardinality(
                f"group {', '.join(map(repr, missing))} has no rows; "
                "exactly two groups must be present"
            )
        extras = {}
        for name, col in self.extras.items():
            arr = _frozen(np.asarray(col))
            if len(arr) != n:
                raise InvalidParameter(f"extra column {name!r} has wrong length")
            extras[name] = arr
        object.__setattr__(self, "outcome", outcome)
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "prob", prob)
        object.__setattr__(self, "labels", (str(self.labels[0]), str(self.labels[1])))
        object.__setattr__(self, "extras", MappingProxyType(extras))

    @classmethod
    def from_columns(
        cls,
        outcome: Sequence[Any],
        group: Sequence[Any],
        prob: Sequence[Any],
        extras: Mapping[str, Sequence[Any]] | None = None,
        reference: str | None = None,
    ) -> AuditTable:
        """Build a table from raw per-row values.

        Group labels are stringified and ordered lexicographically unless
        ``reference`` names the label to place second.
        """
        if len(outcome) == 0:
            raise EmptyInput("table has no rows")
        names = [str(g) for g in group]
        distinct = sorted(set(names))
        if len(distinct) != 2:
            shown = ", ".join(distinct[:10])
            raise GroupCardinality(
                f"expected exactly 2 distinct group labels, found {len(distinct)} ({shown})"
            )
        labels = (distinct[0], distinct[1])
        if reference is not None:
            labels = _reorder(labels, reference)
        codes = np.fromiter((0 if g == labels[0] else 1 for g in names), np.int8, len(names))
        return cls(
            np.asarray(outcome, dtype=np.int8),
            codes,
            np.asarray(prob, dtype=np.float64),
            labels,
            dict(extras or {}),
        )

    @property
    def n(self) -> int:
        return len(self.outcome)

    @property
    def group_labels(self) -> list[str]:
        return [self.labels[g] for g in self.group]

    def rows(self) -> list[tuple[int, str, float]]:
        return [
            (int(y), self.labels[g], float(p))
            for y, g, p in zip(self.outcome, self.group, self.prob)
        ]

    def take(self, mask: np.ndarray) -> AuditTable:
        """Subtable of the rows selected by a boolean mask or index array."""
        return AuditTable(
            self.outcome[mask],
            self.group[mask],
            self.prob[mask],
            self.labels,
            {k: v[mask] for k, v in self.extras.items()},
        )

    def with_reference(self, reference: str) -> AuditTable:
        """Reorder groups so that ``reference`` becomes group 2."""
        labels = _reorder(self.labels, reference)
        if labels == self.labels:
            return self
        return AuditTable(self.outcome, 1 - self.group, self.prob, labels, dict(self.extras))

    def to_csv(self, columns: ColumnMap | None = None) -> str:
        columns = columns or ColumnMap("outcome", "group", "prob", tuple(self.extras))
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([columns.outcome, columns.group, columns.prob, *columns.extras])
        extra_cols = [self.extras[name] for name in columns.extras]
        for i, (y, g, p) in enumerate(self.rows()):
            extra = [_format_cell(col[i]) for col in extra_cols]
            writer.writerow([y, g, repr(p), *extra])
        return buf.getvalue()


def _format_cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        f = float(value)
        return str(int(f)) if f.is_integer() else repr(f)
    return str(value)


def _reorder(labels: tuple[str, str], reference: str) -> tuple[str, str]:
    reference = str(reference)
    if reference not in labels:
        raise GroupCardinality(
            f"reference group {reference!r} not among group labels {labels[0]!r}, {labels[1]!r}"
        )
    other = labels[0] if labels[1] == reference else labels[1]
    return (other, reference)


def _is_missing(value: Any) -> bool:
    if value is None:
        return True
    if isinstance(value, float) and math.isnan(value):
        return True
    return isinstance(value, str) and value.strip().lower() in _MISSING_TOKENS


def _number(value: Any, column: str, row: int) -> float:
    if isinstance(value, bool):
        return float(value)
    if isinstance(value, (int, float)):
        return float(value)
    try:
        return float(str(value).strip())
    except ValueError:
        raise UnparsableInput(f"column {column!r}, row {row}: {value!r} is not a number") from None


def _extra_column(values: list[Any], column: str) -> np.ndarray:
    """Numeric column when every value parses as a number, else strings."""
    try:
        nums = [
            float(v) if not isinstance(v, str) else float(v.strip())
            for v in values
        ]
    except (TypeError, ValueError):
        return np.array([str(v) for v in values], dtype=object)
    return np.array(nums, dtype=np.float64)


def _records_from_csv(text: str) -> tuple[list[str], list[dict[str, Any]]]:
    reader = csv.DictReader(io.StringIO(text), delimiter=",")
    header = reader.fieldnames
    if not header:
        raise EmptyInput("CSV input has no header row")
    records = []
    for rec in reader:
        if None in rec:
            raise UnparsableInput(f"CSV row {reader.line_num} has more fields than the header")
        records.append(rec)
    return list(header), records


def _records_from_json(text: str) -> tuple[list[str] | None, list[dict[str, Any]]]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UnparsableInput(f"invalid JSON: {exc}") from None
    if not isinstance(data, list) or not all(isinstance(r, dict) for r in data):
        raise UnparsableInput("JSON input must be an array of objects")
    return None, data


def load_table(
    source: IO[str] | IO[bytes] | str | bytes,
    format: str,
    columns: ColumnMap,
    reference: str | None = None,
) -> AuditTable:
    """Read a CSV (header row, comma-delimited) or JSON array-of-objects table.

    Missing values in any mapped column are an error; nothing is imputed.
    """
    if format not in FORMATS:
        raise InvalidParameter(f"unsupported format {format!r}; expected one of {FORMATS}")
    raw = source.read() if hasattr(source, "read") else source
    text = raw.decode("utf-8-sig") if isinstance(raw, bytes) else raw.lstrip("﻿")
    if not text.strip():
        raise EmptyInput("input is empty")

    if format == "csv":
        header, records = _records_from_csv(text)
    else:
        header, records = _records_from_json(text)
    if not records:
        raise EmptyInput("input has no data rows")

    wanted = [columns.outcome, columns.group, columns.prob, *columns.extras]
    for i, rec in enumerate(records, start=1):
        absent = [c for c in wanted if c not in rec]
        if absent:
            where = "header" if header is not None else f"record {i}"
            raise MissingColumn(f"column(s) {', '.join(map(repr, absent))} not found in {where}")
        if header is not None:
            break

    for col in wanted:
        for i, rec in enumerate(records, start=1):
            if _is_missing(rec[col]):
                raise MissingValue(f"missing value in column {col!r}, row {i}")

    outcome = []
    for i, rec in enumerate(records, start=1):
        y = _number(rec[columns.outcome], columns.outcome, i)
        if y not in (0.0, 1.0):
            raise NonBinaryOutcome(
                f"column {columns.outcome!r}, row {i}: outcome {rec[columns.outcome]!r} is not 0 or 1"
            )
        outcome.append(int(y))

    prob = []
    for i, rec in enumerate(records, start=1):
        p = _number(rec[columns.prob], columns.prob, i)
        if not 0.0 <= p <= 1.0:
            raise ProbOutOfRange(
                f"column {columns.prob!r}, row {i}: probability {rec[columns.prob]!r} outside [0, 1]"
            )
        prob.append(p)

    groups = [rec[columns.group] for rec in records]
    extras = {c: _extra_column([rec[c] for rec in records], c) for c in columns.extras}
    return AuditTable.from_columns(outcome, groups, prob, extras, reference=reference)


def condition_mask(t: AuditTable, col: str, c: ConditionSpec) -> np.ndarray:
    """Boolean mask of the rows satisfying ``col <op> value``."""
    if col not in t.extras:
        raise MissingColumn(f"condition column {col!r} not loaded; available: {sorted(t.extras)}")
    values = t.extras[col]
    numeric_column = values.dtype.kind in "fiu"
    if c.op in NUMERIC_OPS and not (numeric_column and c.is_numeric):
        raise IncompatibleCondition(
            f"operator {c.op!r} needs a numeric column and literal; column {col!r} "
            f"is {'numeric' if numeric_column else 'text'}"
        )
    if numeric_column != c.is_numeric:
        raise IncompatibleCondition(
            f"cannot compare {'numeric' if numeric_column else 'text'} column {col!r} "
            f"with {'numeric' if c.is_numeric else 'text'} literal {c.value!r}"
        )
    if numeric_column:
        return _OPS[c.op](values.astype(np.float64), float(c.value))
    return np.array([_OPS[c.op](v, c.value) for v in values], dtype=bool)


def filter_rows(t: AuditTable, col: str, c: ConditionSpec) -> AuditTable:
    mask = condition_mask(t, col, c)
    if not mask.any():
        raise EmptySubgroup(f"no rows satisfy {c.bind(col).describe()}")
    return t.take(mask)


def classify(t: AuditTable, rule: Cutoff) -> np.ndarray:
    """Binary predictions: 1 where prob >= cutoff."""
    return (t.prob >= as_cutoff(rule)).astype(np.int8)
