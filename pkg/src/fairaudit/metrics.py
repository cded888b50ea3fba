"""Per-group statistics for the eleven group fairness criteria.

Every statistic is a ratio of two sums over a group's rows, so all of them
are evaluated from one per-group tally::

    n, tp, fp, tn, fn, sum(prob | y=1), sum(prob | y=0), sum((prob - y)^2)

The tally accepts per-row weights, which is how bootstrap replicates are
evaluated (a replicate is a vector of row multiplicities).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, UnknownMetric
from .ingest import AuditTable, ConditionSpec, Cutoff, as_cutoff, classify, filter_rows

# tally columns
N, TP, FP, TN, FN, PSUM_POS, PSUM_NEG, SQERR = range(8)
TALLY_WIDTH = 8


@dataclass(frozen=True)
class MetricDef:
    id: str
    title: str  # fairness panel name
    stat_label: str  # performance panel name
    criterion: str  # phrase used in verdict sentences
    numerator: tuple[int, ...]
    denominator: tuple[int, ...]
    uses_cutoff: bool = True
    conditional: bool = False


_DEFS = (
    MetricDef("statistical_parity", "Statistical Parity", "Positive Prediction Rate",
              "statistical parity", (TP, FP), (N,)),
    MetricDef("conditional_statistical_parity", "Conditional Statistical Parity",
              "Positive Prediction Rate", "conditional statistical parity", (TP, FP), (N,),
              conditional=True),
    MetricDef("equal_opportunity", "Equal Opportunity", "False Negative Rate",
              "equal opportunity", (FN,), (TP, FN)),
    MetricDef("predictive_equality", "Predictive Equality", "False Positive Rate",
              "predictive equality", (FP,), (FP, TN)),
    MetricDef("balance_positive_class", "Balance for Positive Class", "Avg. Predicted Prob.",
              "balance for positive class", (PSUM_POS,), (TP, FN), uses_cutoff=False),
    MetricDef("balance_negative_class", "Balance for Negative Class", "Avg. Predicted Prob.",
              "balance for negative class", (PSUM_NEG,), (FP, TN), uses_cutoff=False),
    MetricDef("positive_predictive_parity", "Positive Predictive Parity",
              "Positive Predictive Value", "positive predictive parity", (TP,), (TP, FP)),
    MetricDef("negative_predictive_parity", "Negative Predictive Parity",
              "Negative Predictive Value", "negative predictive parity", (TN,), (TN, FN)),
    MetricDef("brier_score_parity", "Brier Score Parity", "Brier Score",
              "Brier score parity", (SQERR,), (N,), uses_cutoff=False),
    MetricDef("accuracy_parity", "Overall Accuracy Parity", "Accuracy",
              "overall accuracy parity", (TP, TN), (N,)),
    MetricDef("treatment_equality", "Treatment Equality",
              "(False Negative)/(False Positive) Ratio", "treatment equality", (FN,), (FP,)),
)

METRICS: dict[str, MetricDef] = {d.id: d for d in _DEFS}
METRIC_IDS: tuple[str, ...] = tuple(METRICS)


def metric_def(metric_id: str) -> MetricDef:
    try:
        return METRICS[metric_id]
    except KeyError:
        raise UnknownMetric(
            f"unknown metric {metric_id!r}; expected one of: {', '.join(METRIC_IDS)}"
        ) from None


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class GroupStatistic:
    """Value of one criterion's statistic in each group.

    A value is ``None`` when its denominator is zero in that group.
    """

    metric_id: str
    value_group1: float | None
    value_group2: float | None

    @property
    def defined_group1(self) -> bool:
        return self.value_group1 is not None

    @property
    def defined_group2(self) -> bool:
        return self.value_group2 is not None

    @property
    def defined(self) -> bool:
        return self.defined_group1 and self.defined_group2

    def swapped(self) -> GroupStatistic:
        return GroupStatistic(self.metric_id, self.value_group2, self.value_group1)


class TallyInputs:
    """Per-row bincount keys for fast (weighted) tallies of a table."""

    def __init__(self, t: AuditTable, cutoff: float, rows: np.ndarray | None = None):
        g = t.group.astype(np.intp)
        y = t.outcome.astype(np.intp)
        pred = classify(t, cutoff).astype(np.intp)
        p = t.prob
        self.rows = rows
        if rows is not None:
            g, y, pred, p = g[rows], y[rows], pred[rows], p[rows]
        self.cell_key = g * 4 + y * 2 + pred
        self.class_key = g * 2 + y
        self.group_key = g
        self.prob = p
        self.sqerr = (p - y) ** 2

    def tally(self, weights: np.ndarray | None = None) -> np.ndarray:
        """(2, 8) array of per-group sums, optionally weighted per row."""
        if weights is not None and self.rows is not None:
            weights = weights[self.rows]
        cells = np.bincount(self.cell_key, weights=weights, minlength=8).reshape(2, 2, 2)
        pw = self.prob if weights is None else self.prob * weights
        psums = np.bincount(self.class_key, weights=pw, minlength=4).reshape(2, 2)
        sw = self.sqerr if weights is None else self.sqerr * weights
        sq = np.bincount(self.group_key, weights=sw, minlength=2)

        out = np.empty((2, TALLY_WIDTH))
        # cells indexed [group, outcome, prediction]
        out[:, TN] = cells[:, 0, 0]
        out[:, FP] = cells[:, 0, 1]
        out[:, FN] = cells[:, 1, 0]
        out[:, TP] = cells[:, 1, 1]
        out[:, N] = cells.reshape(2, 4).sum(axis=1)
        out[:, PSUM_NEG] = psums[:, 0]
        out[:, PSUM_POS] = psums[:, 1]
        out[:, SQERR] = sq
        return out


def evaluate(tally: np.ndarray, metric_id: str) -> tuple[np.ndarray, np.ndarray]:
    """Statistic values and defined-mask from tallies of shape (..., 2, 8).

    Undefined entries hold NaN in the value array; callers must consult the
    mask.
    """
    d = metric_def(metric_id)
    num = tally[..., list(d.numerator)].sum(axis=-1)
    den = tally[..., list(d.denominator)].sum(axis=-1)
    defined = den > 0
    values = np.full(den.shape, np.nan)
    np.divide(num, den, out=values, where=defined)
    return values, defined


def statistic_from_tally(tally: np.ndarray, metric_id: str) -> GroupStatistic:
    values, defined = evaluate(tally, metric_id)
    v1 = float(values[0]) if defined[0] else None
    v2 = float(values[1]) if defined[1] else None
    return GroupStatistic(metric_id, v1, v2)


def confusion_counts(t: AuditTable, rule: Cutoff) -> tuple[ConfusionCounts, ConfusionCounts]:
    tally = TallyInputs(t, as_cutoff(rule)).tally()
    return tuple(
        ConfusionCounts(int(row[TP]), int(row[FP]), int(row[TN]), int(row[FN])) for row in tally
    )


def group_statistic(
    t: AuditTable,
    metric_id: str,
    rule: Cutoff = 0.5,
    condition: ConditionSpec | None = None,
) -> GroupStatistic:
    """Dispatch to one criterion by id.

    ``condition`` (with its column bound) is required for conditional
    statistical parity and ignored otherwise.
    """
    d = metric_def(metric_id)
    if d.conditional:
        if condition is None or condition.column is None:
            raise InvalidParameter(f"{metric_id} needs a condition with a column")
        t = filter_rows(t, condition.column, condition)
    return statistic_from_tally(TallyInputs(t, as_cutoff(rule)).tally(), metric_id)


def statistical_parity(t: AuditTable, rule: Cutoff = 0.5) -> GroupStatistic:
    """Positive prediction rate per group."""
    return group_statistic(t, "statistical_parity", rule)


def conditional_statistical_parity(
    t: AuditTable, col: str, c: ConditionSpec, rule: Cutoff = 0.5
) -> GroupStatistic:
    """Positive prediction rate per group among rows satisfying ``c`` on ``col``."""
    return group_statistic(t, "conditional_statistical_parity", rule, c.bind(col))


def equal_opportunity(t: AuditTable, rule: Cutoff = 0.5) -> GroupStatistic:
    """False negative rate per group."""
    return group_statistic(t, "equal_opportunity", rule)


def predictive_equality(t: AuditTable, rule: Cutoff = 0.5) -> GroupStatistic:
    """False positive rate per group."""
    return group_statistic(t, "predictive_equality", rule)


def balance_positive_class(t: AuditTable) -> GroupStatistic:
    return group_statistic(t, "balance_positive_class")


def balance_negative_class(t: AuditTable) -> GroupStatistic:
    return group_statistic(t, "balance_negative_class")


def positive_predictive_parity(t: AuditTable, rule: Cutoff = 0.5) -> GroupStatistic:
    return group_statistic(t, "positive_predictive_parity", rule)


def negative_predictive_parity(t: AuditTable, rule: Cutoff = 0.5) -> GroupStatistic:
    return group_statistic(t, "negative_predictive_parity", rule)


def brier_score_parity(t: AuditTable) -> GroupStatistic:
    """Mean squared error of the raw probabilities per group."""
    return group_statistic(t, "brier_score_parity")


def accuracy_parity(t: AuditTable, rule: Cutoff = 0.5) -> GroupStatistic:
    return group_statistic(t, "accuracy_parity", rule)


def treatment_equality(t: AuditTable, rule: Cutoff = 0.5) -> GroupStatistic:
    """False negatives divided by false positives per group."""
    return group_statistic(t, "treatment_equality", rule)
