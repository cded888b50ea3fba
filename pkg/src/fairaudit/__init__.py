"""Group fairness auditing for binary classifiers with bootstrap confidence intervals."""

__version__ = "0.1.0"

from .errors import FairAuditError, InferenceError, ValidationError
from .ingest import (
    AuditTable,
    ColumnMap,
    ConditionSpec,
    CutoffRule,
    classify,
    filter_rows,
    load_table,
    parse_condition,
)
from .inference import (
    BootstrapConfig,
    EstimateWithCI,
    MetricResult,
    bootstrap_metric,
    percentile_ci,
    resample_indices,
)
from .metrics import METRIC_IDS, ConfusionCounts, GroupStatistic, confusion_counts, group_statistic
from .report import FairnessReport, eval_single, get_fairness_metrics, render
from .demo import DemoDesign, generate_demo, simulate_table

__all__ = [
    "AuditTable",
    "BootstrapConfig",
    "ColumnMap",
    "ConditionSpec",
    "ConfusionCounts",
    "CutoffRule",
    "DemoDesign",
    "EstimateWithCI",
    "FairAuditError",
    "FairnessReport",
    "GroupStatistic",
    "InferenceError",
    "METRIC_IDS",
    "MetricResult",
    "ValidationError",
    "bootstrap_metric",
    "classify",
    "confusion_counts",
    "eval_single",
    "filter_rows",
    "generate_demo",
    "get_fairness_metrics",
    "group_statistic",
    "load_table",
    "parse_condition",
    "percentile_ci",
    "render",
    "resample_indices",
    "simulate_table",
]
