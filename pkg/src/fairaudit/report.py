"""Combined fairness reports, single-metric evaluations and their rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Any

from .errors import InvalidParameter
from .ingest import AuditTable, ConditionSpec, Cutoff, as_cutoff
from .inference import (
    BootstrapConfig,
    EstimateWithCI,
    MetricResult,
    bootstrap_many,
    bootstrap_metric,
)
from .metrics import METRIC_IDS, METRICS, GroupStatistic, metric_def

RENDER_FORMATS = ("table", "json", "markdown")
DASH = "—"
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PerformanceRow:
    metric: str
    value_group1: float | None
    value_group2: float | None


@dataclass(frozen=True)
class ReportMetadata:
    groups: tuple[str, str]
    cutoff: float
    alpha: float
    n_boot: int
    seed: int
    max_degenerate_fraction: float
    n: int
    condition: str | None = None


@dataclass(frozen=True)
class FairnessReport:
    metadata: ReportMetadata
    performance: list[PerformanceRow] = field(default_factory=list)
    fairness: list[MetricResult] = field(default_factory=list)


def _metadata(t: AuditTable, rule: Cutoff, cond: ConditionSpec | None, cfg: BootstrapConfig):
    return ReportMetadata(
        groups=t.labels,
        cutoff=as_cutoff(rule),
        alpha=cfg.alpha,
        n_boot=cfg.n_boot,
        seed=cfg.seed,
        max_degenerate_fraction=cfg.max_degenerate_fraction,
        n=t.n,
        condition=cond.describe() if cond is not None else None,
    )


def get_fairness_metrics(
    t: AuditTable,
    rule: Cutoff = 0.5,
    cond: ConditionSpec | None = None,
    cfg: BootstrapConfig | None = None,
    threads: int = 1,
) -> FairnessReport:
    """Evaluate every criterion in the standard order.

    Conditional statistical parity is included only when ``cond`` (with a
    column) is given. A metric that cannot be estimated becomes an undefined
    row; only table-level and condition errors propagate.
    """
    cfg = cfg or BootstrapConfig()
    ids = [m for m in METRIC_IDS if cond is not None or not METRICS[m].conditional]
    results = bootstrap_many(t, ids, rule, cond, cfg, threads, strict=False)
    performance = [
        PerformanceRow(
            METRICS[r.metric_id].stat_label, r.group_stat.value_group1, r.group_stat.value_group2
        )
        for r in results
    ]
    return FairnessReport(_metadata(t, rule, cond, cfg), performance, results)


def verdict(metric_id: str, diff_significant: bool, ratio_significant: bool) -> str:
    criterion = metric_def(metric_id).criterion
    if diff_significant or ratio_significant:
        return f"There is evidence that the model does not satisfy {criterion}."
    return f"There is insufficient evidence that the model does not satisfy {criterion}."


@dataclass(frozen=True)
class SingleEvaluation:
    metadata: ReportMetadata
    result: MetricResult
    verdict: str


def eval_single(
    t: AuditTable,
    metric_id: str,
    rule: Cutoff = 0.5,
    cond: ConditionSpec | None = None,
    cfg: BootstrapConfig | None = None,
    threads: int = 1,
) -> SingleEvaluation:
    cfg = cfg or BootstrapConfig()
    result = bootstrap_metric(t, metric_id, rule, cond, cfg, threads)
    if not metric_def(metric_id).conditional:
        cond = None
    return SingleEvaluation(
        _metadata(t, rule, cond, cfg),
        result,
        verdict(metric_id, result.diff_significant, result.ratio_significant),
    )


# ---------------------------------------------------------------- formatting


def fmt2(x: float | None) -> str:
    """Two decimals, half away from zero; dash for undefined."""
    if x is None:
        return DASH
    d = Decimal(repr(float(x))).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
    if d == 0:
        d = abs(d)
    return f"{d:.2f}"


def fmt_ci(e: EstimateWithCI | None) -> str:
    if e is None:
        return DASH
    return f"[{fmt2(e.lower)}, {fmt2(e.upper)}]"


def _level(alpha: float) -> str:
    return f"{(1 - alpha) * 100:.10g}%"


def _estimate_cells(r: MetricResult) -> list[str]:
    return [
        fmt2(r.difference.point) if r.difference else DASH,
        fmt_ci(r.difference),
        fmt2(r.ratio.point) if r.ratio else DASH,
        fmt_ci(r.ratio),
    ]


def _estimate_headers(alpha: float) -> list[str]:
    level = _level(alpha)
    return ["Difference", f"{level} Diff CI", "Ratio", f"{level} Ratio CI"]


def fairness_row(r: MetricResult) -> list[str]:
    return [METRICS[r.metric_id].title, *_estimate_cells(r)]


def _plain_table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(row[i]) for row in [header, *rows]) for i in range(len(header))]

    def line(cells: list[str]) -> str:
        first = cells[0].ljust(widths[0])
        rest = (c.rjust(w) for c, w in zip(cells[1:], widths[1:]))
        return "  ".join([first, *rest]).rstrip()

    return "\n".join(line(r) for r in [header, *rows])


def _markdown_table(header: list[str], rows: list[list[str]]) -> str:
    aligns = [":--"] + ["--:"] * (len(header) - 1)
    out = ["| " + " | ".join(header) + " |", "| " + " | ".join(aligns) + " |"]
    out += ["| " + " | ".join(r) + " |" for r in rows]
    return "\n".join(out)


def _metadata_line(m: ReportMetadata) -> str:
    parts = [
        f"groups: {m.groups[0]} vs {m.groups[1]} (reference)",
        f"n={m.n}",
        f"cutoff={m.cutoff:g}",
        f"alpha={m.alpha:g}",
        f"bootstrap={m.n_boot}",
        f"seed={m.seed}",
    ]
    if m.condition:
        parts.append(f"condition: {m.condition}")
    return ", ".join(parts)


def _panels(report: FairnessReport) -> tuple[tuple[list[str], list[list[str]]], ...]:
    g1, g2 = report.metadata.groups
    perf = (
        ["Metric", f"Group{g1}", f"Group{g2}"],
        [[p.metric, fmt2(p.value_group1), fmt2(p.value_group2)] for p in report.performance],
    )
    fair = (
        ["Metric", *_estimate_headers(report.metadata.alpha)],
        [fairness_row(r) for r in report.fairness],
    )
    return perf, fair


def _single_panel(ev: SingleEvaluation) -> tuple[list[str], list[list[str]]]:
    g1, g2 = ev.metadata.groups
    r = ev.result
    stat = r.group_stat
    header = ["Metric", f"Group{g1}", f"Group{g2}", *_estimate_headers(ev.metadata.alpha)]
    row = [
        METRICS[r.metric_id].stat_label,
        fmt2(stat.value_group1),
        fmt2(stat.value_group2),
        *_estimate_cells(r),
    ]
    return header, [row]


def render(report: FairnessReport | SingleEvaluation, format: str = "table") -> str:
    """Render a combined report or a single-metric evaluation as text."""
    if format not in RENDER_FORMATS:
        raise InvalidParameter(f"unknown output format {format!r}; expected one of {RENDER_FORMATS}")
    if format == "json":
        return json.dumps(to_dict(report), indent=2, ensure_ascii=False) + "\n"

    table = _plain_table if format == "table" else _markdown_table
    meta = _metadata_line(report.metadata)
    if isinstance(report, SingleEvaluation):
        header, rows = _single_panel(report)
        if format == "table":
            return f"{report.verdict}\n{table(header, rows)}\n"
        return f"{report.verdict}\n\n_{meta}_\n\n{table(header, rows)}\n"

    (ph, prow), (fh, frow) = _panels(report)
    notes = [f"{METRICS[r.metric_id].title}: {r.error}" for r in report.fairness if r.error]
    if format == "table":
        text = f"{meta}\n\nPerformance\n{table(ph, prow)}\n\nFairness\n{table(fh, frow)}\n"
        if notes:
            text += "\nNot estimable:\n" + "".join(f"  {n}\n" for n in notes)
        return text
    text = (
        f"_{meta}_\n\n### Performance\n\n{table(ph, prow)}\n\n"
        f"### Fairness\n\n{table(fh, frow)}\n"
    )
    if notes:
        text += "\nNot estimable:\n\n" + "".join(f"- {n}\n" for n in notes)
    return text


# ---------------------------------------------------------------- JSON


def _estimate_to_dict(e: EstimateWithCI | None) -> dict[str, Any] | None:
    if e is None:
        return None
    return {"point": e.point, "lower": e.lower, "upper": e.upper, "n_effective": e.n_effective}


def _estimate_from_dict(d: dict[str, Any] | None) -> EstimateWithCI | None:
    if d is None:
        return None
    return EstimateWithCI(d["point"], d["lower"], d["upper"], d["n_effective"])


def _result_to_dict(r: MetricResult, groups: tuple[str, str]) -> dict[str, Any]:
    s = r.group_stat
    return {
        "metric": METRICS[r.metric_id].title,
        "metric_id": r.metric_id,
        "group_values": {groups[0]: s.value_group1, groups[1]: s.value_group2},
        "difference": _estimate_to_dict(r.difference),
        "ratio": _estimate_to_dict(r.ratio),
        "significant": {"difference": r.diff_significant, "ratio": r.ratio_significant},
        "defined": r.defined,
        "error": r.error,
    }


def _result_from_dict(d: dict[str, Any], groups: tuple[str, str]) -> MetricResult:
    values = d["group_values"]
    return MetricResult(
        d["metric_id"],
        GroupStatistic(d["metric_id"], values[groups[0]], values[groups[1]]),
        _estimate_from_dict(d["difference"]),
        _estimate_from_dict(d["ratio"]),
        d["significant"]["difference"],
        d["significant"]["ratio"],
        d.get("error"),
    )


def _metadata_to_dict(m: ReportMetadata) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "groups": list(m.groups),
        "cutoff": m.cutoff,
        "alpha": m.alpha,
        "n_boot": m.n_boot,
        "seed": m.seed,
        "max_degenerate_fraction": m.max_degenerate_fraction,
        "n": m.n,
        "condition": m.condition,
    }


def _metadata_from_dict(d: dict[str, Any]) -> ReportMetadata:
    return ReportMetadata(
        groups=tuple(d["groups"]),
        cutoff=d["cutoff"],
        alpha=d["alpha"],
        n_boot=d["n_boot"],
        seed=d["seed"],
        max_degenerate_fraction=d["max_degenerate_fraction"],
        n=d["n"],
        condition=d["condition"],
    )


def to_dict(report: FairnessReport | SingleEvaluation) -> dict[str, Any]:
    groups = report.metadata.groups
    meta = _metadata_to_dict(report.metadata)
    if isinstance(report, SingleEvaluation):
        return {
            "metadata": meta,
            "result": _result_to_dict(report.result, groups),
            "verdict": report.verdict,
        }
    return {
        "metadata": meta,
        "performance": [
            {"metric": p.metric, "group_values": {groups[0]: p.value_group1, groups[1]: p.value_group2}}
            for p in report.performance
        ],
        "fairness": [_result_to_dict(r, groups) for r in report.fairness],
    }


def from_dict(d: dict[str, Any]) -> FairnessReport | SingleEvaluation:
    meta = _metadata_from_dict(d["metadata"])
    groups = meta.groups
    if "result" in d:
        return SingleEvaluation(meta, _result_from_dict(d["result"], groups), d["verdict"])
    performance = [
        PerformanceRow(p["metric"], p["group_values"][groups[0]], p["group_values"][groups[1]])
        for p in d["performance"]
    ]
    fairness = [_result_from_dict(r, groups) for r in d["fairness"]]
    return FairnessReport(meta, performance, fairness)


def from_json(text: str) -> FairnessReport | SingleEvaluation:
    return from_dict(json.loads(text))
