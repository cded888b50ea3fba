import json

import pytest

from fairaudit import BootstrapConfig, GroupStatistic, MetricResult, parse_condition, simulate_table
from fairaudit.errors import InvalidParameter
from fairaudit.inference import EstimateWithCI
from fairaudit.metrics import METRIC_IDS, METRICS
from fairaudit.report import (
    DASH,
    FairnessReport,
    ReportMetadata,
    eval_single,
    fairness_row,
    fmt2,
    from_json,
    get_fairness_metrics,
    render,
    verdict,
)

CFG = BootstrapConfig(n_boot=200, seed=3)


def squash(s):
    return " ".join(s.split())


def result(metric_id, diff, dci, ratio, rci, values=(0.5, 0.5)):
    d = EstimateWithCI(diff, *dci, 1000)
    r = EstimateWithCI(ratio, *rci, 1000)
    return MetricResult(
        metric_id, GroupStatistic(metric_id, *values), d, r, d.excludes(0.0), r.excludes(1.0)
    )


def test_hand_table_report_has_ten_rows(hand_table):
    rep = get_fairness_metrics(hand_table, 0.5, cfg=CFG)
    assert [r.metric_id for r in rep.fairness] == [
        m for m in METRIC_IDS if m != "conditional_statistical_parity"
    ]
    assert len(rep.performance) == 10
    te = rep.fairness[-1]
    assert te.group_stat.defined_group1 and not te.group_stat.defined_group2
    assert te.difference is None and te.ratio is None
    assert "UndefinedPointEstimate" in te.error
    # other rows are still computed
    assert rep.fairness[0].difference is not None
    text = render(rep)
    assert squash(f"Treatment Equality {DASH} {DASH} {DASH} {DASH}") in squash(text)


def test_conditional_report_has_eleven_aligned_rows():
    t = simulate_table(400, seed=1)
    rep = get_fairness_metrics(t, 0.41, parse_condition(">=60", "age"), CFG)
    assert [r.metric_id for r in rep.fairness] == list(METRIC_IDS)
    assert [p.metric for p in rep.performance] == [METRICS[m].stat_label for m in METRIC_IDS]
    for p, r in zip(rep.performance, rep.fairness):
        assert (p.value_group1, p.value_group2) == (r.group_stat.value_group1, r.group_stat.value_group2)
    assert rep.metadata.condition == "age >= 60"
    assert rep.metadata.cutoff == 0.41


def test_render_paper_row():
    r = result("statistical_parity", 0.08, (0.04, 0.12), 2.00, (1.41, 2.83))
    assert squash(" ".join(fairness_row(r))) == "Statistical Parity 0.08 [0.04, 0.12] 2.00 [1.41, 2.83]"


@pytest.mark.parametrize(
    "x, text",
    [(0.125, "0.13"), (-0.125, "-0.13"), (0.005, "0.01"), (-0.001, "0.00"), (2.0, "2.00"),
     (0.0, "0.00"), (1.005, "1.01"), (None, DASH)],
)
def test_fmt2_half_away_from_zero(x, text):
    assert fmt2(x) == text


def test_verdicts():
    eo = result("equal_opportunity", -0.19, (-0.33, -0.05), 1.83, (1.11, 3.0))
    assert verdict(eo.metric_id, eo.diff_significant, eo.ratio_significant) == (
        "There is evidence that the model does not satisfy equal opportunity."
    )
    npp = result("negative_predictive_parity", 0.01, (-0.15, 0.17), 1.01, (0.79, 1.29))
    assert verdict(npp.metric_id, npp.diff_significant, npp.ratio_significant) == (
        "There is insufficient evidence that the model does not satisfy negative predictive parity."
    )
    flat = result("statistical_parity", 0.0, (0.0, 0.0), 1.0, (1.0, 1.0))
    assert not flat.diff_significant and not flat.ratio_significant


def test_eval_single_table_output():
    t = simulate_table(2000, seed=5)
    ev = eval_single(t, "equal_opportunity", 0.5, cfg=CFG)
    text = render(ev)
    first, header, row = text.splitlines()
    assert first == verdict("equal_opportunity", ev.result.diff_significant, ev.result.ratio_significant)
    assert squash(header) == "Metric GroupA GroupB Difference 95% Diff CI Ratio 95% Ratio CI"
    assert row.startswith("False Negative Rate")


def test_alpha_in_headers():
    t = simulate_table(300, seed=5)
    rep = get_fairness_metrics(t, 0.5, cfg=BootstrapConfig(n_boot=50, alpha=0.1))
    assert "90% Diff CI" in render(rep)
    rep = get_fairness_metrics(t, 0.5, cfg=BootstrapConfig(n_boot=50, alpha=0.025))
    assert "97.5% Ratio CI" in render(rep)


def test_json_round_trip_report():
    t = simulate_table(300, seed=2)
    rep = get_fairness_metrics(t, 0.41, parse_condition(">=60", "age"), CFG)
    text = render(rep, "json")
    assert from_json(text) == rep
    data = json.loads(text)
    assert set(data) == {"metadata", "performance", "fairness"}
    row = data["fairness"][0]
    assert set(row) >= {"metric", "group_values", "difference", "ratio", "significant", "defined"}
    assert set(row["difference"]) >= {"point", "lower", "upper"}
    assert row["group_values"] == {
        "A": rep.fairness[0].group_stat.value_group1,
        "B": rep.fairness[0].group_stat.value_group2,
    }


def test_json_round_trip_with_undefined_rows(hand_table):
    rep = get_fairness_metrics(hand_table, 0.5, cfg=CFG)
    data = json.loads(render(rep, "json"))
    te = data["fairness"][-1]
    assert te["defined"] is False and te["difference"] is None
    assert te["group_values"]["B"] is None
    assert from_json(render(rep, "json")) == rep


def test_json_round_trip_single():
    t = simulate_table(300, seed=2)
    ev = eval_single(t, "brier_score_parity", 0.5, cfg=CFG)
    assert from_json(render(ev, "json")) == ev


def test_markdown_mirrors_table():
    t = simulate_table(300, seed=2)
    rep = get_fairness_metrics(t, 0.5, cfg=CFG)
    md = render(rep, "markdown")
    plain = render(rep, "table")
    for r in rep.fairness:
        cells = fairness_row(r)
        assert "| " + " | ".join(cells) + " |" in md
        assert squash(" ".join(cells)) in squash(plain)


def test_render_unknown_format():
    rep = FairnessReport(ReportMetadata(("A", "B"), 0.5, 0.05, 10, 1, 0.1, 4))
    with pytest.raises(InvalidParameter):
        render(rep, "html")
