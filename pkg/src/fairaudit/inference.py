"""Percentile-bootstrap intervals for group differences and ratios.

Replicate ``b`` resamples whole rows of the table with replacement using a
random stream derived from ``(seed, b)`` alone, so results do not depend on
how replicates are spread across threads. Replicate tallies are stored by
replicate index before any quantile is taken.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    EmptyReplicateSet,
    InferenceError,
    InvalidParameter,
    TooManyDegenerateReplicates,
    UndefinedPointEstimate,
)
from .ingest import AuditTable, ConditionSpec, Cutoff, as_cutoff, condition_mask, filter_rows
from .metrics import GroupStatistic, TallyInputs, evaluate, metric_def, statistic_from_tally


@dataclass(frozen=True)
class BootstrapConfig:
    n_boot: int = 1000
    alpha: float = 0.05
    seed: int = 42
    max_degenerate_fraction: float = 0.10

    def __post_init__(self) -> None:
        if isinstance(self.n_boot, bool) or not isinstance(self.n_boot, (int, np.integer)) or self.n_boot < 2:
            raise InvalidParameter(f"n_boot must be an integer >= 2, got {self.n_boot!r}")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidParameter(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2**64:
            raise InvalidParameter(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not 0.0 <= self.max_degenerate_fraction < 1.0:
            raise InvalidParameter(
                f"max_degenerate_fraction must lie in [0, 1), got {self.max_degenerate_fraction!r}"
            )


@dataclass(frozen=True)
class EstimateWithCI:
    point: float
    lower: float
    upper: float
    n_effective: int

    def excludes(self, null: float) -> bool:
        return self.lower > null or self.upper < null


@dataclass(frozen=True)
class MetricResult:
    """One criterion's per-group values with difference and ratio estimates.

    ``difference`` is None when the metric could not be evaluated (``error``
    then says why). ``ratio`` is None when group 2's value is zero, either on
    the full table or in too many replicates.
    """

    metric_id: str
    group_stat: GroupStatistic
    difference: EstimateWithCI | None
    ratio: EstimateWithCI | None
    diff_significant: bool
    ratio_significant: bool
    error: str | None = None

    @property
    def defined(self) -> bool:
        return self.difference is not None

    @property
    def significant(self) -> bool:
        return self.diff_significant or self.ratio_significant


def resample_indices(n: int, replicate_id: int, cfg: BootstrapConfig) -> np.ndarray:
    """Row indices for one bootstrap replicate, drawn uniformly with replacement."""
    if n < 1:
        raise InvalidParameter(f"cannot resample {n} rows")
    ss = np.random.SeedSequence(int(cfg.seed), spawn_key=(int(replicate_id),))
    return np.random.default_rng(ss).integers(0, n, size=n)


def percentile_ci(values: Sequence[float] | np.ndarray, alpha: float) -> tuple[float, float]:
    """Empirical alpha/2 and 1 - alpha/2 quantiles (linear interpolation)."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise EmptyReplicateSet("no bootstrap replicates to summarize")
    if not 0.0 < alpha < 1.0:
        raise InvalidParameter(f"alpha must lie in (0, 1), got {alpha!r}")
    lo, hi = np.quantile(values, [alpha / 2, 1 - alpha / 2], method="linear")
    return float(lo), float(hi)


def default_threads() -> int:
    return os.cpu_count() or 1


def replicate_tallies(
    inputs: Sequence[TallyInputs], n: int, cfg: BootstrapConfig, threads: int = 1
) -> np.ndarray:
    """Tallies of every replicate, shape (len(inputs), n_boot, 2, 8)."""
    out = np.empty((len(inputs), cfg.n_boot, 2, 8))

    def work(ids: np.ndarray) -> None:
        for b in ids:
            w = np.bincount(resample_indices(n, b, cfg), minlength=n).astype(np.float64)
            for k, inp in enumerate(inputs):
                out[k, b] = inp.tally(w)

    chunks = np.array_split(np.arange(cfg.n_boot), max(1, min(threads, cfg.n_boot)))
    if threads <= 1:
        work(chunks[0])
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            # list() re-raises worker exceptions
            list(pool.map(work, chunks))
    return out


def summarize(
    metric_id: str, point_tally: np.ndarray, rep_tallies: np.ndarray, cfg: BootstrapConfig
) -> MetricResult:
    """Turn point and replicate tallies into a MetricResult.

    Replicates in which either group's statistic is undefined (including a
    group being absent) are dropped. Ratio replicates additionally need a
    nonzero group-2 value.
    """
    stat = statistic_from_tally(point_tally, metric_id)
    if not stat.defined:
        which = [lab for lab, ok in (("group 1", stat.defined_group1),
                                     ("group 2", stat.defined_group2)) if not ok]
        raise UndefinedPointEstimate(
            f"{metric_id}: zero denominator in {' and '.join(which)} on the full table"
        )
    v1, v2 = stat.value_group1, stat.value_group2

    values, defined = evaluate(rep_tallies, metric_id)
    keep = defined.all(axis=-1)
    n_keep = int(keep.sum())
    dropped = cfg.n_boot - n_keep
    if dropped > cfg.max_degenerate_fraction * cfg.n_boot:
        raise TooManyDegenerateReplicates(
            f"{metric_id}: {dropped} of {cfg.n_boot} replicates were degenerate "
            f"(limit {cfg.max_degenerate_fraction:.0%})"
        )
    kept = values[keep]
    diffs = kept[:, 0] - kept[:, 1]
    lo, hi = percentile_ci(diffs, cfg.alpha)
    difference = EstimateWithCI(v1 - v2, lo, hi, n_keep)

    ratio = None
    if v2 > 0:
        rkeep = kept[:, 1] > 0
        n_ratio = int(rkeep.sum())
        if cfg.n_boot - n_ratio <= cfg.max_degenerate_fraction * cfg.n_boot:
            ratios = kept[rkeep, 0] / kept[rkeep, 1]
            rlo, rhi = percentile_ci(ratios, cfg.alpha)
            ratio = EstimateWithCI(v1 / v2, rlo, rhi, n_ratio)

    return MetricResult(
        metric_id,
        stat,
        difference,
        ratio,
        diff_significant=difference.excludes(0.0),
        ratio_significant=ratio is not None and ratio.excludes(1.0),
    )


def undefined_result(metric_id: str, stat: GroupStatistic, err: Exception) -> MetricResult:
    return MetricResult(metric_id, stat, None, None, False, False, error=f"{type(err).__name__}: {err}")


def bootstrap_many(
    t: AuditTable,
    metric_ids: Sequence[str],
    rule: Cutoff,
    cond: ConditionSpec | None,
    cfg: BootstrapConfig,
    threads: int = 1,
    strict: bool = True,
) -> list[MetricResult]:
    """Bootstrap several metrics over one shared set of replicates.

    With ``strict=False`` inference failures become undefined results
    instead of exceptions. Condition errors always propagate.
    """
    cutoff = as_cutoff(rule)
    defs = [metric_def(m) for m in metric_ids]
    inputs = [TallyInputs(t, cutoff)]
    cond_slot = None
    if any(d.conditional for d in defs):
        if cond is None or cond.column is None:
            raise InvalidParameter("conditional statistical parity needs a condition column and expression")
        filter_rows(t, cond.column, cond)  # validates the condition on the full table
        rows = np.flatnonzero(condition_mask(t, cond.column, cond))
        inputs.append(TallyInputs(t, cutoff, rows))
        cond_slot = 1

    point = [inp.tally() for inp in inputs]
    reps = replicate_tallies(inputs, t.n, cfg, threads)

    results = []
    for d in defs:
        k = cond_slot if d.conditional else 0
        try:
            results.append(summarize(d.id, point[k], reps[k], cfg))
        except InferenceError as err:
            if strict:
                raise
            results.append(undefined_result(d.id, statistic_from_tally(point[k], d.id), err))
    return results


def bootstrap_metric(
    t: AuditTable,
    metric_id: str,
    rule: Cutoff = 0.5,
    cond: ConditionSpec | None = None,
    cfg: BootstrapConfig | None = None,
    threads: int = 1,
) -> MetricResult:
    """Point estimates and percentile-bootstrap CIs for one criterion.

    For conditional statistical parity the full table is resampled and the
    condition applied within each replicate, so the subgroup size varies
    across replicates.
    """
    return bootstrap_many(t, [metric_id], rule, cond, cfg or BootstrapConfig(), threads)[0]
