"""Synthetic prediction tables with planted group disparities.

Generating process, per row:

* group is ``"A"`` with probability ``group_share``, else ``"B"``;
  ``"B"`` is the reference group;
* outcome ``y ~ Bernoulli(base_rates[group])``;
* a positive (y=1) gets ``prob ~ U[0, 0.5)`` with probability equal to the
  group's false negative rate and ``prob ~ U[0.5, 1)`` otherwise; a
  negative gets ``prob ~ U[0.5, 1)`` with probability equal to the group's
  false positive rate and ``prob ~ U[0, 0.5)`` otherwise;
* ``age`` is an independent integer uniform on 18..90, for conditioning.

At cutoff 0.5 the population error rates are therefore exactly
``fnr_B = fnr_reference``, ``fnr_A = fnr_reference + fnr_gap`` and likewise
for false positives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidPlantedParameters
from .ingest import AuditTable, ColumnMap

DEMO_CUTOFF = 0.5
DEMO_COLUMNS = ColumnMap("y", "g", "p", ("age",))
GROUPS = ("A", "B")


@dataclass(frozen=True)
class DemoDesign:
    fnr_gap: float = 0.0
    fpr_gap: float = 0.0
    base_rates: tuple[float, float] = (0.3, 0.3)
    fnr_reference: float = 0.2
    fpr_reference: float = 0.1
    group_share: float = 0.5

    def __post_init__(self) -> None:
        if len(self.base_rates) != 2:
            raise InvalidPlantedParameters("base_rates needs one rate per group")
        checks = {
            "base rate of A": self.base_rates[0],
            "base rate of B": self.base_rates[1],
            "FNR of A": self.fnr[0],
            "FNR of B": self.fnr[1],
            "FPR of A": self.fpr[0],
            "FPR of B": self.fpr[1],
        }
        for name, value in checks.items():
            if not 0.0 <= value <= 1.0:
                raise InvalidPlantedParameters(f"{name} = {value:g} outside [0, 1]")
        if not 0.0 < self.group_share < 1.0:
            raise InvalidPlantedParameters(f"group_share = {self.group_share:g} outside (0, 1)")

    @property
    def fnr(self) -> tuple[float, float]:
        return (self.fnr_reference + self.fnr_gap, self.fnr_reference)

    @property
    def fpr(self) -> tuple[float, float]:
        return (self.fpr_reference + self.fpr_gap, self.fpr_reference)

    def positive_prediction_rate(self, group: int) -> float:
        base = self.base_rates[group]
        return base * (1 - self.fnr[group]) + (1 - base) * self.fpr[group]

    @property
    def statistical_parity_difference(self) -> float:
        return self.positive_prediction_rate(0) - self.positive_prediction_rate(1)

    @property
    def equal_opportunity_difference(self) -> float:
        return self.fnr_gap

    @property
    def predictive_equality_difference(self) -> float:
        return self.fpr_gap


def simulate_table(n: int, seed: int, design: DemoDesign | None = None) -> AuditTable:
    if n < 10:
        raise InvalidPlantedParameters(f"n must be at least 10, got {n}")
    design = design or DemoDesign()
    rng = np.random.default_rng(seed)
    group = (rng.random(n) >= design.group_share).astype(np.int8)
    base = np.asarray(design.base_rates)[group]
    y = (rng.random(n) < base).astype(np.int8)
    fnr = np.asarray(design.fnr)[group]
    fpr = np.asarray(design.fpr)[group]
    flip = rng.random(n) < np.where(y == 1, fnr, fpr)
    # predicted positive iff (y=1 and not a false negative) or (y=0 and a false positive)
    above = np.where(y == 1, ~flip, flip)
    u = rng.random(n) * 0.5
    prob = np.where(above, 0.5 + u, u)
    age = rng.integers(18, 91, size=n).astype(np.float64)
    if np.unique(group).size < 2:
        raise InvalidPlantedParameters(f"n={n} drew only one group; increase n")
    return AuditTable(y, group, prob, GROUPS, {"age": age})


def generate_demo(n: int, seed: int, design: DemoDesign | None = None) -> str:
    """CSV text (columns y, g, p, age) drawn from ``design``."""
    return simulate_table(n, seed, design).to_csv(DEMO_COLUMNS)
