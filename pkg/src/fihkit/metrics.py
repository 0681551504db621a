"""Evaluation of a sanitization: raw changes, side effects, information loss."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Mapping

from .dataset import TransactionDatabase
from .miner import FrequentSet, mine_frequent, support_map


class IntegrityError(RuntimeError):
    """The sanitized database gained frequent itemsets it should not have."""


@dataclass(frozen=True)
class MetricsReport:
    algorithm_id: str
    scenario_id: str
    raw_changes: int
    side_effects: int
    information_loss: Fraction
    cpu_time: float
    hidden_ok: bool

    def as_row(self) -> dict:
        row = asdict(self)
        row["information_loss"] = float(self.information_loss)
        return row


def information_loss(revised_supports: Mapping, sanitized: TransactionDatabase, items_only: bool = False) -> Fraction:
    """Summed absolute support error over the revised frequent set, normalized by its total support.

    With ``items_only`` the sums run over its single items instead.
    """
    keys = [x for x in revised_supports if not items_only or len(x) == 1]
    total = sum(int(revised_supports[x]) for x in keys)
    if total == 0:
        return Fraction(0)
    after = support_map(sanitized, keys)
    err = sum(abs(int(revised_supports[x]) - after[tuple(x)]) for x in keys)
    return Fraction(err, total)


def side_effects(revised, after) -> int:
    """|F~| - |F'|; negative means the sanitized data gained frequent itemsets."""
    se = len(revised) - len(after)
    if se < 0:
        raise IntegrityError(f"sanitized database has {-se} more frequent itemsets than the revised set")
    return se


def raw_changes(plan) -> int:
    return len(plan.deletions)


def hidden(sanitized: TransactionDatabase, sensitive, sigma_min: int) -> bool:
    return all(c < sigma_min for c in support_map(sanitized, sensitive).values())


def evaluate(
    db: TransactionDatabase,
    result,
    frequent: FrequentSet,
    revised: FrequentSet,
    sigma_min: int,
    scenario_id: str = "",
    items_only: bool = False,
) -> MetricsReport:
    """Re-mine the sanitized data and fill every metric.

    The run is hidden iff no itemset of ``frequent`` outside ``revised``
    (the sensitive itemsets and their supersets) is still frequent. If one
    is, the run is flagged and side effects count only the revised set.
    """
    sanitized = result.sanitized
    after = mine_frequent(sanitized, sigma_min)
    ok = not any(x in after for x in frequent if x not in revised)
    if not ok:
        after = FrequentSet({x: c for x, c in after.items() if x in revised}, sigma_min, _sorted=True)
    return MetricsReport(
        algorithm_id=result.plan.algorithm_id,
        scenario_id=scenario_id,
        raw_changes=raw_changes(result.plan),
        side_effects=side_effects(revised, after),
        information_loss=information_loss(revised, sanitized, items_only),
        cpu_time=round(float(result.plan.wall_time), 3),
        hidden_ok=ok,
    )
