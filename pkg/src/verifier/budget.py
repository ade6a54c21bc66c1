"""
Budget diagnostics for a realized trajectory.
"""

from dataclasses import dataclass
from typing import Tuple

from ..simulator.episode import Trajectory


@dataclass(frozen=True)
class BudgetSummary:
    """
    Per-round payment sums with their range and mean. A deficit round is
    one where the sum is positive (the designer pays out). An inconsistent
    round is one where the owner receives money or a selected worker pays.
    """

    round_sums: Tuple[float, ...]
    minimum: float
    maximum: float
    mean: float
    deficit_rounds: Tuple[int, ...]
    inconsistent_rounds: Tuple[int, ...]

    @property
    def balanced(self) -> bool:
        return all(total == 0.0 for total in self.round_sums)


def payment_consistency(trajectory: Trajectory) -> Tuple[int, ...]:
    """Rounds where the owner is paid or a selected worker pays."""
    flagged = []
    for outcome in trajectory.outcomes:
        owner_paid = outcome.payments[trajectory.owner] > 0.0
        worker_pays = any(outcome.payments[j] < 0.0
                          for j in outcome.allocation.members if j != trajectory.owner)
        if owner_paid or worker_pays:
            flagged.append(outcome.t)
    return tuple(flagged)


def budget_metrics(trajectory: Trajectory) -> BudgetSummary:
    sums = tuple(outcome.budget for outcome in trajectory.outcomes)
    if not sums:
        return BudgetSummary((), 0.0, 0.0, 0.0, (), ())
    return BudgetSummary(
        round_sums=sums,
        minimum=min(sums),
        maximum=max(sums),
        mean=sum(sums) / len(sums),
        deficit_rounds=tuple(outcome.t for outcome in trajectory.outcomes if outcome.budget > 0.0),
        inconsistent_rounds=payment_consistency(trajectory),
    )
