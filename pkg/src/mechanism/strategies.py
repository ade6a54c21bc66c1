"""
Reporting strategies.

A strategy sees only what its agent observes: the round number, its own
true type in stage 1, and its own true valuation plus its own stage-1
report in stage 2. Other agents' reports are never passed in.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple


class AgentStrategy:
    """Truthful in both stages."""

    def type_report(self, t: int, true_type: int) -> int:
        return true_type

    def value_report(self, t: int, true_value: float, own_type_report: int) -> float:
        return true_value

    @property
    def is_truthful(self) -> bool:
        return True


@dataclass(frozen=True)
class DeviationStrategy(AgentStrategy):
    """
    Truthful except in round `deviation_round`, where the agent reports
    `reported_type` (when given) and shifts its value report by
    `value_shift` or replaces it with `reported_value`.
    """

    deviation_round: int = 0
    reported_type: Optional[int] = None
    value_shift: float = 0.0
    reported_value: Optional[float] = None

    def type_report(self, t: int, true_type: int) -> int:
        if t == self.deviation_round and self.reported_type is not None:
            return self.reported_type
        return true_type

    def value_report(self, t: int, true_value: float, own_type_report: int) -> float:
        if t != self.deviation_round:
            return true_value
        if self.reported_value is not None:
            return self.reported_value
        return true_value + self.value_shift

    @property
    def is_truthful(self) -> bool:
        return self.reported_type is None and self.reported_value is None and self.value_shift == 0.0


TRUTHFUL = AgentStrategy()


@dataclass(frozen=True)
class StrategyProfile:
    """One strategy per agent, plus the designated deviator for single-deviation runs."""

    strategies: Tuple[AgentStrategy, ...]
    deviator: Optional[int] = None
    deviation_round: Optional[int] = None

    def __getitem__(self, agent: int) -> AgentStrategy:
        return self.strategies[agent]

    def __len__(self) -> int:
        return len(self.strategies)

    @property
    def is_truthful(self) -> bool:
        return all(strategy.is_truthful for strategy in self.strategies)

    @classmethod
    def truthful(cls, n: int) -> 'StrategyProfile':
        return cls(tuple(TRUTHFUL for _ in range(n)))

    @classmethod
    def single_deviation(cls, n: int, agent: int, reported_type: Optional[int] = None,
                         value_shift: float = 0.0, reported_value: Optional[float] = None,
                         deviation_round: int = 0) -> 'StrategyProfile':
        """Everyone truthful except `agent` in round `deviation_round`."""
        if not 0 <= agent < n:
            raise ValueError(f"deviating agent {agent} out of range for {n} agents")
        deviation = DeviationStrategy(deviation_round, reported_type, value_shift, reported_value)
        strategies: Sequence[AgentStrategy] = [deviation if j == agent else TRUTHFUL for j in range(n)]
        return cls(tuple(strategies), agent, deviation_round)
