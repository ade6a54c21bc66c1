"""
One round of a dynamic mechanism.

All three mechanisms share the efficient allocation a*(reported profile)
from the solved policy and differ only in their payment rule:

    MATRIX  p_i = sum_{j!=i} vhat_j + delta * E[W_-i(theta'_-i) | a*, theta_hat]
                  - W_-i(theta_hat_-i) - g(vhat_i, v_i(a*, theta_hat))
    DPM     MATRIX with vhat_j replaced by v_j(a*, theta_hat) and no penalty
    CONST   selected workers receive the fixed price, the owner pays for them
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .penalty import PenaltySpec
from .strategies import StrategyProfile
from ..scenario.model import Allocation, Scenario
from ..solver.tables import MechanismTables
from ..utils.constants import MECHANISMS
from ..utils.error_handling import StrategyDomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RoundOutcome:
    """Everything that happened in one round; penalties are recomputable from the stored fields."""

    t: int
    true_profile: Tuple[int, ...]
    type_reports: Tuple[int, ...]
    allocation: Allocation
    true_values: np.ndarray
    value_reports: Optional[np.ndarray]
    consistent_values: np.ndarray
    payments: np.ndarray
    penalties: np.ndarray

    @property
    def utilities(self) -> np.ndarray:
        return self.true_values + self.payments

    @property
    def budget(self) -> float:
        return float(self.payments.sum())


def const_payment(allocation: Allocation, fixed_price: float, owner: int, n: int) -> np.ndarray:
    """Each selected worker receives fixed_price; the owner pays for all of them."""
    payments = np.zeros(n)
    workers = [j for j in allocation.members if j != owner]
    for j in workers:
        payments[j] = fixed_price
    payments[owner] -= fixed_price * len(workers)
    return payments


class Mechanism(ABC):
    """Allocation by the efficient policy at the reported profile plus a payment rule."""

    name = 'mechanism'
    two_stage = False

    def __init__(self, scenario: Scenario, tables: MechanismTables) -> None:
        self.scenario = scenario
        self.tables = tables

    def allocate(self, type_reports: Sequence[int]) -> Allocation:
        """a*(theta_hat); a function of the reports only."""
        return self.tables.policy[self.scenario.state_index(type_reports)]

    def consistent_value(self, agent: int, allocation: Allocation, type_reports: Sequence[int]) -> float:
        """The stage-2 report that carries zero penalty: v_i(a, theta_hat_a)."""
        return self.scenario.value(agent, allocation, type_reports)

    def continuation(self, agent: int, allocation: Allocation, reported_state: int) -> float:
        """delta * E[W_-i(theta'_-i) | a, theta_hat] - W_-i(theta_hat_-i)."""
        expected = self.tables.marginal_expectation(agent, allocation)[reported_state]
        return self.scenario.delta * float(expected) - self.tables.marginal_at(agent, reported_state)

    @abstractmethod
    def payment(self, agent: int, reported_state: int,
                value_reports: Optional[np.ndarray]) -> Tuple[float, float]:
        """(payment, penalty) of one agent."""
        raise NotImplementedError()

    def payments(self, type_reports: Sequence[int],
                 value_reports: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
        state = self.scenario.state_index(type_reports)
        pairs = [self.payment(i, state, value_reports) for i in range(self.scenario.n)]
        return np.array([p for p, _ in pairs]), np.array([g for _, g in pairs])

    def run_round(self, true_profile: Sequence[int], strategies: StrategyProfile, t: int = 0) -> RoundOutcome:
        """
        Stage 1 (type reports), allocation, valuation realization at the TRUE
        types, stage 2 (value reports, two-stage mechanisms only), payments.
        """

        scenario = self.scenario
        true_profile = tuple(int(x) for x in true_profile)
        reports = tuple(self._checked_type(i, strategies[i].type_report(t, true_profile[i]))
                        for i in range(scenario.n))

        allocation = self.allocate(reports)
        true_values = scenario.stage_values(allocation, true_profile)
        consistent = scenario.stage_values(allocation, reports)

        value_reports = None
        if self.two_stage:
            value_reports = np.array([
                self._checked_value(i, strategies[i].value_report(t, float(true_values[i]), reports[i]))
                for i in range(scenario.n)
            ])

        payments, penalties = self.payments(reports, value_reports)
        return RoundOutcome(t, true_profile, reports, allocation, true_values, value_reports,
                            consistent, payments, penalties)

    def _checked_type(self, agent: int, report: object) -> int:
        size = self.scenario.sizes[agent]
        if isinstance(report, (bool, np.bool_)) or not isinstance(report, (int, np.integer)) \
                or not 0 <= report < size:
            raise StrategyDomainError(
                f"agent {agent} reported type {report!r}; valid indices are 0..{size - 1}",
                context={'agent': agent, 'report': repr(report)})
        return int(report)

    def _checked_value(self, agent: int, report: float) -> float:
        value = float(report)
        if not np.isfinite(value):
            raise StrategyDomainError(f"agent {agent} reported a non-finite value {report!r}",
                                      context={'agent': agent, 'report': repr(report)})
        return value


class MatrixMechanism(Mechanism):
    """Two-stage mechanism: type reports pick a*, value reports feed the payments."""

    name = 'matrix'
    two_stage = True

    def __init__(self, scenario: Scenario, tables: MechanismTables,
                 penalty: Optional[PenaltySpec] = None, ablate_penalty: bool = False) -> None:
        super().__init__(scenario, tables)
        self.penalty = penalty or scenario.penalty
        self.ablate_penalty = ablate_penalty

    def payment(self, agent: int, reported_state: int,
                value_reports: Optional[np.ndarray]) -> Tuple[float, float]:
        if value_reports is None:
            raise ValueError("MATRIX payments need stage-2 value reports")
        allocation = self.tables.policy[reported_state]
        consistent = float(self.scenario.values[agent, allocation.mask, reported_state])
        penalty = 0.0 if self.ablate_penalty else self.penalty(float(value_reports[agent]), consistent)
        others = _sum_others(value_reports, agent)
        return others + self.continuation(agent, allocation, reported_state) - penalty, penalty


class DynamicPivotMechanism(Mechanism):
    """Single-stage baseline: others' values are evaluated at the reported types."""

    name = 'dpm'

    def payment(self, agent: int, reported_state: int,
                value_reports: Optional[np.ndarray] = None) -> Tuple[float, float]:
        allocation = self.tables.policy[reported_state]
        reported_values = self.scenario.values[:, allocation.mask, reported_state]
        others = _sum_others(reported_values, agent)
        return others + self.continuation(agent, allocation, reported_state), 0.0


class ConstantPaymentMechanism(Mechanism):
    """Fixed-price baseline: allocation as above, owner pays each selected worker a constant."""

    name = 'const'

    def payment(self, agent: int, reported_state: int,
                value_reports: Optional[np.ndarray] = None) -> Tuple[float, float]:
        scenario = self.scenario
        allocation = self.tables.policy[reported_state]
        return float(const_payment(allocation, scenario.fixed_price, scenario.owner, scenario.n)[agent]), 0.0


def make_mechanism(name: str, scenario: Scenario, tables: MechanismTables,
                   penalty: Optional[PenaltySpec] = None, ablate_penalty: bool = False) -> Mechanism:
    """Mechanism instance by name (matrix, dpm, const)."""
    if name == 'matrix':
        return MatrixMechanism(scenario, tables, penalty, ablate_penalty)
    if name == 'dpm':
        return DynamicPivotMechanism(scenario, tables)
    if name == 'const':
        return ConstantPaymentMechanism(scenario, tables)
    raise ValueError(f"unknown mechanism '{name}' (expected one of {', '.join(MECHANISMS)})")


def _sum_others(vector: np.ndarray, agent: int) -> float:
    return float(np.sum(np.delete(vector, agent)))
