"""
Solved value tables: social welfare W, marginal welfare W_-i and the
efficient allocation policy.
"""

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from ..scenario.model import Allocation, Scenario


@dataclass(frozen=True, eq=False)
class WelfareTable:
    """W over joint profiles (row-major state index)."""

    values: np.ndarray
    residual: float
    iterations: int
    tolerance: float
    seconds: float = 0.0

    def __getitem__(self, state: int) -> float:
        return float(self.values[state])


@dataclass(frozen=True, eq=False)
class MarginalWelfareTable:
    """W_-i over reduced profiles theta_-i (agent i removed from the profile)."""

    agent: int
    values: np.ndarray
    residual: float
    iterations: int
    tolerance: float
    seconds: float = 0.0

    def __getitem__(self, reduced_state: int) -> float:
        return float(self.values[reduced_state])

    def lifted(self, scenario: Scenario) -> np.ndarray:
        """W_-i(theta_-i) indexed by full joint profile."""
        return self.values[scenario.reduced_state_index(self.agent)]


@dataclass(frozen=True, eq=False)
class PolicyTable:
    """a*(theta) as allocation masks per joint profile, plus tie counts."""

    masks: np.ndarray
    ties: np.ndarray

    def __getitem__(self, state: int) -> Allocation:
        return Allocation(int(self.masks[state]))

    def __len__(self) -> int:
        return len(self.masks)


@dataclass(frozen=True, eq=False)
class PolicyValue:
    """Value of a fixed stationary policy for one per-round reward vector."""

    values: np.ndarray
    residual: float
    iterations: int


class MechanismTables:
    """
    Everything a round of the mechanism needs from the solver: W, every
    W_-i, the efficient policy and cached continuation expectations.
    """

    def __init__(self, scenario: Scenario, welfare: WelfareTable,
                 marginals: Tuple[MarginalWelfareTable, ...], policy: PolicyTable) -> None:
        self.scenario = scenario
        self.welfare = welfare
        self.marginals = tuple(marginals)
        self.policy = policy
        self.tolerance = welfare.tolerance
        self._lifted = tuple(table.lifted(scenario) for table in self.marginals)
        self._marginal_expectations: Dict[Tuple[int, int], np.ndarray] = {}

    def marginal_at(self, agent: int, state: int) -> float:
        """W_-i(theta_-i) for the joint profile index `state`."""
        return float(self._lifted[agent][state])

    def lifted_marginal(self, agent: int) -> np.ndarray:
        return self._lifted[agent]

    def marginal_expectation(self, agent: int, allocation: Allocation) -> np.ndarray:
        """E[W_-i(theta'_-i) | a, theta] for every conditioning profile theta."""
        key = (agent, allocation.mask)
        if key not in self._marginal_expectations:
            self._marginal_expectations[key] = self.scenario.expectation(self._lifted[agent], allocation)
        return self._marginal_expectations[key]

    def truthful_utility(self, agent: int) -> np.ndarray:
        """W(theta) - W_-i(theta_-i) for every joint profile."""
        return self.welfare.values - self._lifted[agent]
