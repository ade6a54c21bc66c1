"""
Exhaustive incentive checks over every joint profile, agent and
single-round deviation of a desk-scale scenario.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..mechanism.mechanisms import Mechanism
from ..scenario.model import Scenario
from ..simulator.utility import ExactUtilityCalculator
from ..solver.welfare_solver import WelfareSolver
from ..utils.constants import (
    DEFAULT_CHECK_TOLERANCE, DEFAULT_GRID_STEPS, MAX_DEFAULT_HORIZON, STRICTNESS_RELATIVE_TOLERANCE,
)

logger = logging.getLogger(__name__)

# Per-pair spread allowed for E[W_-i | a, theta] across theta_i
INDEPENDENCE_TOLERANCE = 1e-10


@dataclass(frozen=True)
class Witness:
    """Where the worst case of a check was found."""

    profile: Tuple[int, ...]
    agent: int
    reported_type: Optional[int] = None
    value_report: Optional[float] = None

    def describe(self, scenario: Scenario) -> str:
        text = f"theta={scenario.format_profile(self.profile)}"
        if self.agent >= 0:
            text += f" agent={self.agent}"
        if self.reported_type is not None:
            text += f" report={scenario.types.labels[self.agent][self.reported_type]}"
        if self.value_report is not None:
            text += f" value={self.value_report!r}"
        return text


@dataclass(frozen=True)
class ViolationReport:
    """Verdict of one property check on one scenario."""

    scenario: str
    mechanism: str
    prop: str
    cases: int
    worst_value: float
    tolerance: float
    passed: bool
    witness: Optional[Witness] = None
    applicable: bool = True

    @property
    def verdict(self) -> str:
        if not self.applicable:
            return 'N/A'
        return 'PASS' if self.passed else 'FAIL'


class IncentiveVerifier:
    """Run the property checks for one mechanism on its scenario."""

    def __init__(self, mechanism: Mechanism, tol: float = DEFAULT_CHECK_TOLERANCE,
                 grid_steps: int = DEFAULT_GRID_STEPS) -> None:
        if grid_steps < 0:
            raise ValueError(f"grid_steps must be non-negative, got {grid_steps}")
        self.mechanism = mechanism
        self.scenario = mechanism.scenario
        self.tables = mechanism.tables
        self.tol = tol
        self.grid_steps = grid_steps
        self.utility = ExactUtilityCalculator(mechanism)

    def value_grid(self, consistent: float) -> List[float]:
        """consistent + k * step for k in -grid_steps..grid_steps, step = max(1, M) / grid_steps."""
        if self.grid_steps == 0:
            return [consistent]
        step = max(1.0, self.scenario.bound) / self.grid_steps
        return [consistent + k * step for k in range(-self.grid_steps, self.grid_steps + 1)]

    def _report(self, prop: str, cases: int, worst: float, passed: bool,
                witness: Optional[Witness] = None, tolerance: Optional[float] = None,
                applicable: bool = True) -> ViolationReport:
        return ViolationReport(self.scenario.name, self.mechanism.name, prop, cases, float(worst),
                               self.tol if tolerance is None else tolerance, passed, witness, applicable)

    def check_epic(self) -> ViolationReport:
        """
        Largest gain from any stage-1 type report combined with the analytic
        stage-2 best response (the consistent value) or any grid value.
        """

        scenario, utility = self.scenario, self.utility
        worst, witness, cases = -math.inf, None, 0

        for state in range(scenario.n_states):
            profile = scenario.profile(state)
            for agent in range(scenario.n):
                truthful = utility.exact_deviation_utility(profile, agent, profile[agent])
                for reported_type in range(scenario.sizes[agent]):
                    candidates: List[Optional[float]] = [None]
                    if self.mechanism.two_stage:
                        reported = scenario.replace_type(profile, agent, reported_type)
                        allocation = self.tables.policy[scenario.state_index(reported)]
                        consistent = scenario.value(agent, allocation, reported)
                        candidates += self.value_grid(consistent)
                    for value_report in candidates:
                        gain = utility.exact_deviation_utility(profile, agent, reported_type,
                                                               value_report) - truthful
                        cases += 1
                        if gain > worst:
                            worst = gain
                            witness = Witness(profile, agent, reported_type, value_report)

        return self._report('epic', cases, worst, worst <= self.tol, witness)

    def check_strict_stage2(self) -> ViolationReport:
        """
        With a truthful type report, every off-consistent value report must
        lose exactly g(vhat, v) > 0. A gap matches when it lies within
        max(tol, 1e-9 * g) of g, so the worst value is the largest mismatch
        relative to max(g, tol / 1e-9) and passes at 1e-9.
        """

        if not self.mechanism.two_stage:
            return self._report('strict_stage2', 0, 0.0, True, applicable=False)

        scenario, utility = self.scenario, self.utility
        penalty = getattr(self.mechanism, 'penalty', scenario.penalty)
        worst, witness, first_flat, cases = 0.0, None, None, 0
        scale = self.tol / STRICTNESS_RELATIVE_TOLERANCE

        for state in range(scenario.n_states):
            profile = scenario.profile(state)
            allocation = self.tables.policy[state]
            for agent in range(scenario.n):
                true_value = scenario.value(agent, allocation, profile)
                truthful = utility.exact_deviation_utility(profile, agent, profile[agent], true_value)
                for value_report in self.value_grid(true_value):
                    if value_report == true_value:
                        continue
                    loss = truthful - utility.exact_deviation_utility(profile, agent, profile[agent],
                                                                      value_report)
                    gap = penalty(value_report, true_value)
                    mismatch = abs(loss - gap) / max(gap, scale)
                    cases += 1
                    if mismatch > worst:
                        worst, witness = mismatch, Witness(profile, agent, None, value_report)
                    if not loss > 0 and first_flat is None:
                        first_flat = Witness(profile, agent, None, value_report)

        passed = first_flat is None and worst <= STRICTNESS_RELATIVE_TOLERANCE
        return self._report('strict_stage2', cases, worst, passed, first_flat or witness,
                            tolerance=STRICTNESS_RELATIVE_TOLERANCE)

    def check_epir(self) -> ViolationReport:
        """Smallest truthful discounted utility over all profiles and agents."""

        scenario = self.scenario
        worst, witness = math.inf, None
        for agent in range(scenario.n):
            utilities = self.utility.continuation_utility(agent)
            state = int(np.argmin(utilities))
            if utilities[state] < worst:
                worst = float(utilities[state])
                witness = Witness(scenario.profile(state), agent)

        if not math.isfinite(worst):
            worst = 0.0
        return self._report('epir', scenario.n * scenario.n_states, worst, worst >= -self.tol, witness)

    def check_efficiency(self) -> ViolationReport:
        """
        Welfare of following the solved policy forever against the
        finite-horizon oracle, with T chosen so the oracle's tail is below tol.
        """

        scenario = self.scenario
        solver = WelfareSolver(scenario, self.tables.tolerance)
        horizon = efficiency_horizon(scenario, self.tol)
        tail = scenario.delta ** horizon * scenario.n * scenario.bound / (1.0 - scenario.delta)

        oracle = solver.truncated_welfare_oracle(horizon)
        masks = self.tables.policy.masks
        reward = scenario.stage_welfare[masks, np.arange(scenario.n_states)]
        achieved = solver.policy_evaluation(self.tables.policy, reward, label='policy welfare').values

        gaps = np.abs(achieved - oracle)
        state = int(np.argmax(gaps))
        worst = float(gaps[state])
        allowed = self.tol + tail
        return self._report('efficiency', scenario.n_states, worst, worst <= allowed,
                            Witness(scenario.profile(state), -1), tolerance=allowed)

    def check_marginal_independence(self, tol: float = INDEPENDENCE_TOLERANCE) -> ViolationReport:
        """
        E[W_-i(theta'_-i) | a, theta] must not vary with theta_i, for every a
        and i. Spreads are measured relative to max(1, max |W_-i|).
        """

        scenario = self.scenario
        worst, witness, cases = 0.0, None, 0
        for agent in range(scenario.n):
            scale = max(1.0, float(np.abs(self.tables.lifted_marginal(agent)).max()))
            for allocation in scenario.enumerate_allocations():
                expected = self.tables.marginal_expectation(agent, allocation).reshape(scenario.sizes)
                spread = np.ptp(expected, axis=agent) / scale
                cases += spread.size
                if spread.size and float(spread.max()) > worst:
                    worst = float(spread.max())
                    others = list(np.unravel_index(int(np.argmax(spread)), spread.shape))
                    witness = Witness(tuple(int(t) for t in others[:agent] + [0] + others[agent:]), agent)
        return self._report('marginal_independence', cases, worst, worst <= tol, witness, tolerance=tol)

    def run_all(self) -> List[ViolationReport]:
        reports = [
            self.check_epic(),
            self.check_strict_stage2(),
            self.check_epir(),
            self.check_efficiency(),
            self.check_marginal_independence(),
        ]
        for report in reports:
            logger.debug(f"{report.scenario} [{report.mechanism}] {report.prop}: {report.verdict} "
                         f"(worst {report.worst_value:.3e} over {report.cases} cases)")
        return reports


def efficiency_horizon(scenario: Scenario, tol: float) -> int:
    """Smallest T with delta^T * n * M / (1 - delta) < tol."""
    scale = scenario.n * scenario.bound / (1.0 - scenario.delta)
    if scale < tol:
        return 0
    horizon = max(0, math.ceil(math.log(tol / scale) / math.log(scenario.delta)))
    while scenario.delta ** horizon * scale >= tol:
        horizon += 1
    return min(horizon, MAX_DEFAULT_HORIZON)
