"""
Exact discounted utilities from the solved tables.

Under truthful play agent i's utility from profile theta is
W(theta) - W_-i(theta_-i). A single deviation at the current round, with
everybody truthful afterwards, is worth

    v_i(a, theta) + p_i(theta_hat, vhat) + delta * E[U_i(theta') | a, theta]

where a = a*(theta_hat), the other agents report their true values in
stage 2, and U_i is the truthful continuation utility of the mechanism.
"""

from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..mechanism.mechanisms import Mechanism
from ..scenario.model import Allocation
from ..solver.welfare_solver import WelfareSolver


class ExactUtilityCalculator:
    """Closed-form and policy-evaluation utilities for one mechanism."""

    def __init__(self, mechanism: Mechanism) -> None:
        self.mechanism = mechanism
        self.scenario = mechanism.scenario
        self.tables = mechanism.tables
        self._continuations: Dict[int, np.ndarray] = {}
        self._expected: Dict[Tuple[int, int], np.ndarray] = {}
        self._round_utilities: Optional[np.ndarray] = None
        self._round_payments: Optional[np.ndarray] = None

    def exact_truthful_utility(self, state: int, agent: int) -> float:
        """W(theta) - W_-i(theta_-i)."""
        return float(self.tables.welfare.values[state]) - self.tables.marginal_at(agent, state)

    def truthful_round(self) -> np.ndarray:
        """Per-round utilities v_i + p_i under truthful play, shape (n, states)."""
        if self._round_utilities is None:
            self._fill_truthful_rounds()
        return self._round_utilities

    def truthful_payments(self) -> np.ndarray:
        """Per-round payments under truthful play, shape (n, states)."""
        if self._round_payments is None:
            self._fill_truthful_rounds()
        return self._round_payments

    def max_truthful_payment(self) -> float:
        """P_max: largest |payment| over every agent and profile under truthful play."""
        payments = self.truthful_payments()
        return float(np.max(np.abs(payments))) if payments.size else 0.0

    def _fill_truthful_rounds(self) -> None:
        scenario = self.scenario
        utilities = np.zeros((scenario.n, scenario.n_states))
        payments = np.zeros((scenario.n, scenario.n_states))
        for state in range(scenario.n_states):
            allocation = self.tables.policy[state]
            values = scenario.values[:, allocation.mask, state]
            paid, _ = self.mechanism.payments(scenario.profile(state), values)
            utilities[:, state] = values + paid
            payments[:, state] = paid
        self._round_utilities, self._round_payments = utilities, payments

    def policy_evaluation_utility(self, agent: int, tol: Optional[float] = None) -> np.ndarray:
        """Truthful continuation utility by evaluating the efficient policy with this mechanism's payments."""
        solver = WelfareSolver(self.scenario, tol or self.tables.tolerance)
        return solver.policy_evaluation(self.tables.policy, self.truthful_round()[agent],
                                        label=f"U_{agent} ({self.mechanism.name})").values

    def continuation_utility(self, agent: int) -> np.ndarray:
        """U_i(theta) for every profile: W - W_-i for the pivot mechanisms, policy evaluation otherwise."""
        if agent not in self._continuations:
            if self.mechanism.name in ('matrix', 'dpm'):
                self._continuations[agent] = self.tables.truthful_utility(agent)
            else:
                self._continuations[agent] = self.policy_evaluation_utility(agent)
        return self._continuations[agent]

    def expected_continuation(self, agent: int, mask: int) -> np.ndarray:
        """E[U_i(theta') | a, theta] for every conditioning profile."""
        key = (agent, mask)
        if key not in self._expected:
            continuation = self.continuation_utility(agent)
            self._expected[key] = self.scenario.expectation(continuation, Allocation(mask))
        return self._expected[key]

    def exact_deviation_utility(self, profile: Sequence[int], agent: int, reported_type: int,
                                value_report: Optional[float] = None) -> float:
        """
        Utility of reporting `reported_type` (and `value_report` in stage 2)
        in the current round only. The value report defaults to the
        consistent value for the reported type.
        """

        scenario = self.scenario
        profile = tuple(int(x) for x in profile)
        reported = scenario.replace_type(profile, agent, reported_type)
        state, reported_state = scenario.state_index(profile), scenario.state_index(reported)

        allocation = self.tables.policy[reported_state]
        true_values = scenario.values[:, allocation.mask, state]

        value_reports = None
        if self.mechanism.two_stage:
            value_reports = np.array(true_values, dtype=float)
            if value_report is None:
                value_report = float(scenario.values[agent, allocation.mask, reported_state])
            value_reports[agent] = value_report

        payment, _ = self.mechanism.payment(agent, reported_state, value_reports)
        expected = self.expected_continuation(agent, allocation.mask)[state]
        return float(true_values[agent]) + payment + scenario.delta * float(expected)

    def deviation_gain(self, profile: Sequence[int], agent: int, reported_type: int,
                       value_report: Optional[float] = None) -> float:
        """Deviation utility minus the utility of full truth-telling at the same profile."""
        truthful = self.exact_deviation_utility(profile, agent, profile[agent])
        return self.exact_deviation_utility(profile, agent, reported_type, value_report) - truthful
