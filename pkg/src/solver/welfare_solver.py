"""
Value iteration for the social-welfare MDP and each marginal MDP.

States are joint type profiles, actions are subset allocations and the
transition kernel factorizes across agents, so every expectation is a
sequence of per-agent tensor contractions instead of a dense S x S
matrix product.
"""

import logging
import time
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .tables import MarginalWelfareTable, MechanismTables, PolicyTable, PolicyValue, WelfareTable
from ..scenario.model import Allocation, Scenario, factored_expectation
from ..utils.constants import DEFAULT_ITERATION_CAP, DEFAULT_SOLVER_TOLERANCE, TIE_TOLERANCE
from ..utils.error_handling import NonConvergence
from ..utils.logger import RunLogger

logger = logging.getLogger(__name__)


class WelfareSolver:
    """Solve W, W_-i and fixed-policy values for one scenario."""

    def __init__(self, scenario: Scenario, tol: float = DEFAULT_SOLVER_TOLERANCE,
                 iteration_cap: int = DEFAULT_ITERATION_CAP) -> None:
        if not tol > 0:
            raise ValueError(f"solver tolerance must be positive, got {tol}")
        self.scenario = scenario
        self.tol = float(tol)
        self.iteration_cap = int(iteration_cap)
        self.allocations = scenario.enumerate_allocations()
        # Sup-norm step that guarantees distance <= tol from the fixed point.
        self.stop_threshold = self.tol * (1.0 - scenario.delta) / (2.0 * scenario.delta)
        self.differences: List[float] = []

    # Bellman operators

    def action_values(self, values: np.ndarray) -> np.ndarray:
        """Q[a, theta] = sum_j v_j(a, theta_a) + delta * E[values(theta') | a, theta]."""
        scenario = self.scenario
        continuation = np.stack([scenario.expectation(values, a) for a in self.allocations])
        return scenario.stage_welfare + scenario.delta * continuation

    def _marginal_action_values(self, agent: int, values: np.ndarray,
                                masks: Sequence[int], stage: np.ndarray) -> np.ndarray:
        scenario = self.scenario
        sizes = scenario.reduced_sizes(agent)
        others = [j for j in range(scenario.n) if j != agent]
        continuation = np.stack([
            factored_expectation(values, sizes, [scenario.kernels[j][mask] for j in others])
            for mask in masks
        ])
        return stage + scenario.delta * continuation

    def _iterate(self, sweep: Callable[[np.ndarray], np.ndarray], size: int,
                 label: str) -> Tuple[np.ndarray, float, int]:
        """Synchronous sweeps from 0 until the successive sup-norm step meets the stopping rule."""

        values = np.zeros(size)
        self.differences = []
        for iteration in range(1, self.iteration_cap + 1):
            updated = sweep(values)
            difference = float(np.max(np.abs(updated - values))) if size else 0.0
            self.differences.append(difference)
            values = updated
            if difference <= self.stop_threshold:
                residual = float(np.max(np.abs(sweep(values) - values))) if size else 0.0
                logger.debug(f"{label}: converged after {iteration} sweeps, residual {residual:.3e}")
                return values, residual, iteration

        raise NonConvergence(
            f"{label} did not converge within {self.iteration_cap} sweeps "
            f"(last step {self.differences[-1]:.3e}, needed {self.stop_threshold:.3e})",
            context={'table': label, 'iterations': self.iteration_cap,
                     'scenario': self.scenario.name},
        )

    # Tables

    def solve_welfare(self) -> WelfareTable:
        """W(theta) = max_a [ sum_j v_j(a, theta_a) + delta * E[W(theta') | a, theta] ]."""
        started = time.perf_counter()
        values, residual, iterations = self._iterate(
            lambda w: self.action_values(w).max(axis=0), self.scenario.n_states, 'W')
        return WelfareTable(_readonly(values), residual, iterations, self.tol,
                            time.perf_counter() - started)

    def solve_marginal_welfare(self, agent: int) -> MarginalWelfareTable:
        """
        W_-i on reduced profiles theta_-i with allocations that exclude i.

        The stage sum is taken from the theta_i = 0 slice: no allocation
        without i reads theta_i, so every slice is identical.
        """

        scenario = self.scenario
        if not 0 <= agent < scenario.n:
            raise ValueError(f"agent {agent} out of range for {scenario.n} agents")

        started = time.perf_counter()
        masks = [a.mask for a in scenario.enumerate_allocations(excluded_agent=agent)]
        slice_states = np.flatnonzero(scenario.profiles[:, agent] == 0)
        stage = scenario.stage_welfare[np.ix_(masks, slice_states)]

        values, residual, iterations = self._iterate(
            lambda w: self._marginal_action_values(agent, w, masks, stage).max(axis=0),
            len(slice_states), f"W_-{agent}")
        return MarginalWelfareTable(agent, _readonly(values), residual, iterations, self.tol,
                                    time.perf_counter() - started)

    def efficient_allocation(self, welfare: WelfareTable, state: int) -> Allocation:
        """Canonically-first allocation attaining the Bellman maximum at `state`."""
        q = self._state_action_values(welfare.values, state)
        best = q.max()
        return self.allocations[int(np.argmax(q >= best - TIE_TOLERANCE))]

    def _state_action_values(self, values: np.ndarray, state: int) -> np.ndarray:
        scenario = self.scenario
        return np.array([
            scenario.stage_welfare[a.mask, state]
            + scenario.delta * float(scenario.joint_transition(scenario.profile(state), a) @ values)
            for a in self.allocations
        ])

    def efficient_policy(self, welfare: WelfareTable) -> PolicyTable:
        """a*(theta) for every profile at once, with the number of tied allocations."""
        q = self.action_values(welfare.values)
        near_best = q >= q.max(axis=0) - TIE_TOLERANCE
        masks = np.argmax(near_best, axis=0).astype(np.int64)
        return PolicyTable(_readonly(masks), _readonly(near_best.sum(axis=0).astype(np.int64)))

    def truncated_welfare_oracle(self, horizon: int) -> np.ndarray:
        """Finite-horizon backward induction: W_0 = 0, W_{k+1} = max_a [stage + delta * E W_k]."""
        if horizon < 0:
            raise ValueError(f"horizon must be non-negative, got {horizon}")
        values = np.zeros(self.scenario.n_states)
        for _ in range(horizon):
            values = self.action_values(values).max(axis=0)
        return values

    def policy_evaluation(self, policy: PolicyTable, reward: np.ndarray,
                          label: str = 'policy value') -> PolicyValue:
        """Value of following `policy` forever when each round pays `reward[theta]`."""

        scenario = self.scenario
        reward = np.asarray(reward, dtype=float)
        used = np.unique(policy.masks)
        rows = {int(mask): policy.masks == mask for mask in used}

        def sweep(values: np.ndarray) -> np.ndarray:
            continuation = np.empty(scenario.n_states)
            for mask, selected in rows.items():
                continuation[selected] = scenario.expectation(values, Allocation(mask))[selected]
            return reward + scenario.delta * continuation

        values, residual, iterations = self._iterate(sweep, scenario.n_states, label)
        return PolicyValue(_readonly(values), residual, iterations)

    def solve_all(self, run_logger: Optional[RunLogger] = None) -> MechanismTables:
        """W, the efficient policy and every W_-i."""
        welfare = self.solve_welfare()
        if run_logger:
            run_logger.log_solve('W', welfare.iterations, welfare.residual, welfare.seconds)
        marginals = []
        for agent in range(self.scenario.n):
            table = self.solve_marginal_welfare(agent)
            if run_logger:
                run_logger.log_solve(f"W_-{agent}", table.iterations, table.residual, table.seconds)
            marginals.append(table)
        return MechanismTables(self.scenario, welfare, tuple(marginals), self.efficient_policy(welfare))


def solve_tables(scenario: Scenario, tol: float = DEFAULT_SOLVER_TOLERANCE,
                 iteration_cap: Optional[int] = None,
                 run_logger: Optional[RunLogger] = None) -> MechanismTables:
    solver = WelfareSolver(scenario, tol, iteration_cap or DEFAULT_ITERATION_CAP)
    return solver.solve_all(run_logger)


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array
