"""
Tests for the welfare solver: W, W_-i, the efficient policy and the
finite-horizon oracle.
"""

import numpy as np
import pytest

from src.scenario import Allocation
from src.solver import WelfareSolver, solve_tables
from src.utils.constants import IDENTITY_TOLERANCE
from src.utils.error_handling import NonConvergence


class TestWelfareS1:
    """Hand-derived values on the two-agent singleton scenario."""

    def setup_method(self):
        from tests.conftest import S1_TEXT, scenario_from_text
        self.scenario = scenario_from_text(S1_TEXT)
        self.solver = WelfareSolver(self.scenario)

    def test_social_welfare(self):
        welfare = self.solver.solve_welfare()
        assert welfare.values[0] == pytest.approx(3.0, abs=1e-8)
        assert welfare.residual <= welfare.tolerance

    def test_marginal_welfare(self):
        assert self.solver.solve_marginal_welfare(0).values[0] == pytest.approx(0.0, abs=1e-8)
        assert self.solver.solve_marginal_welfare(1).values[0] == pytest.approx(2.0, abs=1e-8)

    def test_efficient_allocation_selects_both(self):
        welfare = self.solver.solve_welfare()
        assert self.solver.efficient_allocation(welfare, 0) == Allocation(0b11)
        policy = self.solver.efficient_policy(welfare)
        assert policy[0].members == (0, 1)
        assert policy.ties[0] == 1

    def test_truncated_oracle(self):
        assert self.solver.truncated_welfare_oracle(1)[0] == pytest.approx(1.5)
        assert self.solver.truncated_welfare_oracle(0)[0] == 0.0
        tail = 1.5 * 0.5 ** 20 / (1 - 0.5)
        assert abs(self.solver.truncated_welfare_oracle(20)[0] - 3.0) <= tail + 1e-12

    def test_tighter_tolerance_more_sweeps_same_policy(self):
        loose = solve_tables(self.scenario, tol=1e-9)
        tight = solve_tables(self.scenario, tol=1e-12)
        assert tight.welfare.iterations > loose.welfare.iterations
        np.testing.assert_array_equal(tight.policy.masks, loose.policy.masks)

    def test_iteration_cap_raises(self):
        solver = WelfareSolver(self.scenario, tol=1e-12, iteration_cap=3)
        with pytest.raises(NonConvergence) as excinfo:
            solver.solve_welfare()
        assert excinfo.value.context['iterations'] == 3
        assert len(solver.differences) == 3

    def test_differences_shrink_geometrically(self):
        self.solver.solve_welfare()
        steps = self.solver.differences
        assert steps[0] == pytest.approx(1.5)
        for before, after in zip(steps, steps[1:]):
            assert after == pytest.approx(0.5 * before)

    def test_bad_agent_and_tolerance(self):
        with pytest.raises(ValueError):
            self.solver.solve_marginal_welfare(2)
        with pytest.raises(ValueError):
            WelfareSolver(self.scenario, tol=0.0)


class TestWelfareEdgeCases:
    """Single agent, zero valuations and ties."""

    def test_single_agent_geometric_sum(self, single_agent_scenario):
        tables = solve_tables(single_agent_scenario)
        assert tables.welfare.values[0] == pytest.approx(10.0, abs=1e-8)
        # Removing the only agent leaves one empty profile worth nothing.
        assert tables.marginals[0].values.shape == (1,)
        assert tables.marginals[0].values[0] == 0.0

    def test_zero_scenario_picks_empty_allocation(self, zero_scenario):
        tables = solve_tables(zero_scenario)
        np.testing.assert_array_equal(tables.welfare.values, 0.0)
        np.testing.assert_array_equal(tables.policy.masks, 0)
        # Every allocation ties at zero.
        np.testing.assert_array_equal(tables.policy.ties, zero_scenario.n_allocations)

    def test_marginal_table_has_reduced_shape(self, two_type_tables, two_type_scenario):
        for table in two_type_tables.marginals:
            assert table.values.shape == (int(np.prod(two_type_scenario.reduced_sizes(table.agent))),)

    def test_marginal_welfare_ignores_own_type(self, two_type_tables, two_type_scenario):
        lifted = two_type_tables.lifted_marginal(0).reshape(two_type_scenario.sizes)
        np.testing.assert_array_equal(lifted[0], lifted[1])


class TestSolverProperties:
    """Properties over the random suite."""

    def test_bellman_fixed_point(self, random_suite_tables):
        for scenario, tables in random_suite_tables[:20]:
            solver = WelfareSolver(scenario)
            backup = solver.action_values(tables.welfare.values).max(axis=0)
            assert np.max(np.abs(backup - tables.welfare.values)) <= tables.tolerance

    def test_policy_attains_bellman_maximum(self, random_suite_tables):
        for scenario, tables in random_suite_tables[:20]:
            q = WelfareSolver(scenario).action_values(tables.welfare.values)
            chosen = q[tables.policy.masks, np.arange(scenario.n_states)]
            np.testing.assert_allclose(chosen, q.max(axis=0), atol=1e-12)

    def test_against_truncated_oracle(self, random_suite_tables):
        horizon = 50
        for scenario, tables in random_suite_tables:
            oracle = WelfareSolver(scenario).truncated_welfare_oracle(horizon)
            tail = scenario.delta ** horizon * scenario.n * scenario.bound / (1 - scenario.delta)
            assert np.max(np.abs(tables.welfare.values - oracle)) <= tail + 1e-8, scenario.name

    def test_welfare_dominates_marginal_welfare(self, random_suite_tables):
        for scenario, tables in random_suite_tables:
            for agent in range(scenario.n):
                gap = tables.welfare.values - tables.lifted_marginal(agent)
                assert gap.min() >= -2e-9, (scenario.name, agent)

    def test_policy_evaluation_reproduces_truthful_utility(self, random_suite_tables):
        from src.mechanism import MatrixMechanism
        from src.simulator import ExactUtilityCalculator
        for scenario, tables in random_suite_tables[:10]:
            utility = ExactUtilityCalculator(MatrixMechanism(scenario, tables))
            for agent in range(scenario.n):
                evaluated = utility.policy_evaluation_utility(agent)
                np.testing.assert_allclose(evaluated, tables.truthful_utility(agent), atol=IDENTITY_TOLERANCE)
