"""
Tests for the incentive verifier, the DPM counterexample search and the
budget diagnostics.
"""

import numpy as np
import pytest

from src.mechanism import (
    ConstantPaymentMechanism, DynamicPivotMechanism, MatrixMechanism, StrategyProfile,
)
from src.simulator import EpisodeSimulator, ExactUtilityCalculator
from src.utils.constants import DEFAULT_CHECK_TOLERANCE, IDENTITY_TOLERANCE, STRICTNESS_RELATIVE_TOLERANCE
from src.utils.error_handling import SearchBudgetExhausted
from src.verifier import (
    DPMCounterexampleSearch, IncentiveVerifier, SearchConfig, budget_metrics, efficiency_horizon,
    payment_consistency,
)


class TestIncentiveVerifierS1:
    """Every property holds on the singleton scenario."""

    def setup_method(self):
        from src.solver import solve_tables
        from tests.conftest import S1_TEXT, scenario_from_text
        self.scenario = scenario_from_text(S1_TEXT)
        self.tables = solve_tables(self.scenario)
        self.verifier = IncentiveVerifier(MatrixMechanism(self.scenario, self.tables))

    def test_value_grid(self):
        grid = self.verifier.value_grid(2.0)
        assert len(grid) == 11
        assert grid[0] == pytest.approx(0.0)
        assert grid[5] == 2.0
        assert grid[-1] == pytest.approx(4.0)

    def test_run_all_passes(self):
        reports = self.verifier.run_all()
        assert [r.prop for r in reports] == ['epic', 'strict_stage2', 'epir', 'efficiency',
                                             'marginal_independence']
        assert all(r.passed for r in reports)
        assert all(r.verdict == 'PASS' for r in reports)

    def test_epic_gain_is_negative(self):
        report = self.verifier.check_epic()
        # Only value reports can deviate and every off-consistent one costs g.
        assert report.worst_value == pytest.approx(0.0, abs=1e-9)
        assert report.cases == 2 * 12

    def test_epir_minimum_is_worker_utility(self):
        report = self.verifier.check_epir()
        assert report.worst_value == pytest.approx(1.0, abs=1e-8)
        assert report.witness.agent == 1

    def test_ablated_penalty_breaks_strict_stage2(self):
        ablated = IncentiveVerifier(MatrixMechanism(self.scenario, self.tables, ablate_penalty=True))
        assert ablated.check_epic().passed
        report = ablated.check_strict_stage2()
        assert not report.passed
        assert report.verdict == 'FAIL'
        assert report.witness is not None

    def test_ablated_gaps_are_zero(self):
        utility = ExactUtilityCalculator(MatrixMechanism(self.scenario, self.tables, ablate_penalty=True))
        truthful = utility.exact_deviation_utility((0, 0), 0, 0, 2.0)
        for report in self.verifier.value_grid(2.0):
            assert utility.exact_deviation_utility((0, 0), 0, 0, report) == pytest.approx(truthful, abs=1e-12)

    def test_witness_description(self):
        report = IncentiveVerifier(MatrixMechanism(self.scenario, self.tables, ablate_penalty=True)) \
            .check_strict_stage2()
        text = report.witness.describe(self.scenario)
        assert text.startswith('theta=(x y) agent=')
        assert 'value=' in text

    def test_grid_steps_zero_checks_consistent_report_only(self):
        verifier = IncentiveVerifier(MatrixMechanism(self.scenario, self.tables), grid_steps=0)
        assert verifier.value_grid(2.0) == [2.0]
        with pytest.raises(ValueError):
            IncentiveVerifier(MatrixMechanism(self.scenario, self.tables), grid_steps=-1)

    def test_single_stage_mechanisms_skip_stage2(self):
        report = IncentiveVerifier(DynamicPivotMechanism(self.scenario, self.tables)).check_strict_stage2()
        assert report.verdict == 'N/A'
        assert report.passed

    def test_efficiency_horizon(self):
        horizon = efficiency_horizon(self.scenario, 1e-7)
        scale = 2 * 2.0 / 0.5
        assert 0.5 ** horizon * scale < 1e-7 <= 0.5 ** (horizon - 1) * scale


class TestLargeValuations:
    """Valuations around 1e5 make quadratic penalties reach 1e10."""

    def test_strict_stage2_matches_relative_to_penalty(self, large_values_scenario, large_values_tables):
        verifier = IncentiveVerifier(MatrixMechanism(large_values_scenario, large_values_tables))
        report = verifier.check_strict_stage2()
        assert report.passed, (report.worst_value, report.witness)
        assert report.tolerance == STRICTNESS_RELATIVE_TOLERANCE
        assert report.worst_value <= STRICTNESS_RELATIVE_TOLERANCE
        assert verifier.check_epic().passed

    def test_every_property_passes(self, large_values_scenario, large_values_tables):
        reports = IncentiveVerifier(MatrixMechanism(large_values_scenario, large_values_tables)).run_all()
        assert [r.verdict for r in reports] == ['PASS'] * 5, [(r.prop, r.worst_value) for r in reports]

    def test_penalties_outgrow_absolute_tolerance(self, large_values_scenario, large_values_tables):
        # One ulp of the largest penalty is already above the absolute check tolerance.
        verifier = IncentiveVerifier(MatrixMechanism(large_values_scenario, large_values_tables))
        largest = max(large_values_scenario.penalty(report, 0.0) for report in verifier.value_grid(0.0))
        assert largest * 1e-16 > DEFAULT_CHECK_TOLERANCE

    def test_ablated_penalty_still_fails(self, large_values_scenario, large_values_tables):
        mechanism = MatrixMechanism(large_values_scenario, large_values_tables, ablate_penalty=True)
        assert IncentiveVerifier(mechanism).check_strict_stage2().verdict == 'FAIL'


class TestIncentiveVerifierSuite:
    """MATRIX properties over the random suite."""

    @pytest.mark.slow
    def test_matrix_epic_on_suite(self, random_suite_tables):
        for scenario, tables in random_suite_tables:
            report = IncentiveVerifier(MatrixMechanism(scenario, tables)).check_epic()
            assert report.passed, (scenario.name, report.worst_value)

    def test_strict_stage2_gaps_equal_penalty(self, random_suite_tables):
        for scenario, tables in random_suite_tables[:25]:
            mechanism = MatrixMechanism(scenario, tables)
            utility = ExactUtilityCalculator(mechanism)
            verifier = IncentiveVerifier(mechanism)
            for state, profile in enumerate(scenario.enumerate_states()):
                allocation = tables.policy[state]
                for agent in range(scenario.n):
                    true_value = scenario.value(agent, allocation, profile)
                    truthful = utility.exact_deviation_utility(profile, agent, profile[agent], true_value)
                    for report in verifier.value_grid(true_value):
                        if report == true_value:
                            continue
                        deviation = utility.exact_deviation_utility(profile, agent, profile[agent], report)
                        gap = truthful - deviation
                        penalty = scenario.penalty(report, true_value)
                        assert gap > 0
                        assert gap == pytest.approx(penalty, rel=1e-9, abs=1e-12)

    def test_epir_and_truthful_identity_on_suite(self, random_suite_tables):
        for scenario, tables in random_suite_tables:
            mechanism = MatrixMechanism(scenario, tables)
            assert IncentiveVerifier(mechanism).check_epir().passed, scenario.name
            utility = ExactUtilityCalculator(mechanism)
            for state, profile in enumerate(scenario.enumerate_states()):
                for agent in range(scenario.n):
                    deviation = utility.exact_deviation_utility(profile, agent, profile[agent])
                    expected = utility.exact_truthful_utility(state, agent)
                    assert deviation == pytest.approx(expected, abs=IDENTITY_TOLERANCE)

    def test_marginal_independence_on_suite(self, random_suite_tables):
        for scenario, tables in random_suite_tables:
            report = IncentiveVerifier(MatrixMechanism(scenario, tables)).check_marginal_independence()
            assert report.worst_value <= 1e-10, scenario.name

    def test_efficiency_on_suite(self, random_suite_tables):
        for scenario, tables in random_suite_tables[:30]:
            assert IncentiveVerifier(MatrixMechanism(scenario, tables)).check_efficiency().passed

    def test_private_values_both_pass_epic(self, private_suite):
        from src.solver import solve_tables
        for scenario in private_suite:
            tables = solve_tables(scenario)
            assert IncentiveVerifier(MatrixMechanism(scenario, tables)).check_epic().passed
            assert IncentiveVerifier(DynamicPivotMechanism(scenario, tables)).check_epic().passed

    def test_const_fails_epic_somewhere(self, random_suite_tables):
        failures = [scenario.name for scenario, tables in random_suite_tables
                    if not IncentiveVerifier(ConstantPaymentMechanism(scenario, tables)).check_epic().passed]
        assert failures


class TestDPMSearch:
    """Counterexample search for the single-stage baseline."""

    @pytest.mark.slow
    def test_finds_interdependent_witness(self):
        search = DPMCounterexampleSearch(SearchConfig(budget=1000, seed=42))
        witness = search.find_dpm_counterexample()
        assert witness is not None
        assert witness.dpm_gain > 1e-6
        assert witness.matrix_gain <= 1e-7
        assert search.instances_checked == witness.instance + 1

        dpm = ExactUtilityCalculator(DynamicPivotMechanism(witness.scenario, witness.tables))
        gain = dpm.deviation_gain(witness.profile, witness.agent, witness.reported_type)
        assert gain == pytest.approx(witness.dpm_gain)

    def test_search_is_deterministic(self):
        config = SearchConfig(budget=30, seed=5)
        first = DPMCounterexampleSearch(config).find_dpm_counterexample()
        second = DPMCounterexampleSearch(config).find_dpm_counterexample()
        assert (first is None) == (second is None)
        if first is not None:
            assert (first.instance, first.profile, first.agent, first.reported_type) == \
                (second.instance, second.profile, second.agent, second.reported_type)

    def test_private_values_exhaust_budget(self):
        search = DPMCounterexampleSearch(SearchConfig(budget=5, private_values=True))
        assert search.find_dpm_counterexample() is None
        assert search.instances_checked == 5
        with pytest.raises(SearchBudgetExhausted) as excinfo:
            search.require_counterexample()
        assert excinfo.value.context['budget'] == 5


class TestBudget:
    """Per-round budget and payment consistency."""

    def test_matrix_s1_runs_a_deficit(self, s1_scenario, s1_tables):
        simulator = EpisodeSimulator(MatrixMechanism(s1_scenario, s1_tables))
        trajectory = simulator.simulate_episode(StrategyProfile.truthful(2), (0, 0), horizon=4, seed=0)
        summary = budget_metrics(trajectory)
        np.testing.assert_allclose(summary.round_sums, 0.5, atol=1e-8)
        assert summary.deficit_rounds == (0, 1, 2, 3)
        assert summary.inconsistent_rounds == ()
        assert not summary.balanced

    def test_const_is_balanced(self, two_type_scenario, two_type_tables):
        simulator = EpisodeSimulator(ConstantPaymentMechanism(two_type_scenario, two_type_tables))
        trajectory = simulator.simulate_episode(StrategyProfile.truthful(2), (0, 0), horizon=20, seed=1)
        summary = budget_metrics(trajectory)
        assert summary.balanced
        assert summary.minimum == summary.maximum == 0.0
        assert summary.deficit_rounds == ()

    def test_payment_consistency_flags_paid_owner(self, s1_scenario, s1_tables):
        simulator = EpisodeSimulator(MatrixMechanism(s1_scenario, s1_tables))
        # The worker's over-reported value is paid out to the owner in that round.
        strategies = StrategyProfile.single_deviation(2, agent=1, reported_value=5.0, deviation_round=1)
        trajectory = simulator.simulate_episode(strategies, (0, 0), horizon=3, seed=0)
        assert trajectory.outcomes[1].payments[0] > 0
        assert payment_consistency(trajectory) == (1,)
