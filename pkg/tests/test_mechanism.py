"""
Tests for penalties, reporting strategies and the three payment rules.
"""

import numpy as np
import pytest

from src.mechanism import (
    AgentStrategy, ConstantPaymentMechanism, DeviationStrategy, DynamicPivotMechanism, MatrixMechanism,
    PenaltySpec, StrategyProfile, TRUTHFUL, const_payment, make_mechanism,
)
from src.scenario import Allocation
from src.solver import solve_tables
from src.utils.error_handling import ScenarioError, StrategyDomainError


class TestPenaltySpec:
    """Built-in consistency penalties."""

    def test_quadratic(self):
        penalty = PenaltySpec.parse('quadratic')
        assert penalty(3.0, 2.0) == 1.0
        assert penalty(2.0, 2.0) == 0.0

    def test_absolute(self):
        assert PenaltySpec.parse('absolute')(1.5, 2.0) == 0.5

    def test_scaled(self):
        penalty = PenaltySpec.parse('scaled:2')
        assert penalty(3.0, 2.0) == 2.0
        assert str(penalty) == 'scaled:2.0'

    def test_zero_exactly_on_consistent_report(self):
        for text in ('quadratic', 'absolute', 'scaled:0.1'):
            penalty = PenaltySpec.parse(text)
            assert penalty(0.123, 0.123) == 0.0
            assert penalty(0.124, 0.123) > 0.0

    @pytest.mark.parametrize('text', ['cubic', 'scaled:', 'scaled:-1', 'scaled:0', 'scaled:abc'])
    def test_invalid(self, text):
        with pytest.raises(ScenarioError):
            PenaltySpec.parse(text)


class TestStrategies:
    """Truthful and single-deviation reporting."""

    def test_truthful_reports(self):
        assert TRUTHFUL.type_report(0, 2) == 2
        assert TRUTHFUL.value_report(5, -0.25, 0) == -0.25
        assert StrategyProfile.truthful(3).is_truthful

    def test_deviation_only_in_its_round(self):
        deviation = DeviationStrategy(deviation_round=2, reported_type=1, value_shift=0.5)
        assert deviation.type_report(0, 0) == 0
        assert deviation.type_report(2, 0) == 1
        assert deviation.value_report(1, 1.0, 0) == 1.0
        assert deviation.value_report(2, 1.0, 1) == 1.5
        assert not deviation.is_truthful

    def test_reported_value_replaces_shift(self):
        deviation = DeviationStrategy(reported_value=7.0, value_shift=0.5)
        assert deviation.value_report(0, 1.0, 0) == 7.0

    def test_single_deviation_profile(self):
        profile = StrategyProfile.single_deviation(3, agent=1, reported_type=0, deviation_round=4)
        assert profile.deviator == 1
        assert profile.deviation_round == 4
        assert profile[0] is TRUTHFUL and profile[2] is TRUTHFUL
        assert not profile.is_truthful
        with pytest.raises(ValueError):
            StrategyProfile.single_deviation(2, agent=2)


class TestMatrixMechanismS1:
    """Payments on the two-agent singleton scenario."""

    def setup_method(self):
        from tests.conftest import S1_TEXT, scenario_from_text
        self.scenario = scenario_from_text(S1_TEXT)
        self.tables = solve_tables(self.scenario)
        self.mechanism = MatrixMechanism(self.scenario, self.tables)

    def test_allocation(self):
        assert self.mechanism.allocate((0, 0)) == Allocation(0b11)

    def test_consistent_value(self):
        assert self.mechanism.consistent_value(0, Allocation(0b11), (0, 0)) == 2.0

    def test_truthful_payments(self):
        payments, penalties = self.mechanism.payments((0, 0), np.array([2.0, -0.5]))
        np.testing.assert_allclose(payments, [-0.5, 1.0], atol=1e-8)
        np.testing.assert_array_equal(penalties, [0.0, 0.0])

    def test_truthful_round(self):
        outcome = self.mechanism.run_round((0, 0), StrategyProfile.truthful(2))
        np.testing.assert_allclose(outcome.utilities, [1.5, 0.5], atol=1e-8)
        assert outcome.budget == pytest.approx(0.5, abs=1e-8)
        np.testing.assert_array_equal(outcome.consistent_values, [2.0, -0.5])

    def test_value_misreport_is_penalized_and_moves_others_payment(self):
        payments, penalties = self.mechanism.payments((0, 0), np.array([3.0, -0.5]))
        assert penalties[0] == 1.0
        assert payments[0] == pytest.approx(-1.5, abs=1e-8)
        assert payments[1] == pytest.approx(2.0, abs=1e-8)

    def test_penalty_override_and_ablation(self):
        absolute = MatrixMechanism(self.scenario, self.tables, PenaltySpec('absolute'))
        _, penalties = absolute.payments((0, 0), np.array([2.0, 0.5]))
        assert penalties[1] == 1.0
        ablated = MatrixMechanism(self.scenario, self.tables, ablate_penalty=True)
        _, penalties = ablated.payments((0, 0), np.array([5.0, 0.5]))
        np.testing.assert_array_equal(penalties, [0.0, 0.0])

    def test_value_reports_required(self):
        with pytest.raises(ValueError):
            self.mechanism.payments((0, 0))

    def test_out_of_range_type_report(self):
        strategies = StrategyProfile((DeviationStrategy(reported_type=3), TRUTHFUL))
        with pytest.raises(StrategyDomainError):
            self.mechanism.run_round((0, 0), strategies)

    def test_non_finite_value_report(self):
        strategies = StrategyProfile((DeviationStrategy(reported_value=float('nan')), TRUTHFUL))
        with pytest.raises(StrategyDomainError):
            self.mechanism.run_round((0, 0), strategies)


class TestBaselines:
    """DPM and CONST on fixed scenarios."""

    def test_dpm_matches_matrix_on_s1(self, s1_scenario, s1_tables):
        dpm = DynamicPivotMechanism(s1_scenario, s1_tables)
        payments, penalties = dpm.payments((0, 0))
        np.testing.assert_allclose(payments, [-0.5, 1.0], atol=1e-8)
        np.testing.assert_array_equal(penalties, 0.0)
        assert not dpm.two_stage

    def test_const_payment_rule(self):
        payments = const_payment(Allocation.from_members([0, 1, 2]), 0.5, owner=0, n=3)
        np.testing.assert_array_equal(payments, [-1.0, 0.5, 0.5])
        np.testing.assert_array_equal(const_payment(Allocation(0b001), 0.5, owner=0, n=3), 0.0)

    def test_const_budget_balanced(self, two_type_scenario, two_type_tables):
        const = ConstantPaymentMechanism(two_type_scenario, two_type_tables)
        for profile in two_type_scenario.enumerate_states():
            payments, _ = const.payments(profile)
            assert payments.sum() == 0.0
            allocation = const.allocate(profile)
            if 1 in allocation:
                assert payments[1] == two_type_scenario.fixed_price

    def test_make_mechanism(self, s1_scenario, s1_tables):
        assert make_mechanism('matrix', s1_scenario, s1_tables).name == 'matrix'
        assert make_mechanism('dpm', s1_scenario, s1_tables).name == 'dpm'
        assert make_mechanism('const', s1_scenario, s1_tables).name == 'const'
        with pytest.raises(ValueError):
            make_mechanism('vcg', s1_scenario, s1_tables)

    def test_allocation_depends_on_reports_only(self, two_type_scenario, two_type_tables):
        mechanism = MatrixMechanism(two_type_scenario, two_type_tables)
        reports = (1, 0)
        strategies = StrategyProfile((DeviationStrategy(reported_type=1), TRUTHFUL))
        for true_owner in range(2):
            outcome = mechanism.run_round((true_owner, 0), strategies)
            assert outcome.allocation == mechanism.allocate(reports)

class RecordingStrategy(AgentStrategy):
    """Truthful, but shades its value report by anything extra it is handed."""

    def __init__(self):
        self.calls = []

    def value_report(self, t, true_value, own_type_report, *extra, **named):
        self.calls.append((t, true_value, own_type_report, extra, named))
        return true_value + len(extra) + len(named)


class TestTwoStageInformation:
    """Stage-2 reports depend on the agent's own round, value and stage-1 report only."""

    def test_value_report_sees_only_own_inputs(self, two_type_scenario, two_type_tables):
        mechanism = MatrixMechanism(two_type_scenario, two_type_tables)
        for true_profile in two_type_scenario.enumerate_states():
            for worker_report in range(2):
                recorder = RecordingStrategy()
                worker = DeviationStrategy(deviation_round=3, reported_type=worker_report)
                outcome = mechanism.run_round(true_profile, StrategyProfile((recorder, worker)), t=3)
                assert recorder.calls == [(3, float(outcome.true_values[0]), true_profile[0], (), {})]
                assert outcome.value_reports[0] == outcome.true_values[0]
                assert outcome.penalties[0] == mechanism.penalty(outcome.true_values[0],
                                                                 outcome.consistent_values[0])

    def test_others_reports_never_reach_stage2(self, random_suite_tables):
        scenario, tables = next((s, t) for s, t in random_suite_tables if s.n == 3)
        mechanism = MatrixMechanism(scenario, tables)
        true_profile = scenario.profile(0)
        seen = {}
        for first in range(scenario.sizes[1]):
            for second in range(scenario.sizes[2]):
                recorder = RecordingStrategy()
                strategies = StrategyProfile((recorder, DeviationStrategy(reported_type=first),
                                              DeviationStrategy(reported_type=second)))
                outcome = mechanism.run_round(true_profile, strategies)
                (call,) = recorder.calls
                assert call[3:] == ((), {})
                assert outcome.type_reports == (true_profile[0], first, second)
                # Same own inputs, same report, whatever the others said.
                report = float(outcome.value_reports[0])
                assert seen.setdefault(call[:3], report) == report


class TestNearStaticLimit:
    """With delta near zero MATRIX pays the static two-stage pivot payment."""

    def test_payments_approach_static_pivot(self, fixtures_dir):
        from tests.conftest import scenario_from_text
        text = (fixtures_dir / 'two_type.scenario').read_text(encoding='utf-8')
        scenario = scenario_from_text(text.replace('delta = 0.8', 'delta = 1e-9'))
        assert scenario.delta == 1e-9
        mechanism = MatrixMechanism(scenario, solve_tables(scenario))
        allowed = 2 * scenario.delta * scenario.n * scenario.bound / (1.0 - scenario.delta) + 1e-8

        for state, profile in enumerate(scenario.enumerate_states()):
            outcome = mechanism.run_round(profile, StrategyProfile.truthful(scenario.n))
            static_best = scenario.stage_welfare[:, state].max()
            assert scenario.stage_welfare[outcome.allocation.mask, state] >= static_best - allowed
            for agent in range(scenario.n):
                others = float(np.sum(np.delete(outcome.value_reports, agent)))
                masks = [a.mask for a in scenario.enumerate_allocations(excluded_agent=agent)]
                static_marginal = scenario.stage_welfare[masks, state].max()
                assert outcome.payments[agent] == pytest.approx(others - static_marginal, abs=allowed)


class TestPrivateValueReduction:
    """With private values MATRIX and DPM pay exactly the same amounts."""

    def test_payments_agree_exactly(self, private_suite):
        for scenario in private_suite:
            tables = solve_tables(scenario)
            matrix = MatrixMechanism(scenario, tables)
            dpm = DynamicPivotMechanism(scenario, tables)
            for profile in scenario.enumerate_states():
                state = scenario.state_index(profile)
                for agent in range(scenario.n):
                    for reported_type in range(scenario.sizes[agent]):
                        reported = scenario.replace_type(profile, agent, reported_type)
                        reported_state = scenario.state_index(reported)
                        allocation = tables.policy[reported_state]
                        value_reports = scenario.values[:, allocation.mask, state].copy()
                        value_reports[agent] = scenario.values[agent, allocation.mask, reported_state]
                        matrix_payments, _ = matrix.payments(reported, value_reports)
                        dpm_payments, _ = dpm.payments(reported)
                        np.testing.assert_array_equal(matrix_payments, dpm_payments)
