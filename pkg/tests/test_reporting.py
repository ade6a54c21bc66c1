"""
Tests for the CSV result files.
"""

import numpy as np
import pytest

from src.mechanism import MatrixMechanism, StrategyProfile
from src.reporting import (
    ReportWriter, allocation_text, parse_allocation, read_policy_csv, read_table_csv, read_verdicts_csv,
)
from src.scenario import Allocation
from src.simulator import EpisodeSimulator
from src.utils.error_handling import ReportError
from src.verifier import IncentiveVerifier, budget_metrics


class TestAllocationText:

    def test_format(self):
        assert allocation_text(Allocation(0b11)) == '{0 1}'
        assert allocation_text(Allocation(0)) == '{}'

    def test_parse(self):
        assert parse_allocation('{0 2}') == Allocation(0b101)
        assert parse_allocation('{}') == Allocation(0)


class TestTableFiles:
    """W, W_-i and policy files."""

    def test_s1_files(self, s1_scenario, s1_tables, out_dir):
        paths = ReportWriter(out_dir).write_tables(s1_scenario, s1_tables)
        assert [p.name for p in paths] == ['welfare.csv', 'marginal_welfare_0.csv', 'marginal_welfare_1.csv',
                                           'policy.csv', 'convergence.csv']
        lines = (out_dir / 'policy.csv').read_text().splitlines()
        assert lines[0] == 'state_index,state,value,allocation,ties'
        assert lines[1].startswith('0,(x y),')
        assert lines[1].endswith(',{0 1},1')

    def test_values_reproduce_exactly(self, two_type_scenario, two_type_tables, out_dir):
        ReportWriter(out_dir).write_tables(two_type_scenario, two_type_tables)
        np.testing.assert_array_equal(read_table_csv(out_dir / 'welfare.csv'), two_type_tables.welfare.values)
        for table in two_type_tables.marginals:
            reread = read_table_csv(out_dir / f"marginal_welfare_{table.agent}.csv")
            np.testing.assert_array_equal(reread, table.values)
        policy = read_policy_csv(out_dir / 'policy.csv')
        np.testing.assert_array_equal(policy.masks, two_type_tables.policy.masks)
        np.testing.assert_array_equal(policy.ties, two_type_tables.policy.ties)

    def test_convergence_rows(self, two_type_scenario, two_type_tables, out_dir):
        ReportWriter(out_dir).write_tables(two_type_scenario, two_type_tables)
        lines = (out_dir / 'convergence.csv').read_text().splitlines()
        assert lines[0] == 'table,iterations,residual,tolerance'
        assert [line.split(',')[0] for line in lines[1:]] == ['W', 'W_-0', 'W_-1']

    def test_byte_identical_reruns(self, two_type_scenario, two_type_tables, tmp_path):
        for name in ('first', 'second'):
            (tmp_path / name).mkdir()
            ReportWriter(tmp_path / name).write_tables(two_type_scenario, two_type_tables)
        for path in (tmp_path / 'first').iterdir():
            assert path.read_bytes() == (tmp_path / 'second' / path.name).read_bytes()

    def test_wrong_header_is_rejected(self, out_dir):
        bad = out_dir / 'welfare.csv'
        bad.write_text('state,value\n(x),1\n')
        with pytest.raises(ReportError) as excinfo:
            read_table_csv(bad)
        assert excinfo.value.error_code == 'BAD_HEADER'

    def test_missing_file(self, out_dir):
        with pytest.raises(ReportError) as excinfo:
            read_table_csv(out_dir / 'absent.csv')
        assert excinfo.value.error_code == 'READ_FAILED'


class TestRunFiles:
    """Trajectories, verdicts and budgets."""

    def test_trajectory_rows(self, s1_scenario, s1_tables, out_dir):
        simulator = EpisodeSimulator(MatrixMechanism(s1_scenario, s1_tables))
        trajectory = simulator.simulate_episode(StrategyProfile.truthful(2), (0, 0), horizon=2, seed=0)
        path = ReportWriter(out_dir).write_trajectories(s1_scenario, [trajectory])
        lines = path.read_text().splitlines()
        assert len(lines) == 1 + 2 * 2
        assert lines[1].split(',')[:6] == ['0', '0', '0', 'x', 'x', '1']

    def test_verdicts(self, s1_scenario, s1_tables, out_dir):
        reports = IncentiveVerifier(MatrixMechanism(s1_scenario, s1_tables)).run_all()
        path = ReportWriter(out_dir).write_verdicts({s1_scenario.name: s1_scenario}, reports)
        rows = read_verdicts_csv(path)
        assert [row['property'] for row in rows] == ['epic', 'strict_stage2', 'epir', 'efficiency',
                                                     'marginal_independence']
        assert all(row['verdict'] == 'PASS' for row in rows)
        assert rows[2]['witness'] == 'theta=(x y) agent=1'

    def test_budget_rows(self, s1_scenario, s1_tables, out_dir):
        simulator = EpisodeSimulator(MatrixMechanism(s1_scenario, s1_tables))
        trajectory = simulator.simulate_episode(StrategyProfile.truthful(2), (0, 0), horizon=3, seed=0)
        rows = [(s1_scenario.name, trajectory, budget_metrics(trajectory))]
        path = ReportWriter(out_dir).write_budget(rows)
        lines = path.read_text().splitlines()
        assert lines[0] == 'scenario,mechanism,episode,t,budget,deficit,inconsistent'
        assert len(lines) == 4
        assert all(line.split(',')[5:] == ['1', '0'] for line in lines[1:])
