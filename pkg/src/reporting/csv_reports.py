"""
CSV result files. Numbers are written with 17 significant digits so that
re-reading a file reproduces the in-memory floats exactly; nothing
time-dependent is written, so files are byte-identical across runs.
"""

import csv
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..scenario.model import Allocation, Scenario
from ..simulator.episode import Trajectory
from ..simulator.montecarlo import UtilityEstimate
from ..solver.tables import MechanismTables, PolicyTable
from ..utils.constants import FILE_NAMES, FLOAT_FORMAT
from ..utils.error_handling import ReportError
from ..verifier.budget import BudgetSummary
from ..verifier.incentive_verifier import ViolationReport

WELFARE_HEADER = ['state_index', 'state', 'value']
POLICY_HEADER = ['state_index', 'state', 'value', 'allocation', 'ties']
CONVERGENCE_HEADER = ['table', 'iterations', 'residual', 'tolerance']
TRAJECTORY_HEADER = ['episode', 't', 'agent', 'true_type', 'reported_type', 'allocated', 'true_value',
                     'reported_value', 'payment', 'penalty', 'utility']
UTILITY_HEADER = ['scenario', 'mechanism', 'agent', 'state', 'exact', 'mc_mean', 'mc_stderr',
                  'episodes', 'horizon', 'truncation_bound']
VERDICT_HEADER = ['scenario_id', 'mechanism', 'property', 'cases', 'worst_value', 'tolerance',
                  'verdict', 'witness']
BUDGET_HEADER = ['scenario', 'mechanism', 'episode', 't', 'budget', 'deficit', 'inconsistent']
COMPARISON_HEADER = ['scenario', 'mechanism', 'epic', 'epir', 'strict_stage2', 'worst_gain',
                     'min_utility', 'budget_min', 'budget_max', 'budget_mean', 'deficit_rounds',
                     'inconsistent_rounds']


def fmt(value: Optional[float]) -> str:
    if value is None:
        return ''
    return format(float(value), FLOAT_FORMAT)


def allocation_text(allocation: Allocation) -> str:
    return '{' + ' '.join(str(m) for m in allocation.members) + '}'


def parse_allocation(text: str) -> Allocation:
    inner = text.strip()[1:-1].split()
    return Allocation.from_members(int(m) for m in inner)


def _write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    try:
        with open(path, 'w', newline='', encoding='utf-8') as handle:
            writer = csv.writer(handle, lineterminator='\n')
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as error:
        raise ReportError(f"Cannot write {path}: {error}", error_code='WRITE_FAILED',
                          context={'path': str(path)})
    return path


def _read_rows(path: Path, header: Sequence[str]) -> List[Dict[str, str]]:
    try:
        with open(path, newline='', encoding='utf-8') as handle:
            reader = csv.DictReader(handle)
            if reader.fieldnames != list(header):
                raise ReportError(f"{path} has columns {reader.fieldnames}, expected {list(header)}",
                                  error_code='BAD_HEADER', context={'path': str(path)})
            return list(reader)
    except OSError as error:
        raise ReportError(f"Cannot read {path}: {error}", error_code='READ_FAILED',
                          context={'path': str(path)})


class ReportWriter:
    """Writes every result file of a run into one output directory."""

    def __init__(self, out_dir: Union[str, Path]) -> None:
        self.out_dir = Path(out_dir)
        self.written: List[Path] = []

    def _path(self, key: str, **names: object) -> Path:
        path = self.out_dir / FILE_NAMES[key].format(**names)
        self.written.append(path)
        return path

    def write_tables(self, scenario: Scenario, tables: MechanismTables) -> List[Path]:
        """W, every W_-i, the policy and the convergence summary."""

        paths = [_write_rows(self._path('WELFARE'), WELFARE_HEADER, (
            [state, scenario.format_profile(scenario.profile(state)), fmt(tables.welfare.values[state])]
            for state in range(scenario.n_states)))]

        for table in tables.marginals:
            agent = table.agent
            reduced_sizes = scenario.reduced_sizes(agent)
            others = [j for j in range(scenario.n) if j != agent]
            rows = []
            for reduced in range(len(table.values)):
                reduced_profile = np.unravel_index(reduced, reduced_sizes) if reduced_sizes else ()
                labels = scenario.types.profile_labels([int(t) for t in reduced_profile], others)
                rows.append([reduced, '(' + ' '.join(labels) + ')', fmt(table.values[reduced])])
            paths.append(_write_rows(self._path('MARGINAL', agent=agent), WELFARE_HEADER, rows))

        paths.append(_write_rows(self._path('POLICY'), POLICY_HEADER, (
            [state, scenario.format_profile(scenario.profile(state)), fmt(tables.welfare.values[state]),
             allocation_text(tables.policy[state]), int(tables.policy.ties[state])]
            for state in range(scenario.n_states))))

        convergence = [['W', tables.welfare.iterations, fmt(tables.welfare.residual), fmt(tables.tolerance)]]
        convergence += [[f"W_-{table.agent}", table.iterations, fmt(table.residual), fmt(table.tolerance)]
                        for table in tables.marginals]
        paths.append(_write_rows(self._path('CONVERGENCE'), CONVERGENCE_HEADER, convergence))
        return paths

    def write_trajectories(self, scenario: Scenario, trajectories: Sequence[Trajectory]) -> Path:
        rows = []
        for trajectory in trajectories:
            for outcome in trajectory.outcomes:
                for agent in range(scenario.n):
                    labels = scenario.types.labels[agent]
                    reported_value = None if outcome.value_reports is None else outcome.value_reports[agent]
                    rows.append([
                        trajectory.episode, outcome.t, agent,
                        labels[outcome.true_profile[agent]], labels[outcome.type_reports[agent]],
                        int(agent in outcome.allocation), fmt(outcome.true_values[agent]),
                        fmt(reported_value), fmt(outcome.payments[agent]), fmt(outcome.penalties[agent]),
                        fmt(outcome.utilities[agent]),
                    ])
        return _write_rows(self._path('TRAJECTORY'), TRAJECTORY_HEADER, rows)

    def write_utilities(self, rows: Sequence[Dict]) -> Path:
        """rows: dicts with scenario, mechanism, agent, state, exact and a UtilityEstimate."""
        return _write_rows(self._path('UTILITY'), UTILITY_HEADER, (
            [row['scenario'], row['mechanism'], row['agent'], row['state'], fmt(row['exact']),
             *_estimate_fields(row['estimate'])]
            for row in rows))

    def write_verdicts(self, scenarios: Dict[str, Scenario], reports: Sequence[ViolationReport]) -> Path:
        return _write_rows(self._path('VERDICTS'), VERDICT_HEADER, (
            [r.scenario, r.mechanism, r.prop, r.cases, fmt(r.worst_value), fmt(r.tolerance), r.verdict,
             r.witness.describe(scenarios[r.scenario]) if r.witness else '']
            for r in reports))

    def write_budget(self, entries: Sequence[Tuple[str, Trajectory, BudgetSummary]]) -> Path:
        """entries: (scenario name, trajectory, its BudgetSummary), one per mechanism run."""
        rows = []
        for name, trajectory, summary in entries:
            for outcome in trajectory.outcomes:
                rows.append([name, trajectory.mechanism, trajectory.episode, outcome.t,
                             fmt(outcome.budget), int(outcome.t in summary.deficit_rounds),
                             int(outcome.t in summary.inconsistent_rounds)])
        return _write_rows(self._path('BUDGET'), BUDGET_HEADER, rows)

    def write_comparison(self, rows: Sequence[Dict]) -> Path:
        """rows: dicts with scenario, mechanism, the three verdict reports and a BudgetSummary."""
        return _write_rows(self._path('COMPARISON'), COMPARISON_HEADER, (
            [row['scenario'], row['mechanism'], row['epic'].verdict, row['epir'].verdict,
             row['strict_stage2'].verdict, fmt(row['epic'].worst_value), fmt(row['epir'].worst_value),
             fmt(row['budget'].minimum), fmt(row['budget'].maximum), fmt(row['budget'].mean),
             len(row['budget'].deficit_rounds), len(row['budget'].inconsistent_rounds)]
            for row in rows))


def _estimate_fields(estimate: Optional[UtilityEstimate]) -> List[str]:
    if estimate is None:
        return ['', '', '', '', '']
    return [fmt(estimate.mean), fmt(estimate.stderr), str(estimate.episodes), str(estimate.horizon),
            fmt(estimate.truncation_bound)]


def read_table_csv(path: Union[str, Path]) -> np.ndarray:
    """Values of a W or W_-i CSV, in state-index order."""
    rows = _read_rows(Path(path), WELFARE_HEADER)
    rows.sort(key=lambda row: int(row['state_index']))
    return np.array([float(row['value']) for row in rows])


def read_policy_csv(path: Union[str, Path]) -> PolicyTable:
    rows = _read_rows(Path(path), POLICY_HEADER)
    rows.sort(key=lambda row: int(row['state_index']))
    masks = np.array([parse_allocation(row['allocation']).mask for row in rows], dtype=np.int64)
    ties = np.array([int(row['ties']) for row in rows], dtype=np.int64)
    return PolicyTable(masks, ties)


def read_verdicts_csv(path: Union[str, Path]) -> List[Dict[str, str]]:
    return _read_rows(Path(path), VERDICT_HEADER)
