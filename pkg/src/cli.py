#!/usr/bin/env python3
"""
matrix-mech: dynamic mechanisms with interdependent valuations.

Usage:
    matrix-mech solve    --scenario s1.scenario --out results/
    matrix-mech verify   --scenario suite/ --out results/ [--ablate-penalty]
    matrix-mech compare  --scenario witness.scenario --out results/
    matrix-mech simulate --scenario s1.scenario --episodes 10000 --seed 42
    matrix-mech search-dpm --out results/
    matrix-mech generate --out suite/ --count 100

Exit codes: 0 success, 1 invalid scenario or configuration, 2 the welfare
solver did not converge, 3 a property check failed.
"""

import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, List, NoReturn, Optional, Tuple, TypeVar

import click

from src.mechanism import PenaltySpec, StrategyProfile, make_mechanism
from src.reporting import ReportWriter
from src.scenario import ScenarioGenerator, load_scenario, outsourcing_scenario, write_scenario
from src.scenario.model import Scenario
from src.simulator import (
    EpisodeSimulator, ExactUtilityCalculator, MonteCarloEstimator, UtilityEstimate, truncation_bound,
)
from src.solver import MechanismTables, solve_tables
from src.utils.constants import (
    CLI_SYMBOLS, DEFAULT_CHECK_TOLERANCE, DEFAULT_EPISODES, DEFAULT_GRID_STEPS, DEFAULT_MECHANISM,
    DEFAULT_SEED, DEFAULT_SOLVER_TOLERANCE, DEFAULT_TRUNCATION_TARGET, DPM_SEARCH_BUDGET, EXIT_INVALID,
    EXIT_NON_CONVERGENCE, EXIT_OK, EXIT_PROPERTY_FAILED, FILE_NAMES, MECHANISMS, SCENARIO_SUFFIX,
    TOOL_DESCRIPTION, VERSION,
)
from src.utils.error_handling import (
    ErrorHandler, ErrorSeverity, MechanismError, NonConvergence, ScenarioError, SearchBudgetExhausted,
    validate_output_dir,
)
from src.utils.logger import RunLogger, setup_logger
from src.verifier import DPMCounterexampleSearch, IncentiveVerifier, SearchConfig, budget_metrics

logger = logging.getLogger(__name__)

Command = TypeVar('Command', bound=Callable[..., Any])


@dataclass(frozen=True)
class RunConfig:
    """Options of one CLI invocation after click has parsed them."""

    command: str
    scenario: Optional[str] = None
    out: str = 'results'
    tol: float = DEFAULT_SOLVER_TOLERANCE
    check_tol: float = DEFAULT_CHECK_TOLERANCE
    horizon: Optional[int] = None
    episodes: int = DEFAULT_EPISODES
    seed: int = DEFAULT_SEED
    mechanisms: Tuple[str, ...] = (DEFAULT_MECHANISM,)
    penalty: Optional[str] = None
    ablate_penalty: bool = False
    grid_steps: int = DEFAULT_GRID_STEPS
    extra: dict = field(default_factory=dict)

    def validate(self) -> 'RunConfig':
        """Reject out-of-range values; raises MechanismError with code INVALID_CONFIG."""

        problems = []
        if not self.tol > 0:
            problems.append(f"--tol must be positive, got {self.tol}")
        if not self.check_tol > 0:
            problems.append(f"--check-tol must be positive, got {self.check_tol}")
        if self.horizon is not None and self.horizon < 1:
            problems.append(f"--horizon must be at least 1, got {self.horizon}")
        if self.episodes < 1:
            problems.append(f"--episodes must be at least 1, got {self.episodes}")
        if self.grid_steps < 0:
            problems.append(f"--grid-steps must be non-negative, got {self.grid_steps}")
        for name in self.mechanisms:
            if name not in MECHANISMS:
                problems.append(f"--mechanism must be one of {', '.join(MECHANISMS)}, got {name}")
        if problems:
            raise MechanismError('; '.join(problems), error_code='INVALID_CONFIG',
                                 context={'command': self.command})
        if self.penalty is not None:
            PenaltySpec.parse(self.penalty)
        return self

    @property
    def penalty_spec(self) -> Optional[PenaltySpec]:
        return PenaltySpec.parse(self.penalty) if self.penalty else None


class RunStatus:
    """Exit code of a suite run: invalid beats non-convergence beats a failed property."""

    def __init__(self) -> None:
        self.codes: List[int] = []

    def record(self, code: int) -> None:
        self.codes.append(code)

    @property
    def exit_code(self) -> int:
        for code in (EXIT_INVALID, EXIT_NON_CONVERGENCE, EXIT_PROPERTY_FAILED):
            if code in self.codes:
                return code
        return EXIT_OK


def scenario_paths(path: str) -> List[Path]:
    """A scenario file, or every *.scenario file of a suite directory in name order."""
    target = Path(path)
    if target.is_dir():
        return sorted(target.glob(f"*{SCENARIO_SUFFIX}"))
    return [target]


def _run_context() -> Tuple[RunLogger, ErrorHandler, RunStatus]:
    return RunLogger(logger), ErrorHandler(logger), RunStatus()


def _load_all(config: RunConfig, handler: ErrorHandler,
              status: RunStatus) -> List[Tuple[Path, Scenario]]:
    """Load every scenario; a bad file is recorded and skipped so the rest of the suite still runs."""

    if config.scenario is None:
        raise MechanismError("--scenario is required", error_code='INVALID_CONFIG')
    paths = scenario_paths(config.scenario)
    if not paths:
        raise ScenarioError(f"No {SCENARIO_SUFFIX} files in {config.scenario}", error_code='EMPTY_SUITE',
                            context={'path': config.scenario})

    loaded = []
    for path in paths:
        try:
            scenario = load_scenario(str(path))
        except ScenarioError as error:
            click.secho(f"{CLI_SYMBOLS['ERROR']} {path.name}: {error}", fg='red')
            handler.handle_error(error, ErrorSeverity.HIGH, {'file': str(path)})
            status.record(EXIT_INVALID)
            continue
        if config.penalty_spec is not None:
            scenario = scenario.with_penalty(config.penalty_spec)
        loaded.append((path, scenario))
    return loaded


def _solve(config: RunConfig, scenario: Scenario, run_logger: RunLogger,
           handler: ErrorHandler, status: RunStatus) -> Optional[MechanismTables]:
    run_logger.log_scenario(scenario.name, scenario.n, scenario.n_states, scenario.delta)
    try:
        return solve_tables(scenario, config.tol, run_logger=run_logger)
    except NonConvergence as error:
        click.secho(f"{CLI_SYMBOLS['ERROR']} {scenario.name}: {error}", fg='red')
        handler.handle_error(error, ErrorSeverity.HIGH, {'scenario': scenario.name})
        status.record(EXIT_NON_CONVERGENCE)
        return None


def _out_dir(config: RunConfig, path: Path, suite: bool) -> Path:
    base = Path(config.out)
    return validate_output_dir(str(base / path.stem if suite else base))


def _finish(run_logger: RunLogger, handler: ErrorHandler, status: RunStatus) -> int:
    run_logger.log_summary()
    stats = run_logger.get_run_summary()
    issues = handler.get_error_summary()
    click.echo(f"{CLI_SYMBOLS['QUALITY']} {stats['solves']} solves, "
               f"{stats['checks_passed'] + stats['checks_failed']} checks, {stats['episodes']} episodes, "
               f"{issues['total_errors']} errors, {issues['total_warnings']} warnings")
    if issues['total_errors'] or issues['total_warnings']:
        click.echo(handler.generate_error_report())
    if handler.has_errors():
        logger.debug(f"Error codes: {', '.join(handler.error_codes())}")
    return status.exit_code


def cmd_solve(config: RunConfig) -> int:
    """W, every W_-i, the efficient policy and a convergence summary per scenario."""

    run_logger, handler, status = _run_context()
    loaded = _load_all(config, handler, status)
    suite = Path(config.scenario).is_dir()

    for path, scenario in loaded:
        click.echo(f"{CLI_SYMBOLS['PROCESSING']} Solving {scenario.name} "
                   f"({scenario.n} agents, {scenario.n_states} profiles)...")
        started = time.perf_counter()
        tables = _solve(config, scenario, run_logger, handler, status)
        if tables is None:
            continue
        out = _out_dir(config, path, suite)
        ReportWriter(out).write_tables(scenario, tables)
        click.secho(f"{CLI_SYMBOLS['SUCCESS']} {scenario.name}: {tables.welfare.iterations} sweeps, "
                    f"residual {tables.welfare.residual:.3e}, {time.perf_counter() - started:.3f}s "
                    f"-> {out}", fg='green')

    return _finish(run_logger, handler, status)


def _initial_profile(scenario: Scenario, labels: Optional[str]) -> Tuple[int, ...]:
    if not labels:
        return scenario.profile(0)
    tokens = labels.replace(',', ' ').split()
    if len(tokens) != scenario.n:
        raise MechanismError(f"--initial needs {scenario.n} type labels, got {len(tokens)}",
                             error_code='INVALID_CONFIG', context={'initial': labels})
    try:
        return tuple(scenario.types.label_index(i, token) for i, token in enumerate(tokens))
    except ValueError:
        raise MechanismError(f"--initial has an unknown type label in '{labels}'",
                             error_code='INVALID_CONFIG', context={'initial': labels})


def _strategies(config: RunConfig, scenario: Scenario) -> StrategyProfile:
    extra = config.extra
    agent = extra.get('deviate_agent')
    if agent is None:
        return StrategyProfile.truthful(scenario.n)
    if not 0 <= agent < scenario.n:
        raise MechanismError(f"--deviate-agent {agent} out of range for {scenario.n} agents",
                             error_code='INVALID_CONFIG')
    reported_type = None
    if extra.get('deviate_type'):
        try:
            reported_type = scenario.types.label_index(agent, extra['deviate_type'])
        except ValueError:
            raise MechanismError(f"agent {agent} has no type '{extra['deviate_type']}'",
                                 error_code='INVALID_CONFIG')
    return StrategyProfile.single_deviation(scenario.n, agent, reported_type,
                                            value_shift=extra.get('value_shift', 0.0),
                                            deviation_round=extra.get('deviate_round', 0))


def _exact_utility(utility: ExactUtilityCalculator, strategies: StrategyProfile,
                   profile: Tuple[int, ...], agent: int) -> Optional[float]:
    """Closed-form value where one exists: truthful play, or the deviator of a round-0 deviation."""

    scenario = utility.scenario
    state = scenario.state_index(profile)
    if strategies.is_truthful:
        return float(utility.continuation_utility(agent)[state])
    if strategies.deviator != agent or strategies.deviation_round != 0:
        return None
    deviation = strategies[agent]
    reported_type = deviation.type_report(0, profile[agent])
    reported_state = scenario.state_index(scenario.replace_type(profile, agent, reported_type))
    allocation = utility.tables.policy[reported_state]
    true_value = float(scenario.values[agent, allocation.mask, state])
    value_report = deviation.value_report(0, true_value, reported_type)
    return utility.exact_deviation_utility(profile, agent, reported_type, value_report)


def cmd_simulate(config: RunConfig) -> int:
    """Seeded episodes of one mechanism: trajectory rows and per-agent utility estimates."""

    run_logger, handler, status = _run_context()
    loaded = _load_all(config, handler, status)
    suite = Path(config.scenario).is_dir()
    record = config.extra.get('record', 1)

    for path, scenario in loaded:
        tables = _solve(config, scenario, run_logger, handler, status)
        if tables is None:
            continue
        try:
            profile = _initial_profile(scenario, config.extra.get('initial'))
            strategies = _strategies(config, scenario)
        except MechanismError as error:
            click.secho(f"{CLI_SYMBOLS['ERROR']} {scenario.name}: {error}", fg='red')
            handler.handle_error(error, ErrorSeverity.HIGH, {'scenario': scenario.name})
            status.record(EXIT_INVALID)
            continue

        name = config.mechanisms[0]
        mechanism = make_mechanism(name, scenario, tables, config.penalty_spec, config.ablate_penalty)
        estimator = MonteCarloEstimator(mechanism)
        horizon = config.horizon or estimator.default_horizon()
        click.echo(f"{CLI_SYMBOLS['PROCESSING']} {scenario.name} [{name}]: {config.episodes} episodes, "
                   f"T={horizon}, seed {config.seed}")

        started = time.perf_counter()
        rows = []
        for agent in range(scenario.n):
            estimate: UtilityEstimate = estimator.monte_carlo_utility(
                strategies, profile, agent, horizon, config.episodes, config.seed)
            rows.append({'scenario': scenario.name, 'mechanism': name, 'agent': agent,
                         'state': scenario.format_profile(profile),
                         'exact': _exact_utility(estimator.exact, strategies, profile, agent),
                         'estimate': estimate})
        run_logger.log_simulation(name, config.episodes, horizon)
        bound = truncation_bound(scenario, estimator.exact.max_truthful_payment(), horizon)
        if bound >= DEFAULT_TRUNCATION_TARGET:
            handler.add_warning(f"{scenario.name}: T={horizon} leaves a truncation bound of {bound:.3e}",
                                context={'scenario': scenario.name, 'horizon': horizon})

        simulator = EpisodeSimulator(mechanism)
        trajectories = [simulator.simulate_episode(strategies, profile, horizon, config.seed, k)
                        for k in range(min(record, config.episodes))]
        writer = ReportWriter(_out_dir(config, path, suite))
        writer.write_trajectories(scenario, trajectories)
        writer.write_utilities(rows)
        click.secho(f"{CLI_SYMBOLS['SUCCESS']} {scenario.name} [{name}] done in "
                    f"{time.perf_counter() - started:.3f}s -> {writer.out_dir}", fg='green')

    return _finish(run_logger, handler, status)


def cmd_verify(config: RunConfig) -> int:
    """All property checks for one mechanism on every scenario; one verdict row per property."""

    run_logger, handler, status = _run_context()
    loaded = _load_all(config, handler, status)
    reports, scenarios = [], {}

    for _, scenario in loaded:
        tables = _solve(config, scenario, run_logger, handler, status)
        if tables is None:
            continue
        scenarios[scenario.name] = scenario
        for name in config.mechanisms:
            mechanism = make_mechanism(name, scenario, tables, config.penalty_spec, config.ablate_penalty)
            verifier = IncentiveVerifier(mechanism, config.check_tol, config.grid_steps)
            for report in verifier.run_all():
                reports.append(report)
                if report.applicable:
                    run_logger.log_check(scenario.name, report.prop, report.passed, report.worst_value)
                if not report.passed:
                    status.record(EXIT_PROPERTY_FAILED)
                    click.secho(f"{CLI_SYMBOLS['WARNING']} {scenario.name} [{name}] {report.prop}: FAIL "
                                f"(worst {report.worst_value:.3e})", fg='yellow')

    out = validate_output_dir(config.out)
    ReportWriter(out).write_verdicts(scenarios, reports)
    failed = sum(1 for report in reports if not report.passed)
    colour = 'green' if failed == 0 else 'yellow'
    click.secho(f"{CLI_SYMBOLS['REPORT']} {len(reports)} verdicts, {failed} failed -> "
                f"{out / FILE_NAMES['VERDICTS']}", fg=colour)
    return _finish(run_logger, handler, status)


def cmd_compare(config: RunConfig) -> int:
    """EPIC, EPIR and stage-2 verdicts plus budget metrics for each mechanism side by side."""

    run_logger, handler, status = _run_context()
    loaded = _load_all(config, handler, status)
    out = validate_output_dir(config.out)
    writer = ReportWriter(out)
    rows, reports, scenarios, budgets = [], [], {}, []

    for _, scenario in loaded:
        tables = _solve(config, scenario, run_logger, handler, status)
        if tables is None:
            continue
        scenarios[scenario.name] = scenario
        profile = scenario.profile(0)
        for name in config.mechanisms:
            mechanism = make_mechanism(name, scenario, tables, config.penalty_spec, config.ablate_penalty)
            verifier = IncentiveVerifier(mechanism, config.check_tol, config.grid_steps)
            checks = {
                'epic': verifier.check_epic(),
                'epir': verifier.check_epir(),
                'strict_stage2': verifier.check_strict_stage2(),
            }
            horizon = config.horizon or MonteCarloEstimator(mechanism).default_horizon()
            trajectory = EpisodeSimulator(mechanism).simulate_episode(
                StrategyProfile.truthful(scenario.n), profile, horizon, config.seed)
            summary = budget_metrics(trajectory)
            rows.append({'scenario': scenario.name, 'mechanism': name, 'budget': summary, **checks})
            budgets.append((scenario.name, trajectory, summary))

            for report in checks.values():
                reports.append(report)
                if not report.passed:
                    status.record(EXIT_PROPERTY_FAILED)
            click.echo(f"{CLI_SYMBOLS['QUALITY']} {scenario.name} [{name}] EPIC {checks['epic'].verdict}, "
                       f"EPIR {checks['epir'].verdict}, stage 2 {checks['strict_stage2'].verdict}, "
                       f"budget mean {summary.mean:.6g}")

    writer.write_comparison(rows)
    writer.write_verdicts(scenarios, reports)
    writer.write_budget(budgets)
    click.secho(f"{CLI_SYMBOLS['REPORT']} Comparison written to {out / FILE_NAMES['COMPARISON']}", fg='green')
    return _finish(run_logger, handler, status)


def cmd_search_dpm(config: RunConfig) -> int:
    """Look for an instance where DPM rewards a type misreport and MATRIX does not."""

    run_logger, handler, status = _run_context()
    search_config = SearchConfig(budget=config.extra.get('budget', DPM_SEARCH_BUDGET), seed=config.seed,
                                 private_values=config.extra.get('private_values', False),
                                 solver_tol=config.tol)
    click.echo(f"{CLI_SYMBOLS['PROCESSING']} Searching up to {search_config.budget} random scenarios "
               f"(seed {search_config.seed})...")
    started = time.perf_counter()
    search = DPMCounterexampleSearch(search_config)
    try:
        witness = search.require_counterexample()
    except SearchBudgetExhausted as error:
        click.secho(f"{CLI_SYMBOLS['WARNING']} {error}", fg='yellow')
        handler.handle_error(error, ErrorSeverity.MEDIUM)
        status.record(EXIT_PROPERTY_FAILED)
        return _finish(run_logger, handler, status)

    out = validate_output_dir(config.out)
    scenario = witness.scenario
    write_scenario(scenario, out / FILE_NAMES['WITNESS'])
    reports = [
        IncentiveVerifier(make_mechanism(name, scenario, witness.tables), config.check_tol,
                          config.grid_steps).check_epic()
        for name in ('matrix', 'dpm')
    ]
    ReportWriter(out).write_verdicts({scenario.name: scenario}, reports)
    click.secho(f"{CLI_SYMBOLS['SUCCESS']} Witness after {search.instances_checked} instances "
                f"({time.perf_counter() - started:.3f}s): agent {witness.agent} at "
                f"{scenario.format_profile(witness.profile)} reporting "
                f"{scenario.types.labels[witness.agent][witness.reported_type]} gains "
                f"{witness.dpm_gain:.3e} under DPM, MATRIX worst gain {witness.matrix_gain:.3e}", fg='green')
    return _finish(run_logger, handler, status)


def cmd_generate(config: RunConfig) -> int:
    """Write a reproducible random suite, or the outsourcing example."""

    out = validate_output_dir(config.out)
    extra = config.extra
    if extra.get('outsourcing'):
        scenarios = [outsourcing_scenario(teams=extra.get('teams', 2))]
    else:
        generator = ScenarioGenerator(config.seed)
        scenarios = generator.random_suite(extra.get('count', 100), extra.get('agents', 3),
                                           extra.get('types', 3), extra.get('private_values', False))
    for scenario in scenarios:
        write_scenario(scenario, out / f"{scenario.name}{SCENARIO_SUFFIX}")
    click.secho(f"{CLI_SYMBOLS['SUCCESS']} {len(scenarios)} scenario files written to {out}", fg='green')
    return EXIT_OK


def _run(config: RunConfig, command: Callable[[RunConfig], int]) -> NoReturn:
    try:
        code = command(config.validate())
    except NonConvergence as error:
        click.secho(f"{CLI_SYMBOLS['ERROR']} {error}", fg='red')
        sys.exit(EXIT_NON_CONVERGENCE)
    except MechanismError as error:
        click.secho(f"{CLI_SYMBOLS['ERROR']} Error [{error.error_code}]: {error}", fg='red')
        sys.exit(EXIT_INVALID)
    except Exception as error:
        handler = ErrorHandler(logger)
        handler.handle_error(error, ErrorSeverity.CRITICAL, {'command': config.command})
        logger.debug(handler.errors[-1]['traceback'])
        click.secho(f"{CLI_SYMBOLS['ERROR']} Unexpected error: {error}", fg='red')
        click.echo(handler.generate_error_report())
        sys.exit(EXIT_INVALID)
    sys.exit(code)


def scenario_option(function: Command) -> Command:
    return click.option('--scenario', required=True, help='Scenario file or suite directory')(function)


def common_options(function: Command) -> Command:
    """Options shared by every command that solves scenarios."""
    options = [
        click.option('--out', default='results', show_default=True, help='Output directory'),
        click.option('--tol', default=DEFAULT_SOLVER_TOLERANCE, type=float, show_default=True,
                     help='Value-iteration tolerance'),
        click.option('--seed', default=DEFAULT_SEED, type=int, show_default=True, help='Root random seed'),
        click.option('--penalty', default=None, help='Penalty override: quadratic, absolute or scaled:C'),
        click.option('--ablate-penalty', is_flag=True,
                     help='Drop the consistency penalty (experiments only)'),
    ]
    for option in reversed(options):
        function = option(function)
    return function


def check_options(function: Command) -> Command:
    options = [
        click.option('--check-tol', default=DEFAULT_CHECK_TOLERANCE, type=float, show_default=True,
                     help='Tolerance of the property checks'),
        click.option('--grid-steps', default=DEFAULT_GRID_STEPS, type=int, show_default=True,
                     help='Stage-2 report grid half-width'),
    ]
    for option in reversed(options):
        function = option(function)
    return function


@click.group(help=TOOL_DESCRIPTION)
@click.version_option(VERSION)
@click.option('--log-level', default='WARNING', show_default=True,
              type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False))
@click.option('--log-file', default=None, help='Also write DEBUG logs to this file')
def main(log_level: str, log_file: Optional[str]) -> None:
    """Dynamic mechanism toolkit."""
    setup_logger('src', log_level, log_file)


@main.command()
@scenario_option
@common_options
def solve(scenario: str, out: str, tol: float, seed: int, penalty: Optional[str],
          ablate_penalty: bool) -> None:
    """Solve W, every W_-i and the efficient policy."""
    _run(RunConfig('solve', scenario, out, tol, seed=seed, penalty=penalty, ablate_penalty=ablate_penalty),
         cmd_solve)


@main.command()
@scenario_option
@common_options
@click.option('--mechanism', default=DEFAULT_MECHANISM, show_default=True, type=click.Choice(MECHANISMS))
@click.option('--horizon', default=None, type=int, help='Rounds per episode (default: truncation rule)')
@click.option('--episodes', default=DEFAULT_EPISODES, type=int, show_default=True)
@click.option('--record', default=1, type=int, show_default=True, help='Episodes written to trajectory.csv')
@click.option('--initial', default=None, help='Initial type labels, one per agent')
@click.option('--deviate-agent', default=None, type=int, help='Agent making a single deviation')
@click.option('--deviate-type', default=None, help='Type label the deviator reports')
@click.option('--deviate-round', default=0, type=int, show_default=True)
@click.option('--value-shift', default=0.0, type=float, show_default=True,
              help='Added to the deviator\'s stage-2 report')
def simulate(scenario: str, out: str, tol: float, seed: int, penalty: Optional[str], ablate_penalty: bool,
             mechanism: str, horizon: Optional[int], episodes: int, record: int, initial: Optional[str],
             deviate_agent: Optional[int], deviate_type: Optional[str], deviate_round: int,
             value_shift: float) -> None:
    """Seeded Monte-Carlo episodes with trajectory and utility CSVs."""
    extra = {'record': record, 'initial': initial, 'deviate_agent': deviate_agent,
             'deviate_type': deviate_type, 'deviate_round': deviate_round, 'value_shift': value_shift}
    _run(RunConfig('simulate', scenario, out, tol, horizon=horizon, episodes=episodes, seed=seed,
                   mechanisms=(mechanism,), penalty=penalty, ablate_penalty=ablate_penalty, extra=extra),
         cmd_simulate)


@main.command()
@scenario_option
@common_options
@check_options
@click.option('--mechanism', default=DEFAULT_MECHANISM, show_default=True, type=click.Choice(MECHANISMS))
def verify(scenario: str, out: str, tol: float, seed: int, penalty: Optional[str], ablate_penalty: bool,
           check_tol: float, grid_steps: int, mechanism: str) -> None:
    """Run every property check; exit 3 if any fails."""
    _run(RunConfig('verify', scenario, out, tol, check_tol, seed=seed, mechanisms=(mechanism,),
                   penalty=penalty, ablate_penalty=ablate_penalty, grid_steps=grid_steps), cmd_verify)


@main.command()
@scenario_option
@common_options
@check_options
@click.option('--mechanism', 'mechanisms', multiple=True, type=click.Choice(MECHANISMS),
              help='Repeat to choose mechanisms (default: all three)')
@click.option('--horizon', default=None, type=int, help='Rounds of the budget trajectory')
def compare(scenario: str, out: str, tol: float, seed: int, penalty: Optional[str], ablate_penalty: bool,
            check_tol: float, grid_steps: int, mechanisms: Tuple[str, ...], horizon: Optional[int]) -> None:
    """MATRIX, DPM and CONST side by side."""
    _run(RunConfig('compare', scenario, out, tol, check_tol, horizon=horizon, seed=seed,
                   mechanisms=tuple(mechanisms) or MECHANISMS, penalty=penalty,
                   ablate_penalty=ablate_penalty, grid_steps=grid_steps), cmd_compare)


@main.command('search-dpm')
@click.option('--out', default='results', show_default=True)
@click.option('--tol', default=DEFAULT_SOLVER_TOLERANCE, type=float, show_default=True)
@click.option('--seed', default=DEFAULT_SEED, type=int, show_default=True)
@click.option('--budget', default=DPM_SEARCH_BUDGET, type=int, show_default=True, help='Instances to try')
@click.option('--private-values', is_flag=True, help='Search private-value instances only')
@check_options
def search_dpm(out: str, tol: float, seed: int, budget: int, private_values: bool, check_tol: float,
               grid_steps: int) -> None:
    """Find a scenario where DPM is manipulable and MATRIX is not."""
    _run(RunConfig('search-dpm', out=out, tol=tol, check_tol=check_tol, seed=seed, grid_steps=grid_steps,
                   extra={'budget': budget, 'private_values': private_values}), cmd_search_dpm)


@main.command()
@click.option('--out', default='suite', show_default=True)
@click.option('--seed', default=DEFAULT_SEED, type=int, show_default=True)
@click.option('--count', default=100, type=int, show_default=True)
@click.option('--agents', default=3, type=int, show_default=True, help='Maximum agents per scenario')
@click.option('--types', default=3, type=int, show_default=True, help='Maximum types per agent')
@click.option('--private-values', is_flag=True)
@click.option('--outsourcing', is_flag=True, help='Write the task-outsourcing example instead')
@click.option('--teams', default=2, type=int, show_default=True, help='Teams in the outsourcing example')
def generate(out: str, seed: int, count: int, agents: int, types: int, private_values: bool,
             outsourcing: bool, teams: int) -> None:
    """Write random scenario files or the outsourcing example."""
    extra = {'count': count, 'agents': agents, 'types': types, 'private_values': private_values,
             'outsourcing': outsourcing, 'teams': teams}
    _run(RunConfig('generate', out=out, seed=seed, extra=extra), cmd_generate)


if __name__ == '__main__':
    main()
