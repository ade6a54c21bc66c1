"""
Search random interdependent-value scenarios for one where the dynamic
pivot baseline rewards a type misreport while MATRIX does not.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

from .incentive_verifier import IncentiveVerifier
from ..mechanism.mechanisms import DynamicPivotMechanism, MatrixMechanism
from ..scenario.generator import ScenarioGenerator
from ..scenario.model import Scenario
from ..simulator.utility import ExactUtilityCalculator
from ..solver.tables import MechanismTables
from ..solver.welfare_solver import solve_tables
from ..utils.constants import (
    DEFAULT_SEED, DEFAULT_SOLVER_TOLERANCE, DPM_GAIN_THRESHOLD, DPM_SEARCH_AGENTS,
    DPM_SEARCH_BUDGET, DPM_SEARCH_TYPE_SIZE, MATRIX_GAIN_THRESHOLD,
)
from ..utils.error_handling import SearchBudgetExhausted

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchConfig:
    budget: int = DPM_SEARCH_BUDGET
    seed: int = DEFAULT_SEED
    agents: Tuple[int, ...] = DPM_SEARCH_AGENTS
    type_size: int = DPM_SEARCH_TYPE_SIZE
    private_values: bool = False
    dpm_threshold: float = DPM_GAIN_THRESHOLD
    matrix_threshold: float = MATRIX_GAIN_THRESHOLD
    solver_tol: float = DEFAULT_SOLVER_TOLERANCE


@dataclass(frozen=True, eq=False)
class DPMWitness:
    """A scenario and a profitable DPM type misreport (theta, i, theta_hat_i)."""

    scenario: Scenario
    tables: MechanismTables
    instance: int
    profile: Tuple[int, ...]
    agent: int
    reported_type: int
    dpm_gain: float
    matrix_gain: float


class DPMCounterexampleSearch:
    """Seeded search over generated scenarios; instances are examined in generation order."""

    def __init__(self, config: Optional[SearchConfig] = None) -> None:
        self.config = config or SearchConfig()
        self.instances_checked = 0

    def find_dpm_counterexample(self) -> Optional[DPMWitness]:
        """First witness within the instance budget, or None when the budget runs out."""

        config = self.config
        generator = ScenarioGenerator(config.seed)
        self.instances_checked = 0

        for instance in range(config.budget):
            n = config.agents[instance % len(config.agents)]
            scenario = generator.random_scenario(n, [config.type_size] * n, config.private_values,
                                                 name=f"dpm_search_{instance:04d}")
            self.instances_checked += 1
            witness = self.examine(scenario, instance)
            if witness is not None:
                logger.info(f"DPM witness in instance {instance}: agent {witness.agent} at "
                            f"{scenario.format_profile(witness.profile)} gains {witness.dpm_gain:.3e}")
                return witness

        logger.info(f"No DPM witness within {config.budget} instances")
        return None

    def require_counterexample(self) -> DPMWitness:
        """As find_dpm_counterexample, but an exhausted budget raises SearchBudgetExhausted."""
        witness = self.find_dpm_counterexample()
        if witness is None:
            raise SearchBudgetExhausted(
                f"no DPM counterexample within {self.config.budget} instances",
                context={'budget': self.config.budget, 'seed': self.config.seed,
                         'private_values': self.config.private_values})
        return witness

    def examine(self, scenario: Scenario, instance: int = 0) -> Optional[DPMWitness]:
        """Best DPM type misreport on one scenario, kept only if MATRIX stays incentive compatible."""

        config = self.config
        tables = solve_tables(scenario, config.solver_tol)
        dpm = ExactUtilityCalculator(DynamicPivotMechanism(scenario, tables))

        best: Tuple[float, Tuple[int, ...], int, int] = (0.0, (), -1, -1)
        for profile in scenario.enumerate_states():
            for agent in range(scenario.n):
                for reported_type in range(scenario.sizes[agent]):
                    if reported_type == profile[agent]:
                        continue
                    gain = dpm.deviation_gain(profile, agent, reported_type)
                    if gain > best[0]:
                        best = (gain, profile, agent, reported_type)

        if best[0] <= config.dpm_threshold:
            return None

        matrix = MatrixMechanism(scenario, tables)
        matrix_report = IncentiveVerifier(matrix, tol=config.matrix_threshold).check_epic()
        if not matrix_report.passed:
            logger.warning(f"{scenario.name}: MATRIX gain {matrix_report.worst_value:.3e} above threshold")
            return None

        gain, profile, agent, reported_type = best
        return DPMWitness(scenario, tables, instance, profile, agent, reported_type, gain,
                          matrix_report.worst_value)
