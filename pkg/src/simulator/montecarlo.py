"""
Monte-Carlo estimates of discounted utility over independent seeded episodes.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .episode import EpisodeSimulator, episode_rng
from .utility import ExactUtilityCalculator
from ..mechanism.mechanisms import Mechanism
from ..mechanism.strategies import StrategyProfile
from ..scenario.model import Scenario
from ..utils.constants import DEFAULT_EPISODES, DEFAULT_SEED, DEFAULT_TRUNCATION_TARGET, MAX_DEFAULT_HORIZON

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UtilityEstimate:
    mean: float
    stderr: float
    episodes: int
    horizon: int
    truncation_bound: float


def truncation_bound(scenario: Scenario, max_payment: float, horizon: int) -> float:
    """delta^T * (n*M + P_max) / (1 - delta): the most the rounds after T can be worth."""
    return scenario.delta ** horizon * (scenario.n * scenario.bound + max_payment) / (1.0 - scenario.delta)


def default_horizon(scenario: Scenario, max_payment: float,
                    target: float = DEFAULT_TRUNCATION_TARGET) -> int:
    """Smallest T >= 1 whose truncation bound is below `target`."""
    scale = (scenario.n * scenario.bound + max_payment) / (1.0 - scenario.delta)
    if scale < target:
        return 1
    horizon = max(1, math.ceil(math.log(target / scale) / math.log(scenario.delta)))
    while truncation_bound(scenario, max_payment, horizon) >= target:
        horizon += 1
    while horizon > 1 and truncation_bound(scenario, max_payment, horizon - 1) < target:
        horizon -= 1
    return min(horizon, MAX_DEFAULT_HORIZON)


class MonteCarloEstimator:
    """Discounted-utility estimates for one mechanism."""

    def __init__(self, mechanism: Mechanism) -> None:
        self.mechanism = mechanism
        self.scenario = mechanism.scenario
        self.simulator = EpisodeSimulator(mechanism)
        self.exact = ExactUtilityCalculator(mechanism)

    def default_horizon(self, target: float = DEFAULT_TRUNCATION_TARGET) -> int:
        return default_horizon(self.scenario, self.exact.max_truthful_payment(), target)

    def monte_carlo_utility(self, strategies: StrategyProfile, initial_profile: Sequence[int], agent: int,
                            horizon: Optional[int] = None, episodes: int = DEFAULT_EPISODES,
                            seed: Optional[int] = DEFAULT_SEED) -> UtilityEstimate:
        """Mean and standard error of agent's realized discounted utility."""

        if episodes < 1:
            raise ValueError(f"episodes must be at least 1, got {episodes}")
        horizon = horizon or self.default_horizon()

        if strategies.is_truthful:
            samples = self._truthful_samples(initial_profile, agent, horizon, episodes, seed)
        else:
            samples = np.array([
                self.simulator.simulate_episode(strategies, initial_profile, horizon, seed, k)
                .discounted_utilities[agent]
                for k in range(episodes)
            ])

        stderr = float(samples.std(ddof=1) / math.sqrt(episodes)) if episodes > 1 else 0.0
        bound = truncation_bound(self.scenario, self.exact.max_truthful_payment(), horizon)
        logger.debug(f"{self.mechanism.name}: agent {agent} mean {samples.mean():.6f} "
                     f"+/- {stderr:.2e} over {episodes} episodes, T={horizon}")
        return UtilityEstimate(float(samples.mean()), stderr, episodes, horizon, bound)

    def _truthful_samples(self, initial_profile: Sequence[int], agent: int, horizon: int,
                          episodes: int, seed: Optional[int]) -> np.ndarray:
        """
        All episodes advanced together using cached truthful round
        utilities; draws come from the same per-episode streams as
        simulate_episode, so both paths see identical state sequences.
        """

        scenario = self.scenario
        rewards = self.exact.truthful_round()[agent]
        policy = np.asarray(self.mechanism.tables.policy.masks)
        uniforms = np.stack([episode_rng(seed, k).random(horizon) for k in range(episodes)])

        states = np.full(episodes, scenario.state_index(initial_profile), dtype=np.int64)
        totals = np.zeros(episodes)
        for t in range(horizon):
            totals += scenario.delta ** t * rewards[states]
            states = self.simulator.sampler.next_states(states, policy[states], uniforms[:, t])
        return totals
