"""
Multi-round episodes: run a mechanism round, then draw the next joint
profile from the factored transition kernel.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..mechanism.mechanisms import Mechanism, RoundOutcome
from ..mechanism.strategies import StrategyProfile
from ..scenario.model import Allocation, Scenario

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Realized rounds of one episode and each agent's discounted utility."""

    mechanism: str
    initial_profile: Tuple[int, ...]
    outcomes: Tuple[RoundOutcome, ...]
    discounted_utilities: np.ndarray
    delta: float
    seed: Optional[int] = None
    episode: int = 0
    owner: int = 0

    @property
    def horizon(self) -> int:
        return len(self.outcomes)

    def recomputed_utilities(self) -> np.ndarray:
        """sum_t delta^t (v_i,t + p_i,t), recomputed from the stored rounds."""
        total = np.zeros_like(self.discounted_utilities)
        for outcome in self.outcomes:
            total = total + self.delta ** outcome.t * outcome.utilities
        return total


class TransitionSampler:
    """Draw next joint profiles with one uniform per step from cached cumulative rows."""

    def __init__(self, scenario: Scenario) -> None:
        self.scenario = scenario
        self._cumulative: Dict[Tuple[int, int], Tuple[np.ndarray, int]] = {}

    def cumulative_row(self, state: int, mask: int) -> Tuple[np.ndarray, int]:
        """Cumulative row and its last index with positive probability."""
        key = (state, mask)
        if key not in self._cumulative:
            row = self.scenario.joint_transition(self.scenario.profile(state), Allocation(mask))
            cumulative = np.cumsum(row)
            last = int(np.searchsorted(cumulative, cumulative[-1], side='left'))
            self._cumulative[key] = (cumulative, last)
        return self._cumulative[key]

    def next_state(self, state: int, mask: int, uniform: float) -> int:
        cumulative, last = self.cumulative_row(state, mask)
        # A row total just below 1 must not hand leftover mass to zero-probability tail states.
        return min(int(np.searchsorted(cumulative, uniform, side='right')), last)

    def next_states(self, states: np.ndarray, masks: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
        """Vectorized next_state for many episodes at once, grouped by (state, mask)."""
        result = np.empty_like(states)
        pairs = states * self.scenario.n_allocations + masks
        for pair in np.unique(pairs):
            selected = pairs == pair
            state, mask = divmod(int(pair), self.scenario.n_allocations)
            cumulative, last = self.cumulative_row(state, mask)
            result[selected] = np.minimum(np.searchsorted(cumulative, uniforms[selected], side='right'), last)
        return result


def episode_rng(seed: Optional[int], episode: int) -> np.random.Generator:
    """Independent stream per episode, derived from one root seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(episode,)))


class EpisodeSimulator:
    """Alternate mechanism rounds and type transitions."""

    def __init__(self, mechanism: Mechanism) -> None:
        self.mechanism = mechanism
        self.scenario = mechanism.scenario
        self.sampler = TransitionSampler(self.scenario)

    def simulate_episode(self, strategies: StrategyProfile, initial_profile: Sequence[int],
                         horizon: int, seed: Optional[int] = None, episode: int = 0) -> Trajectory:
        """Run `horizon` rounds from `initial_profile`; deterministic given (seed, episode)."""

        if horizon < 1:
            raise ValueError(f"horizon must be at least 1, got {horizon}")
        scenario = self.scenario
        if len(strategies) != scenario.n:
            raise ValueError(f"strategy profile has {len(strategies)} entries for {scenario.n} agents")

        rng = episode_rng(seed, episode)
        uniforms = rng.random(horizon)
        state = scenario.state_index(initial_profile)
        outcomes = []
        total = np.zeros(scenario.n)

        for t in range(horizon):
            outcome = self.mechanism.run_round(scenario.profile(state), strategies, t)
            outcomes.append(outcome)
            total = total + scenario.delta ** t * outcome.utilities
            state = self.sampler.next_state(state, outcome.allocation.mask, uniforms[t])

        return Trajectory(self.mechanism.name, tuple(int(x) for x in initial_profile), tuple(outcomes),
                          total, scenario.delta, seed, episode, scenario.owner)
