from .episode import EpisodeSimulator, TransitionSampler, Trajectory, episode_rng
from .utility import ExactUtilityCalculator
from .montecarlo import MonteCarloEstimator, UtilityEstimate, default_horizon, truncation_bound

__all__ = [
    'EpisodeSimulator', 'TransitionSampler', 'Trajectory', 'episode_rng', 'ExactUtilityCalculator',
    'MonteCarloEstimator', 'UtilityEstimate', 'default_horizon', 'truncation_bound',
]
