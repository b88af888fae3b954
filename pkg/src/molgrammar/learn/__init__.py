"""Learning which hyperedges to contract."""
from .episode import Draw, Trajectory, as_hypergraphs, sample_episode
from .features import ELEMENT_SLOTS, FEATURE_DIM, featurize, featurize_all
from .net import Adam, PotentialNet, edge_probability, sigmoid
from .reinforce import (DEFAULT_LAMBDA, EpisodeResult, StepReport, TrainConfig, TrainResult,
                        normalized_rewards, reinforce_step, reward_metrics, run_episodes, train)

__all__ = [
    "Adam", "DEFAULT_LAMBDA", "Draw", "ELEMENT_SLOTS", "EpisodeResult", "FEATURE_DIM",
    "PotentialNet", "StepReport", "TrainConfig", "TrainResult", "Trajectory", "as_hypergraphs",
    "edge_probability", "featurize", "featurize_all", "normalized_rewards", "reinforce_step",
    "reward_metrics", "run_episodes", "sample_episode", "sigmoid", "train",
]
