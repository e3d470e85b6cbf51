from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from ..env.pointreach import OfflineDataset

STD_FLOOR = 1e-6


@dataclass
class Normalizer:
    """Per-dimension affine standardization for states and goals, fitted once on the offline data."""

    state_mean: np.ndarray
    state_std: np.ndarray
    goal_mean: np.ndarray
    goal_std: np.ndarray
    count: int

    def normalize_states(self, s: np.ndarray) -> np.ndarray:
        return (np.asarray(s, dtype=float) - self.state_mean) / self.state_std

    def normalize_goals(self, g: np.ndarray) -> np.ndarray:
        return (np.asarray(g, dtype=float) - self.goal_mean) / self.goal_std

    def denormalize_states(self, z: np.ndarray) -> np.ndarray:
        return np.asarray(z, dtype=float) * self.state_std + self.state_mean

    def denormalize_goals(self, z: np.ndarray) -> np.ndarray:
        return np.asarray(z, dtype=float) * self.goal_std + self.goal_mean

    def to_dict(self) -> Dict[str, Any]:
        return {
            "state_mean": self.state_mean.tolist(),
            "state_std": self.state_std.tolist(),
            "goal_mean": self.goal_mean.tolist(),
            "goal_std": self.goal_std.tolist(),
            "count": self.count,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Normalizer":
        return cls(
            state_mean=np.asarray(data["state_mean"], dtype=float),
            state_std=np.asarray(data["state_std"], dtype=float),
            goal_mean=np.asarray(data["goal_mean"], dtype=float),
            goal_std=np.asarray(data["goal_std"], dtype=float),
            count=int(data["count"]),
        )

    @classmethod
    def identity(cls, dim: int = 2) -> "Normalizer":
        return cls(np.zeros(dim), np.ones(dim), np.zeros(dim), np.ones(dim), 0)


def fit_normalizer(dataset: OfflineDataset) -> Normalizer:
    """
    Statistics over every visited state, and over desired plus achieved goals.

    Achieved goals are included because relabeled goals are drawn from them.
    """
    states = dataset.states.reshape(-1, 2)
    goals = np.concatenate([dataset.goals, states], axis=0)
    return Normalizer(
        state_mean=states.mean(axis=0),
        state_std=np.maximum(states.std(axis=0), STD_FLOOR),
        goal_mean=goals.mean(axis=0),
        goal_std=np.maximum(goals.std(axis=0), STD_FLOOR),
        count=int(states.shape[0]),
    )
