from .pointreach import (
    OfflineDataset,
    Trajectory,
    Transition,
    optimal_action,
    reward,
    step,
)
from .datasets import generate_dataset, load_dataset, sample_eval_goals, save_dataset

__all__ = [
    "OfflineDataset",
    "Trajectory",
    "Transition",
    "generate_dataset",
    "load_dataset",
    "optimal_action",
    "reward",
    "sample_eval_goals",
    "save_dataset",
    "step",
]
