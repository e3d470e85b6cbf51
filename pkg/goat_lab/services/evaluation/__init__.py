from .grids import coverage_grid, grid_centers, uncertainty_grid
from .harness import evaluate, evaluate_seeds, goal_sets_for, success_rate
from .reports import write_eval_report, write_grid
from .rollout import RolloutResult, rollout, rollout_batch

__all__ = [
    "RolloutResult",
    "coverage_grid",
    "evaluate",
    "evaluate_seeds",
    "goal_sets_for",
    "grid_centers",
    "rollout",
    "rollout_batch",
    "success_rate",
    "uncertainty_grid",
    "write_eval_report",
    "write_grid",
]
