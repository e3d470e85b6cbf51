from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

import numpy as np

from .rollout import PolicyFn, RolloutResult, rollout_batch
from ..env.datasets import sample_eval_goals
from ..env.pointreach import DEFAULT_ENV
from ...core.exceptions import ConfigurationError
from ...core.logging_config import get_logger
from ...schemas.configs import EnvConfig
from ...schemas.reports import EvalReport, GoalOutcome, GoalSetReport

logger = get_logger(__name__)

GoalSets = Dict[str, Tuple[float, np.ndarray]]


def goal_sets_for(radii: Sequence[float], n: int, goal_seed: int) -> GoalSets:
    """{"R10": (10.0, goals), ...}; every radius uses the same goal seed."""
    return {f"R{radius:g}": (float(radius), sample_eval_goals(radius, n, goal_seed)) for radius in radii}


def success_rate(policy: PolicyFn, goals: np.ndarray, env: EnvConfig = DEFAULT_ENV, s0=(0.0, 0.0)) -> float:
    return float(np.mean(rollout_batch(policy, np.asarray(s0, dtype=float), goals, env.horizon, env).success))


def _mean(values: np.ndarray) -> float | None:
    return float(np.mean(values)) if values.size else None


def _set_report(name: str, radius: float, results: List[RolloutResult], env: EnvConfig) -> GoalSetReport:
    goals = np.concatenate([r.goals for r in results])
    success = np.concatenate([r.success for r in results])
    steps = np.concatenate([r.steps_to_success for r in results])
    stay = np.concatenate([r.stay_return for r in results])
    stop = np.concatenate([r.stop_return for r in results])
    discounted = np.concatenate([r.discounted_return for r in results])

    if np.isclose(radius, env.goal_radius_train):
        iid_mask = goals[:, 1] >= 0.0
        iid, ood = _mean(success[iid_mask].astype(float)), _mean(success[~iid_mask].astype(float))
    else:
        iid, ood = None, float(np.mean(success))

    outcomes = [
        GoalOutcome(
            goal=(float(goals[k, 0]), float(goals[k, 1])),
            success=bool(success[k]),
            steps_to_success=int(steps[k]),
            stay_return=float(stay[k]),
            stop_return=float(stop[k]),
            discounted_return=float(discounted[k]),
        )
        for k in range(goals.shape[0])
    ]
    return GoalSetReport(
        name=name,
        radius=radius,
        success_rate=float(np.mean(success)),
        mean_return=float(np.mean(stay)),
        mean_stop_return=float(np.mean(stop)),
        mean_discounted_return=float(np.mean(discounted)),
        iid_success_rate=iid,
        ood_success_rate=ood,
        outcomes=outcomes,
    )


def evaluate_seeds(
    policies: Sequence[PolicyFn],
    goal_sets: GoalSets | Sequence[GoalSets],
    env: EnvConfig = DEFAULT_ENV,
    *,
    s0: Sequence[float] = (0.0, 0.0),
) -> EvalReport:
    """
    Evaluate one policy per training seed on every goal set.

    `goal_sets` is shared by all policies or given once per policy (e.g. one goal seed per entry); the
    set names must agree. Outcome rows of all seeds are pooled, so with equal set sizes each success rate
    is both the mean over rows and the mean of the per-seed rates.
    """
    if not policies:
        raise ConfigurationError("At least one policy is required for evaluation")
    per_policy = [goal_sets] * len(policies) if isinstance(goal_sets, dict) else list(goal_sets)
    if len(per_policy) != len(policies):
        raise ConfigurationError(
            "One goal-set mapping per policy is required",
            payload={"policies": len(policies), "goal_sets": len(per_policy)},
        )
    names = list(per_policy[0]) if per_policy else []
    for sets_k in per_policy:
        if not names or list(sets_k) != names or any(goals.shape[0] == 0 for _, goals in sets_k.values()):
            raise ConfigurationError("Goal sets must be non-empty and share the same names")

    start = np.asarray(s0, dtype=float)
    sets: Dict[str, GoalSetReport] = {}
    per_seed_success: Dict[str, List[float]] = {}
    per_seed_return: Dict[str, List[float]] = {}
    for name in names:
        radius = per_policy[0][name][0]
        results = [
            rollout_batch(policy, start, sets_k[name][1], env.horizon, env)
            for policy, sets_k in zip(policies, per_policy)
        ]
        sets[name] = _set_report(name, radius, results, env)
        per_seed_success[name] = [float(np.mean(r.success)) for r in results]
        per_seed_return[name] = [float(np.mean(r.stay_return)) for r in results]

    logger.info(
        "Evaluation finished",
        extra={
            "seeds": len(policies),
            "success": {name: report.success_rate for name, report in sets.items()},
            "return": {name: report.mean_return for name, report in sets.items()},
        },
    )
    return EvalReport(
        horizon=env.horizon,
        seeds_aggregated=len(policies),
        sets=sets,
        per_seed_success=per_seed_success,
        per_seed_return=per_seed_return,
    )


def evaluate(
    policy: PolicyFn,
    goal_sets: GoalSets,
    env: EnvConfig = DEFAULT_ENV,
    *,
    s0: Sequence[float] = (0.0, 0.0),
) -> EvalReport:
    return evaluate_seeds([policy], goal_sets, env, s0=s0)
