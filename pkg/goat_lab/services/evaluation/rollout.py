"""Closed-loop rollouts of a frozen policy in the point-reach environment.

Returns are reported three ways. `stay_return` is the undiscounted reward sum T - k + 1 for a first success
at step k (1-based), crediting reward 1 at every step from k through T as an agent that stays at the goal
collects; `stop_return` is the reward collected when the episode stops at the first success;
`discounted_return` credits gamma^(j-1) for the same steps j = k..T.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from ..env.pointreach import DEFAULT_ENV, Trajectory, reward, step
from ...core.exceptions import ConfigurationError, ShapeError
from ...schemas.configs import EnvConfig

PolicyFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class RolloutResult:
    goals: np.ndarray
    steps_to_success: np.ndarray
    stay_return: np.ndarray
    stop_return: np.ndarray
    discounted_return: np.ndarray

    @property
    def success(self) -> np.ndarray:
        return self.steps_to_success > 0

    def __len__(self) -> int:
        return int(self.goals.shape[0])


def rollout(
    policy: PolicyFn,
    s0: np.ndarray,
    g: np.ndarray,
    T: int,
    env: EnvConfig = DEFAULT_ENV,
    *,
    early_stop: bool = True,
) -> Tuple[Trajectory, bool]:
    if T < 1:
        raise ConfigurationError("Rollout horizon must be at least 1", payload={"T": T})
    goal = np.asarray(g, dtype=float)
    state = np.asarray(s0, dtype=float)
    states, actions, rewards = [state], [], []
    success = False
    for _ in range(T):
        action = np.clip(np.asarray(policy(state, goal), dtype=float), -env.action_bound, env.action_bound)
        state = step(state, action, env)
        r = reward(state, goal, env)
        states.append(state)
        actions.append(action)
        rewards.append(r)
        if r == 1:
            success = True
            if early_stop:
                break
    traj = Trajectory(
        goal=goal,
        states=np.asarray(states),
        actions=np.asarray(actions).reshape(-1, 2),
        rewards=np.asarray(rewards, dtype=np.int8),
    )
    return traj, success


def rollout_batch(
    policy: PolicyFn,
    s0: np.ndarray,
    goals: np.ndarray,
    T: int,
    env: EnvConfig = DEFAULT_ENV,
) -> RolloutResult:
    """Roll out one episode per goal in lockstep; every episode starts at s0 (a single state or one per goal)."""
    if T < 1:
        raise ConfigurationError("Rollout horizon must be at least 1", payload={"T": T})
    goal_batch = np.asarray(goals, dtype=float)
    if goal_batch.ndim != 2 or goal_batch.shape[1] != 2:
        raise ShapeError("Goals must be an (n, 2) array", payload={"shape": list(goal_batch.shape)})
    n = goal_batch.shape[0]
    states = np.broadcast_to(np.asarray(s0, dtype=float), (n, 2)).copy()

    first = np.full(n, -1, dtype=np.int64)
    for k in range(1, T + 1):
        actions = np.clip(np.asarray(policy(states, goal_batch), dtype=float), -env.action_bound, env.action_bound)
        states = step(states, actions, env)
        hit = (reward(states, goal_batch, env) == 1) & (first < 0)
        first[hit] = k

    success = first > 0
    stay = np.where(success, T - first + 1, 0).astype(float)
    stop = success.astype(float)
    # sum_{j=k}^{T} gamma^(j-1) = gamma^(k-1) (1 - gamma^(T-k+1)) / (1 - gamma)
    gamma = env.gamma
    k = np.where(success, first, T + 1).astype(float)
    discounted = np.where(success, gamma ** (k - 1) * (1.0 - gamma ** (T - k + 1)) / (1.0 - gamma), 0.0)
    return RolloutResult(
        goals=goal_batch,
        steps_to_success=first,
        stay_return=stay,
        stop_return=stop,
        discounted_return=discounted,
    )
