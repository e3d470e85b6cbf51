"""Deterministic 2D point-reaching dynamics.

States and goals are 2D positions, the achieved goal of a state is the state itself, and an action is a
displacement clipped per dimension to the action box. Reward is 1 when the next state lies within the
success radius of the goal (boundary inclusive).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence

import numpy as np

from ...core.exceptions import DataError, require_finite
from ...schemas.configs import DatasetSpec, EnvConfig

DEFAULT_ENV = EnvConfig()


def clip_action(a: np.ndarray, bound: float) -> np.ndarray:
    return np.clip(a, -bound, bound)


def step(s: np.ndarray, a_raw: np.ndarray, env: EnvConfig = DEFAULT_ENV) -> np.ndarray:
    """s' = s + clip(a). Works on single (2,) vectors or (B, 2) batches."""
    state = np.asarray(s, dtype=float)
    action = np.asarray(a_raw, dtype=float)
    require_finite("state", state)
    require_finite("action", action)
    return state + clip_action(action, env.action_bound)


def reward(s_next: np.ndarray, g: np.ndarray, env: EnvConfig = DEFAULT_ENV) -> np.ndarray | int:
    """1 if ||s' - g|| <= success radius else 0; scalar for single vectors, int array for batches."""
    distance = np.linalg.norm(np.asarray(s_next, dtype=float) - np.asarray(g, dtype=float), axis=-1)
    hit = (distance <= env.success_radius).astype(np.int8)
    return int(hit) if hit.ndim == 0 else hit


def optimal_action(s: np.ndarray, g: np.ndarray, env: EnvConfig = DEFAULT_ENV) -> np.ndarray:
    """Move straight toward the goal at full speed per dimension: clip(g - s, -bound, bound)."""
    return clip_action(np.asarray(g, dtype=float) - np.asarray(s, dtype=float), env.action_bound)


@dataclass(frozen=True)
class Transition:
    s: np.ndarray
    a: np.ndarray
    g: np.ndarray
    r: int
    s_next: np.ndarray


@dataclass
class Trajectory:
    """T transitions sharing one desired goal, stored as T+1 states and T actions/rewards."""

    goal: np.ndarray
    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray

    @property
    def horizon(self) -> int:
        return int(self.actions.shape[0])

    def __len__(self) -> int:
        return self.horizon

    def achieved_goal(self, index: int) -> np.ndarray:
        return self.states[index]

    def transition(self, t: int) -> Transition:
        return Transition(
            s=self.states[t],
            a=self.actions[t],
            g=self.goal,
            r=int(self.rewards[t]),
            s_next=self.states[t + 1],
        )

    def transitions(self) -> List[Transition]:
        return [self.transition(t) for t in range(self.horizon)]


class OfflineDataset(Sequence[Trajectory]):
    """A fixed-horizon trajectory collection held as stacked arrays."""

    def __init__(
        self,
        goals: np.ndarray,
        states: np.ndarray,
        actions: np.ndarray,
        rewards: np.ndarray,
        *,
        env: EnvConfig = DEFAULT_ENV,
        spec: Optional[DatasetSpec] = None,
    ) -> None:
        self.goals = np.asarray(goals, dtype=float)
        self.states = np.asarray(states, dtype=float)
        self.actions = np.asarray(actions, dtype=float)
        self.rewards = np.asarray(rewards, dtype=np.int8)
        self.env = env
        self.spec = spec

        n, horizon = self.actions.shape[:2]
        if (
            self.goals.shape != (n, 2)
            or self.states.shape != (n, horizon + 1, 2)
            or self.actions.shape != (n, horizon, 2)
            or self.rewards.shape != (n, horizon)
        ):
            raise DataError(
                "Inconsistent dataset array shapes",
                payload={
                    "goals": list(self.goals.shape),
                    "states": list(self.states.shape),
                    "actions": list(self.actions.shape),
                    "rewards": list(self.rewards.shape),
                },
            )

    @classmethod
    def from_trajectories(
        cls,
        trajectories: Sequence[Trajectory],
        *,
        env: EnvConfig = DEFAULT_ENV,
        spec: Optional[DatasetSpec] = None,
    ) -> "OfflineDataset":
        if not trajectories:
            raise DataError("Cannot build a dataset from zero trajectories")
        return cls(
            goals=np.stack([traj.goal for traj in trajectories]),
            states=np.stack([traj.states for traj in trajectories]),
            actions=np.stack([traj.actions for traj in trajectories]),
            rewards=np.stack([traj.rewards for traj in trajectories]),
            env=env,
            spec=spec,
        )

    @property
    def n_traj(self) -> int:
        return int(self.goals.shape[0])

    @property
    def horizon(self) -> int:
        return int(self.actions.shape[1])

    def __len__(self) -> int:
        return self.n_traj

    def __getitem__(self, index):  # type: ignore[override]
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(self.n_traj))]
        return Trajectory(
            goal=self.goals[index],
            states=self.states[index],
            actions=self.actions[index],
            rewards=self.rewards[index],
        )

    def __iter__(self) -> Iterator[Trajectory]:
        for i in range(self.n_traj):
            yield self[i]

    def validate(self) -> None:
        """Chain consistency s' == s + a, actions inside the box, rewards recomputable."""
        if not np.array_equal(self.states[:, 1:], self.states[:, :-1] + self.actions):
            raise DataError("Trajectory states are not chain-consistent with the stored actions")
        if np.any(np.abs(self.actions) > self.env.action_bound):
            raise DataError("Stored actions exceed the action bound")
        recomputed = reward(self.states[:, 1:], self.goals[:, None, :], self.env)
        if not np.array_equal(recomputed, self.rewards):
            raise DataError("Stored rewards disagree with the reward function")
