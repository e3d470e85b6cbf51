"""Hindsight goal relabeling.

For a transition at step t the candidate achieved goals are the post-step states s_{t+1} .. s_T.
The relabel index i ranges over {t, ..., T-1} and selects g' = phi(s_{i+1}); i == t therefore relabels
with the immediate next state, which always earns reward 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from ..env.pointreach import DEFAULT_ENV, OfflineDataset, Trajectory, reward
from ...core.exceptions import ConfigurationError, DataError, RelabelIndexError
from ...schemas.configs import EnvConfig


@dataclass(frozen=True)
class RelabeledSample:
    s: np.ndarray
    a: np.ndarray
    g: np.ndarray
    r: int
    s_next: np.ndarray
    relabel_index: Optional[int]
    t: int


@dataclass
class Batch:
    """Struct-of-arrays mini-batch; `relabel_index` is -1 where the original goal was kept."""

    s: np.ndarray
    a: np.ndarray
    g: np.ndarray
    r: np.ndarray
    s_next: np.ndarray
    t: np.ndarray
    relabel_index: np.ndarray
    traj_index: np.ndarray

    def __len__(self) -> int:
        return int(self.s.shape[0])

    @property
    def relabeled(self) -> np.ndarray:
        return self.relabel_index >= 0

    def sample(self, k: int) -> RelabeledSample:
        index = int(self.relabel_index[k])
        return RelabeledSample(
            s=self.s[k],
            a=self.a[k],
            g=self.g[k],
            r=int(self.r[k]),
            s_next=self.s_next[k],
            relabel_index=index if index >= 0 else None,
            t=int(self.t[k]),
        )

    def __iter__(self) -> Iterator[RelabeledSample]:
        for k in range(len(self)):
            yield self.sample(k)


def relabel(traj: Trajectory, t: int, rng: np.random.Generator, env: EnvConfig = DEFAULT_ENV) -> RelabeledSample:
    horizon = traj.horizon
    if not 0 <= t < horizon:
        raise RelabelIndexError("Transition index out of range", payload={"t": t, "horizon": horizon})
    i = int(rng.integers(t, horizon))
    goal = traj.achieved_goal(i + 1).copy()
    s_next = traj.states[t + 1]
    return RelabeledSample(
        s=traj.states[t],
        a=traj.actions[t],
        g=goal,
        r=int(reward(s_next, goal, env)),
        s_next=s_next,
        relabel_index=i,
        t=t,
    )


def sample_batch(
    dataset: OfflineDataset, batch_size: int, p_relabel: float, rng: np.random.Generator
) -> Batch:
    """Uniform (trajectory, t) draws; each sample independently relabeled with probability p_relabel."""
    if dataset.n_traj == 0:
        raise DataError("Cannot sample from an empty dataset")
    if not 0.0 <= p_relabel <= 1.0:
        raise ConfigurationError("p_relabel must lie in [0, 1]", payload={"p_relabel": p_relabel})
    if batch_size < 1:
        raise ConfigurationError("batch_size must be positive", payload={"batch_size": batch_size})

    horizon = dataset.horizon
    traj = rng.integers(0, dataset.n_traj, size=batch_size)
    t = rng.integers(0, horizon, size=batch_size)
    mask = rng.random(batch_size) < p_relabel
    future = rng.integers(t, horizon)

    s = dataset.states[traj, t]
    s_next = dataset.states[traj, t + 1]
    goals = np.where(mask[:, None], dataset.states[traj, future + 1], dataset.goals[traj])
    rewards = np.where(mask, reward(s_next, goals, dataset.env), dataset.rewards[traj, t])
    return Batch(
        s=s,
        a=dataset.actions[traj, t],
        g=goals,
        r=rewards.astype(np.float64),
        s_next=s_next,
        t=t,
        relabel_index=np.where(mask, future, -1),
        traj_index=traj,
    )
