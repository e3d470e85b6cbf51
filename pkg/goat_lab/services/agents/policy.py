"""Deterministic goal-conditioned policies.

A trained policy is an MLP over (normalized s, normalized g) with a tanh head scaled to the action box.
Scripted policies (optimal, zero, uniform random) are plain callables with the same (s, g) -> a signature.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from ..env.pointreach import DEFAULT_ENV, OfflineDataset, optimal_action
from ..nn import ForwardCache, Network, ParamGrads, backward_batch, forward_batch, mlp_init
from ..replay.normalizer import Normalizer
from ..replay.relabel import Batch
from ...core.exceptions import ConfigurationError, NumericError, ShapeError
from ...schemas.configs import EnvConfig, NetworkConfig

PolicyFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass
class Policy:
    net: Network
    normalizer: Normalizer
    action_bound: float = 1.0

    def inputs(self, s: np.ndarray, g: np.ndarray) -> np.ndarray:
        return np.concatenate([self.normalizer.normalize_states(s), self.normalizer.normalize_goals(g)], axis=-1)

    def forward_cached(self, s: np.ndarray, g: np.ndarray) -> Tuple[np.ndarray, ForwardCache]:
        out, cache = forward_batch(self.net, self.inputs(s, g))
        return out * self.action_bound, cache

    def __call__(self, s: np.ndarray, g: np.ndarray) -> np.ndarray:
        state = np.asarray(s, dtype=float)
        goal = np.asarray(g, dtype=float)
        if state.ndim == 1:
            return self.forward_cached(state[None, :], goal[None, :])[0][0]
        return self.forward_cached(state, goal)[0]


def make_policy(
    normalizer: Normalizer, *, seed: int, network: NetworkConfig = NetworkConfig(), action_bound: float = 1.0
) -> Policy:
    net = mlp_init([4, *network.hidden_sizes, 2], seed, activation=network.activation, output_activation="tanh")
    return Policy(net=net, normalizer=normalizer, action_bound=action_bound)


def policy_gradient(batch: Batch, policy: Policy, weights: np.ndarray) -> Tuple[float, ParamGrads]:
    """(1/B) sum_i w_i ||a_i - pi(s_i, g_i)||^2 and its gradient with respect to the policy parameters."""
    w = np.asarray(weights, dtype=float)
    size = len(batch)
    if w.shape != (size,):
        raise ShapeError("One weight per sample is required", payload={"batch": size, "weights": list(w.shape)})
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise NumericError("Imitation weights must be finite and non-negative")

    predicted, cache = policy.forward_cached(batch.s, batch.g)
    diff = batch.a - predicted
    loss = float(np.sum(w * np.sum(diff * diff, axis=1)) / size)
    if not np.isfinite(loss):
        raise NumericError("Non-finite policy loss", payload={"max_abs_action": float(np.max(np.abs(predicted)))})
    upstream = (-2.0 / size) * w[:, None] * diff * policy.action_bound
    grads, _ = backward_batch(policy.net, cache, upstream)
    return loss, grads


def policy_loss(batch: Batch, policy: Policy, weights: np.ndarray) -> float:
    return policy_gradient(batch, policy, weights)[0]


def empirical_imitation_loss(policy: PolicyFn, dataset: OfflineDataset | Batch) -> float:
    """Mean squared action error over every (s, g, a) in a dataset (original goals) or a batch."""
    if isinstance(dataset, Batch):
        s, g, a = dataset.s, dataset.g, dataset.a
    else:
        n_traj, horizon = dataset.n_traj, dataset.horizon
        s = dataset.states[:, :-1].reshape(-1, 2)
        g = np.repeat(dataset.goals, horizon, axis=0)
        a = dataset.actions.reshape(-1, 2)
        if s.shape[0] != n_traj * horizon:
            raise ShapeError("Dataset arrays are inconsistent")
    diff = a - policy(s, g)
    return float(np.mean(np.sum(diff * diff, axis=1)))


def optimal_policy(env: EnvConfig = DEFAULT_ENV) -> PolicyFn:
    def act(s: np.ndarray, g: np.ndarray) -> np.ndarray:
        return optimal_action(s, g, env)

    return act


def zero_policy(s: np.ndarray, g: np.ndarray) -> np.ndarray:
    return np.zeros(np.broadcast_shapes(np.shape(s), np.shape(g)))


def random_policy(seed: int, env: EnvConfig = DEFAULT_ENV) -> PolicyFn:
    rng = np.random.default_rng(seed)

    def act(s: np.ndarray, g: np.ndarray) -> np.ndarray:
        return rng.uniform(-env.action_bound, env.action_bound, size=np.shape(s))

    return act


def scripted_policy(name: str, *, env: EnvConfig = DEFAULT_ENV, seed: int = 0) -> PolicyFn:
    if name == "optimal":
        return optimal_policy(env)
    if name == "zero":
        return zero_policy
    if name == "random":
        return random_policy(seed, env)
    raise ConfigurationError(f"Unknown scripted policy {name!r}", payload={"known": ["optimal", "zero", "random"]})
