"""Ensemble of goal-conditioned Q networks with hard-synced targets.

Each member maps (normalized s, a / action_bound, normalized g) to a scalar. TD targets are
clip(r' + gamma * Q_target_i(s', pi(s', g'), g'), 0, 1 / (1 - gamma)) and are treated as constants.
V, advantage and Std are computed from the online members at the policy action.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.special import logsumexp, softmax

from ..nn import AdamState, Network, adam_init, adam_step, backward_batch, forward_batch, mlp_init
from ..replay.normalizer import Normalizer
from ..replay.relabel import Batch, RelabeledSample
from ...core.exceptions import ConfigurationError, NumericError
from ...core.logging_config import get_logger
from ...schemas.configs import NetworkConfig

logger = get_logger(__name__)

PolicyFn = Callable[[np.ndarray, np.ndarray], np.ndarray]

STATE_DIM = 2
ACTION_DIM = 2
GOAL_DIM = 2


@dataclass
class EnsembleCritic:
    members: List[Network]
    targets: List[Network]
    optimizers: List[AdamState]
    normalizer: Normalizer
    gamma: float
    tau: Optional[float] = None
    target_interval: int = 50
    action_bound: float = 1.0
    updates: int = 0

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def value_max(self) -> float:
        return 1.0 / (1.0 - self.gamma)


@dataclass(frozen=True)
class AdvantageEstimate:
    A: float
    V_s: float
    V_s_next: float
    r: float


def make_critic(
    n: int,
    normalizer: Normalizer,
    *,
    gamma: float,
    seed: int,
    network: NetworkConfig = NetworkConfig(),
    tau: Optional[float] = None,
    target_interval: int = 50,
    action_bound: float = 1.0,
) -> EnsembleCritic:
    """N independently initialized members; member i uses the i-th child of the seed sequence."""
    if n < 1:
        raise ConfigurationError("Ensemble size must be at least 1", payload={"n": n})
    if tau is not None and not 0.0 < tau < 1.0:
        raise ConfigurationError("Expectile tau must lie in (0, 1)", payload={"tau": tau})

    layer_sizes = [STATE_DIM + ACTION_DIM + GOAL_DIM, *network.hidden_sizes, 1]
    member_seeds = [int(child.generate_state(1)[0]) for child in np.random.SeedSequence(seed).spawn(n)]
    members = [mlp_init(layer_sizes, s, activation=network.activation) for s in member_seeds]
    return EnsembleCritic(
        members=members,
        targets=[m.copy() for m in members],
        optimizers=[adam_init(m) for m in members],
        normalizer=normalizer,
        gamma=gamma,
        tau=tau,
        target_interval=target_interval,
        action_bound=action_bound,
    )


def critic_inputs(crit: EnsembleCritic, s: np.ndarray, a: np.ndarray, g: np.ndarray) -> np.ndarray:
    norm = crit.normalizer
    return np.concatenate(
        [norm.normalize_states(s), np.asarray(a, dtype=float) / crit.action_bound, norm.normalize_goals(g)],
        axis=-1,
    )


def expectile_loss(u: np.ndarray | float, tau: float) -> np.ndarray | float:
    """|tau - 1(u < 0)| * u^2."""
    u_arr = np.asarray(u, dtype=float)
    loss = np.abs(tau - (u_arr < 0.0)) * u_arr * u_arr
    return float(loss) if loss.ndim == 0 else loss


def expectile_loss_grad(u: np.ndarray | float, tau: float) -> np.ndarray | float:
    """d/du of the expectile loss: 2 |tau - 1(u < 0)| u."""
    u_arr = np.asarray(u, dtype=float)
    grad = 2.0 * np.abs(tau - (u_arr < 0.0)) * u_arr
    return float(grad) if grad.ndim == 0 else grad


def _td_loss(u: np.ndarray, tau: Optional[float]) -> Tuple[np.ndarray, np.ndarray]:
    if tau is None:
        return u * u, 2.0 * u
    return expectile_loss(u, tau), expectile_loss_grad(u, tau)


def q_values(
    crit: EnsembleCritic, s: np.ndarray, a: np.ndarray, g: np.ndarray, *, target: bool = False
) -> np.ndarray:
    """(N, B) member outputs."""
    x = critic_inputs(crit, s, a, g)
    nets = crit.targets if target else crit.members
    return np.stack([forward_batch(net, x)[0][:, 0] for net in nets])


def td_targets(crit: EnsembleCritic, batch: Batch, policy: PolicyFn) -> np.ndarray:
    next_actions = policy(batch.s_next, batch.g)
    q_next = q_values(crit, batch.s_next, next_actions, batch.g, target=True)
    return np.clip(batch.r[None, :] + crit.gamma * q_next, 0.0, crit.value_max)


def _conservative_terms(
    crit: EnsembleCritic,
    member: Network,
    batch: Batch,
    q_data: np.ndarray,
    random_actions: np.ndarray,
    alpha: float,
):
    """alpha * mean_b(logsumexp_k Q(s, a_k, g) - Q(s, a_data, g)) and its gradient pieces."""
    size, samples = q_data.shape[0], random_actions.shape[1]
    s_rep = np.repeat(batch.s, samples, axis=0)
    g_rep = np.repeat(batch.g, samples, axis=0)
    x_rand = critic_inputs(crit, s_rep, random_actions.reshape(-1, ACTION_DIM), g_rep)
    q_rand, cache = forward_batch(member, x_rand)
    q_rand = q_rand[:, 0].reshape(size, samples)

    penalty = alpha * float(np.mean(logsumexp(q_rand, axis=1) - q_data))
    grad_rand = alpha * softmax(q_rand, axis=1) / size
    rand_grads, _ = backward_batch(member, cache, grad_rand.reshape(-1, 1))
    grad_data = -alpha / size
    return penalty, rand_grads, grad_data


def td_update(
    crit: EnsembleCritic,
    batch: Batch,
    policy: PolicyFn,
    lr: float,
    *,
    cql_alpha: float = 0.0,
    cql_samples: int = 10,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """
    One Adam step per member on the mean TD loss (squared, or expectile when crit.tau is set).

    With cql_alpha > 0 the conservative penalty over `cql_samples` uniform actions is added.
    Returns the per-member mean loss (including the penalty) measured before the step.
    """
    targets = td_targets(crit, batch, policy)
    x = critic_inputs(crit, batch.s, batch.a, batch.g)
    size = len(batch)

    random_actions = None
    if cql_alpha > 0:
        if rng is None:
            raise ConfigurationError("The conservative penalty needs a random generator")
        random_actions = rng.uniform(-crit.action_bound, crit.action_bound, size=(size, cql_samples, ACTION_DIM))

    losses = np.zeros(crit.size)
    for i, (member, opt) in enumerate(zip(crit.members, crit.optimizers)):
        q, cache = forward_batch(member, x)
        q = q[:, 0]
        loss_values, loss_grad = _td_loss(targets[i] - q, crit.tau)
        loss = float(np.mean(loss_values))
        grad_q = -loss_grad / size

        extra = None
        if random_actions is not None:
            penalty, extra, grad_data = _conservative_terms(crit, member, batch, q, random_actions, cql_alpha)
            loss += penalty
            grad_q = grad_q + grad_data

        if not np.isfinite(loss):
            raise NumericError(
                "Non-finite critic loss",
                payload={"member": i, "update": crit.updates, "max_abs_q": float(np.max(np.abs(q)))},
            )
        grads, _ = backward_batch(member, cache, grad_q[:, None])
        if extra is not None:
            grads = grads.add(extra)
        adam_step(member, grads, opt, lr)
        losses[i] = loss

    crit.updates += 1
    target_sync(crit)
    return losses


def target_sync(crit: EnsembleCritic, *, force: bool = False) -> EnsembleCritic:
    """Hard copy online -> target every `target_interval` updates (or immediately with force)."""
    if force or crit.updates % crit.target_interval == 0:
        for target, member in zip(crit.targets, crit.members):
            target.load_from(member)
    return crit


def value_batch(crit: EnsembleCritic, s: np.ndarray, g: np.ndarray, policy: PolicyFn) -> np.ndarray:
    return q_values(crit, s, policy(s, g), g).mean(axis=0)


def uncertainty_batch(crit: EnsembleCritic, s: np.ndarray, g: np.ndarray, policy: PolicyFn) -> np.ndarray:
    """Population standard deviation (divide by N) of member Q-values at the policy action."""
    return q_values(crit, s, policy(s, g), g).std(axis=0)


def value_and_uncertainty(
    crit: EnsembleCritic, s: np.ndarray, g: np.ndarray, policy: PolicyFn
) -> Tuple[np.ndarray, np.ndarray]:
    q = q_values(crit, s, policy(s, g), g)
    return q.mean(axis=0), q.std(axis=0)


def advantage_batch(
    crit: EnsembleCritic, batch: Batch, policy: PolicyFn
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(A, V(s, g'), V(s', g')) with A = r' + gamma V(s', g') - V(s, g')."""
    v_s = value_batch(crit, batch.s, batch.g, policy)
    v_next = value_batch(crit, batch.s_next, batch.g, policy)
    return batch.r + crit.gamma * v_next - v_s, v_s, v_next


def action_gradient(
    crit: EnsembleCritic, s: np.ndarray, a: np.ndarray, g: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Ensemble-mean Q(s, a, g) and its gradient with respect to the raw action, shapes (B,), (B, 2)."""
    x = critic_inputs(crit, s, a, g)
    q_sum = np.zeros(x.shape[0])
    grad_sum = np.zeros((x.shape[0], ACTION_DIM))
    for member in crit.members:
        q, cache = forward_batch(member, x)
        _, input_grad = backward_batch(member, cache, np.ones_like(q))
        q_sum += q[:, 0]
        grad_sum += input_grad[:, STATE_DIM : STATE_DIM + ACTION_DIM]
    n = crit.size
    return q_sum / n, grad_sum / (n * crit.action_bound)


def _single(vector: np.ndarray) -> np.ndarray:
    return np.asarray(vector, dtype=float)[None, :]


def value(crit: EnsembleCritic, s: np.ndarray, g: np.ndarray, policy: PolicyFn) -> float:
    return float(value_batch(crit, _single(s), _single(g), policy)[0])


def uncertainty(crit: EnsembleCritic, s: np.ndarray, g: np.ndarray, policy: PolicyFn) -> float:
    return float(uncertainty_batch(crit, _single(s), _single(g), policy)[0])


def advantage(crit: EnsembleCritic, sample: RelabeledSample, policy: PolicyFn) -> AdvantageEstimate:
    v_s = value(crit, sample.s, sample.g, policy)
    v_next = value(crit, sample.s_next, sample.g, policy)
    r = float(sample.r)
    return AdvantageEstimate(A=r + crit.gamma * v_next - v_s, V_s=v_s, V_s_next=v_next, r=r)
