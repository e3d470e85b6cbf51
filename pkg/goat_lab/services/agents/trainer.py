"""
Offline training loop shared by every algorithm tag.

One iteration: sample a batch and relabel it, update the critic ensemble, compute advantages and push
them into the advantage queue, update the selection percentile and threshold, compute ensemble Std and
push it into the Std queue, combine the weights, then take one policy Adam step. Actor-critic tags
(ddpg_her, cql_her) replace the weighted imitation step by maximizing the critic at the policy action.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from .algorithms import resolve
from .policy import Policy, empirical_imitation_loss, make_policy, policy_gradient
from ..critic.ensemble import (
    EnsembleCritic,
    action_gradient,
    make_critic,
    td_update,
    value_and_uncertainty,
    value_batch,
)
from ..env.datasets import sample_eval_goals
from ..env.pointreach import OfflineDataset
from ..evaluation.harness import success_rate
from ..nn import AdamState, adam_init, adam_step, backward_batch
from ..replay.normalizer import Normalizer, fit_normalizer
from ..replay.queues import FifoQueue, extremes, quantile
from ..replay.relabel import Batch, sample_batch
from ..weighting.weights import WeightBundle, WeightContext, alpha_schedule, combine_batch
from ...core.exceptions import NumericError, TrainingDivergedError
from ...core.logging_config import get_logger
from ...core.run_context import training_scope
from ...schemas.configs import AlgoConfig, EnvConfig, WeightConfig
from ...schemas.reports import TrainLogRecord

logger = get_logger(__name__)

EVAL_RADII = (10.0, 20.0)


@dataclass
class WeightDiagnostics:
    step: int
    alpha: float
    threshold: Optional[float]
    mean_eaw: float
    frac_selected: float
    mean_uw: float
    mean_drw: float
    mean_weight: float


@dataclass
class PolicyArtifacts:
    policy: Policy
    normalizer: Normalizer
    config: AlgoConfig
    weighting: WeightConfig
    env: EnvConfig = field(default_factory=EnvConfig)
    critic: Optional[EnsembleCritic] = None
    log: List[TrainLogRecord] = field(default_factory=list)
    diagnostics: List[WeightDiagnostics] = field(default_factory=list)


@dataclass
class _Seeds:
    policy: int
    critic: int
    sampling: np.random.Generator
    conservative: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "_Seeds":
        policy, critic, sampling, conservative = np.random.SeedSequence(seed).spawn(4)
        return cls(
            policy=int(policy.generate_state(1)[0]),
            critic=int(critic.generate_state(1)[0]),
            sampling=np.random.default_rng(sampling),
            conservative=np.random.default_rng(conservative),
        )


@dataclass
class _StepStats:
    policy_loss: float
    critic_loss: Optional[float] = None
    mean_A: Optional[float] = None
    weights: Optional[WeightBundle] = None
    alpha: float = 0.0
    threshold: Optional[float] = None


class Trainer:
    def __init__(
        self,
        config: AlgoConfig,
        dataset: OfflineDataset,
        weighting: WeightConfig = WeightConfig(),
        *,
        on_record: Optional[Callable[[TrainLogRecord], None]] = None,
    ) -> None:
        self.profile, self.config, self.weighting = resolve(config, weighting)
        self.dataset = dataset
        self.env = dataset.env
        self.on_record = on_record
        self.seeds = _Seeds.from_seed(self.config.seed)
        self.normalizer = fit_normalizer(dataset)
        self.policy = make_policy(
            self.normalizer,
            seed=self.seeds.policy,
            network=self.config.policy_network,
            action_bound=self.env.action_bound,
        )
        self.policy_opt: AdamState = adam_init(self.policy.net)
        self.critic: Optional[EnsembleCritic] = None
        if self.profile.uses_critic:
            self.critic = make_critic(
                self.config.ensemble_size,
                self.normalizer,
                gamma=self.env.gamma,
                seed=self.seeds.critic,
                network=self.config.critic_network,
                tau=self.config.tau,
                target_interval=self.config.target_interval,
                action_bound=self.env.action_bound,
            )
        self.adv_queue = FifoQueue(self.weighting.adv_queue_capacity)
        self.std_queue = FifoQueue(self.weighting.std_queue_capacity)
        self.eval_goals: Dict[str, np.ndarray] = {
            f"R{radius:g}": sample_eval_goals(radius, self.config.eval_goals, self.config.seed) for radius in EVAL_RADII
        }
        self.log: List[TrainLogRecord] = []
        self.diagnostics: List[WeightDiagnostics] = []

    def _critic_step(self, batch: Batch) -> float:
        profile, config = self.profile, self.config
        losses = td_update(
            self.critic,
            batch,
            self.policy,
            config.lr,
            cql_alpha=config.cql_alpha if profile.conservative else 0.0,
            cql_samples=config.cql_samples,
            rng=self.seeds.conservative,
        )
        return float(np.mean(losses))

    def _actor_step(self, batch: Batch) -> float:
        """Deterministic policy gradient: minimize -mean Q(s, pi(s, g'), g')."""
        size = len(batch)
        actions, cache = self.policy.forward_cached(batch.s, batch.g)
        q, dq_da = action_gradient(self.critic, batch.s, actions, batch.g)
        loss = -float(np.mean(q))
        upstream = -dq_da * self.policy.action_bound / size
        grads, _ = backward_batch(self.policy.net, cache, upstream)
        adam_step(self.policy.net, grads, self.policy_opt, self.config.lr)
        return loss

    def _imitation_weights(self, batch: Batch, step: int, stats: _StepStats) -> np.ndarray:
        if not self.profile.weighted:
            return np.ones(len(batch))
        cfg = self.weighting
        v_s, std = value_and_uncertainty(self.critic, batch.s, batch.g, self.policy)
        v_next = value_batch(self.critic, batch.s_next, batch.g, self.policy)
        adv = batch.r + self.env.gamma * v_next - v_s
        self.adv_queue.push_many(adv)

        stats.alpha = alpha_schedule(step, self.config.total_updates, cfg)
        if len(self.adv_queue) >= cfg.dsw_warmup:
            stats.threshold = quantile(self.adv_queue, stats.alpha)

        self.std_queue.push_many(std)
        std_min, std_max = extremes(self.std_queue)
        ctx = WeightContext(threshold=stats.threshold, std_min=std_min, std_max=std_max, gamma=self.env.gamma)
        bundle = combine_batch(adv, std, batch.relabel_index, batch.t, ctx, cfg)
        stats.mean_A = float(np.mean(adv))
        stats.weights = bundle
        return np.asarray(bundle.product, dtype=float)

    def step(self, step: int) -> _StepStats:
        batch = sample_batch(self.dataset, self.config.batch_size, self.config.p_relabel, self.seeds.sampling)
        critic_loss = self._critic_step(batch) if self.critic is not None else None
        if self.profile.actor_critic:
            return _StepStats(policy_loss=self._actor_step(batch), critic_loss=critic_loss)

        stats = _StepStats(policy_loss=0.0, critic_loss=critic_loss)
        weights = self._imitation_weights(batch, step, stats)
        loss, grads = policy_gradient(batch, self.policy, weights)
        adam_step(self.policy.net, grads, self.policy_opt, self.config.lr)
        stats.policy_loss = loss
        return stats

    def _evaluate(self) -> Dict[str, float]:
        return {name: success_rate(self.policy, goals, self.env) for name, goals in self.eval_goals.items()}

    def _record(self, step: int, stats: _StepStats, evaluate: bool) -> None:
        bundle = stats.weights
        record = TrainLogRecord(
            step=step,
            policy_loss=stats.policy_loss,
            critic_loss=stats.critic_loss,
            mean_A=stats.mean_A,
            frac_selected=float(np.mean(np.asarray(bundle.dsw) >= 1.0)) if bundle is not None else None,
            mean_uw=float(np.mean(bundle.uw)) if bundle is not None else None,
        )
        if evaluate:
            rates = self._evaluate()
            record = record.model_copy(
                update={
                    "eval_R10": rates.get("R10"),
                    "eval_R20": rates.get("R20"),
                    "imitation_loss": empirical_imitation_loss(self.policy, self.dataset),
                }
            )
        if bundle is not None:
            self.diagnostics.append(
                WeightDiagnostics(
                    step=step,
                    alpha=stats.alpha,
                    threshold=stats.threshold,
                    mean_eaw=float(np.mean(bundle.eaw)),
                    frac_selected=record.frac_selected,
                    mean_uw=record.mean_uw,
                    mean_drw=float(np.mean(bundle.drw)),
                    mean_weight=float(np.mean(bundle.product)),
                )
            )
        self.log.append(record)
        if self.on_record is not None:
            self.on_record(record)
        logger.info("Training progress", extra=record.model_dump(exclude_none=True))

    def run(self) -> PolicyArtifacts:
        label = self.dataset.spec.label if self.dataset.spec is not None else "custom"
        with training_scope(self.config.algorithm.value, self.config.seed, label):
            return self._run()

    def _run(self) -> PolicyArtifacts:
        config = self.config
        logger.info(
            "Training started",
            extra={
                "algorithm": config.algorithm.value,
                "updates": config.total_updates,
                "ensemble_size": config.ensemble_size if self.critic is not None else 0,
                "tau": config.tau,
                "p_relabel": config.p_relabel,
                "seed": config.seed,
            },
        )
        last: Optional[TrainLogRecord] = None
        for step in range(1, config.total_updates + 1):
            try:
                stats = self.step(step)
            except NumericError as exc:
                raise TrainingDivergedError(
                    "Training diverged",
                    payload={
                        "step": step,
                        "algorithm": config.algorithm.value,
                        "critic_updates": self.critic.updates if self.critic is not None else 0,
                        "last_record": last.model_dump() if last is not None else None,
                        "cause": exc.message,
                        **exc.payload,
                    },
                ) from exc
            final = step == config.total_updates
            evaluate = final or (config.eval_interval > 0 and step % config.eval_interval == 0)
            if evaluate or step % config.log_interval == 0:
                self._record(step, stats, evaluate)
                last = self.log[-1]

        return PolicyArtifacts(
            policy=self.policy,
            normalizer=self.normalizer,
            config=config,
            weighting=self.weighting,
            env=self.env,
            critic=self.critic,
            log=self.log,
            diagnostics=self.diagnostics,
        )


def train(
    config: AlgoConfig,
    dataset: OfflineDataset,
    weighting: WeightConfig = WeightConfig(),
    *,
    on_record: Optional[Callable[[TrainLogRecord], None]] = None,
) -> PolicyArtifacts:
    return Trainer(config, dataset, weighting, on_record=on_record).run()
