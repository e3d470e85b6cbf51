from .ensemble import (
    AdvantageEstimate,
    EnsembleCritic,
    action_gradient,
    advantage,
    advantage_batch,
    critic_inputs,
    expectile_loss,
    expectile_loss_grad,
    make_critic,
    q_values,
    target_sync,
    td_update,
    uncertainty,
    uncertainty_batch,
    value,
    value_batch,
)

__all__ = [
    "AdvantageEstimate",
    "EnsembleCritic",
    "action_gradient",
    "advantage",
    "advantage_batch",
    "critic_inputs",
    "expectile_loss",
    "expectile_loss_grad",
    "make_critic",
    "q_values",
    "target_sync",
    "td_update",
    "uncertainty",
    "uncertainty_batch",
    "value",
    "value_batch",
]
