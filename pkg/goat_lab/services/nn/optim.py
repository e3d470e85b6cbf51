from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .network import Network, ParamGrads
from ...core.exceptions import ConfigurationError, NumericError, ShapeError


@dataclass
class AdamState:
    """First/second moment accumulators mirroring a network's parameters, plus the step counter."""

    first_moments: List[np.ndarray]
    second_moments: List[np.ndarray]
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def copy(self) -> "AdamState":
        return AdamState(
            first_moments=[m.copy() for m in self.first_moments],
            second_moments=[v.copy() for v in self.second_moments],
            step=self.step,
            beta1=self.beta1,
            beta2=self.beta2,
            eps=self.eps,
        )


def adam_init(net: Network, *, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> AdamState:
    if not (0.0 <= beta1 < 1.0 and 0.0 <= beta2 < 1.0 and eps > 0.0):
        raise ConfigurationError("Invalid Adam hyper-parameters", payload={"beta1": beta1, "beta2": beta2, "eps": eps})
    params = net.parameters()
    return AdamState(
        first_moments=[np.zeros_like(p) for p in params],
        second_moments=[np.zeros_like(p) for p in params],
        beta1=beta1,
        beta2=beta2,
        eps=eps,
    )


def _param_name(index: int) -> str:
    layer, kind = divmod(index, 2)
    return f"layer{layer}.{'bias' if kind else 'weight'}"


def adam_step(net: Network, grads: ParamGrads, state: AdamState, lr: float) -> Tuple[Network, AdamState]:
    """
    Bias-corrected Adam update applied in place; returns the same (network, state) objects.

    Gradients are checked before anything is modified, so a rejected update leaves both untouched.
    """
    if not lr > 0:
        raise ConfigurationError("Learning rate must be positive", payload={"lr": lr})

    params = net.parameters()
    grad_list = grads.parameters()
    if len(grad_list) != len(params) or len(state.first_moments) != len(params):
        raise ShapeError("Gradient/optimizer state does not match the network parameter list")
    for index, (param, grad, moment) in enumerate(zip(params, grad_list, state.first_moments)):
        if grad.shape != param.shape or moment.shape != param.shape:
            raise ShapeError(
                "Gradient shape mismatch",
                payload={"parameter": _param_name(index), "param": list(param.shape), "grad": list(grad.shape)},
            )
        if not np.all(np.isfinite(grad)):
            bad = np.argwhere(~np.isfinite(grad))[0].tolist()
            raise NumericError(
                "Non-finite gradient rejected by Adam",
                payload={"parameter": _param_name(index), "entry": bad, "step": state.step},
            )

    state.step += 1
    bias_correction1 = 1.0 - state.beta1**state.step
    bias_correction2 = 1.0 - state.beta2**state.step
    step_size = lr / bias_correction1

    for param, grad, m, v in zip(params, grad_list, state.first_moments, state.second_moments):
        m *= state.beta1
        m += (1.0 - state.beta1) * grad
        v *= state.beta2
        v += (1.0 - state.beta2) * (grad * grad)
        param -= step_size * m / (np.sqrt(v / bias_correction2) + state.eps)

    return net, state
