from __future__ import annotations

from typing import Callable

import numpy as np

from .network import Network, ParamGrads, forward_batch
from ...core.exceptions import ConfigurationError


def finite_diff_grad(
    net: Network,
    x: np.ndarray,
    scalar_loss_fn: Callable[[np.ndarray], float],
    h: float = 1e-5,
) -> ParamGrads:
    """
    Central-difference estimate of d loss / d params, one parameter entry at a time.

    `x` may be a single vector or a (B, in) batch; `scalar_loss_fn` receives the network output
    with the same leading shape. The network is restored exactly after every perturbation.
    """
    if not h > 0:
        raise ConfigurationError("Finite-difference step must be positive", payload={"h": h})

    inputs = np.asarray(x, dtype=float)
    single = inputs.ndim == 1
    batch = inputs[None, :] if single else inputs

    def loss_at() -> float:
        out, _ = forward_batch(net, batch)
        return float(scalar_loss_fn(out[0] if single else out))

    estimate = ParamGrads.zeros_like(net)
    for param, grad in zip(net.parameters(), estimate.parameters()):
        flat_param = param.reshape(-1)
        flat_grad = grad.reshape(-1)
        for i in range(flat_param.size):
            original = flat_param[i]
            flat_param[i] = original + h
            plus = loss_at()
            flat_param[i] = original - h
            minus = loss_at()
            flat_param[i] = original
            flat_grad[i] = (plus - minus) / (2.0 * h)
    return estimate
