from .checkpoint import load_network, network_from_bytes, network_to_bytes, save_network
from .gradcheck import finite_diff_grad
from .network import (
    ForwardCache,
    Network,
    ParamGrads,
    backward,
    backward_batch,
    forward,
    forward_batch,
    mlp_init,
)
from .optim import AdamState, adam_init, adam_step

__all__ = [
    "AdamState",
    "ForwardCache",
    "Network",
    "ParamGrads",
    "adam_init",
    "adam_step",
    "backward",
    "backward_batch",
    "finite_diff_grad",
    "forward",
    "forward_batch",
    "load_network",
    "mlp_init",
    "network_from_bytes",
    "network_to_bytes",
    "save_network",
]
