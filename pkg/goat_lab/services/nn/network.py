"""Dense multilayer perceptrons with batched forward and reverse-mode backward passes.

Weights of layer k have shape (out_k, in_k); inputs are row-major batches (B, in).
Initialization is uniform in +-sqrt(6 / (fan_in + fan_out)) with zero biases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ...core.exceptions import ConfigurationError, ShapeError, require_finite

HIDDEN_ACTIVATIONS = ("relu", "tanh")
OUTPUT_ACTIVATIONS = ("identity", "tanh", "clip")


@dataclass
class Network:
    layer_sizes: Tuple[int, ...]
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    activations: Tuple[str, ...]
    output_activation: str = "identity"

    @property
    def input_size(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_size(self) -> int:
        return self.layer_sizes[-1]

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def parameters(self) -> List[np.ndarray]:
        """Parameter arrays in checkpoint order W0, b0, W1, b1, ..."""
        params: List[np.ndarray] = []
        for weight, bias in zip(self.weights, self.biases):
            params.extend((weight, bias))
        return params

    def copy(self) -> "Network":
        return Network(
            layer_sizes=self.layer_sizes,
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            activations=self.activations,
            output_activation=self.output_activation,
        )

    def load_from(self, other: "Network") -> None:
        """Copy another network's parameters into this one in place (shapes must match)."""
        if other.layer_sizes != self.layer_sizes:
            raise ShapeError(
                "Cannot copy parameters between different architectures",
                payload={"source": list(other.layer_sizes), "target": list(self.layer_sizes)},
            )
        for dst, src in zip(self.parameters(), other.parameters()):
            dst[...] = src


@dataclass
class ParamGrads:
    weights: List[np.ndarray]
    biases: List[np.ndarray]

    @classmethod
    def zeros_like(cls, net: Network) -> "ParamGrads":
        return cls(
            weights=[np.zeros_like(w) for w in net.weights],
            biases=[np.zeros_like(b) for b in net.biases],
        )

    def parameters(self) -> List[np.ndarray]:
        grads: List[np.ndarray] = []
        for weight, bias in zip(self.weights, self.biases):
            grads.extend((weight, bias))
        return grads

    def scale(self, factor: float) -> "ParamGrads":
        return ParamGrads(
            weights=[w * factor for w in self.weights],
            biases=[b * factor for b in self.biases],
        )

    def add(self, other: "ParamGrads") -> "ParamGrads":
        return ParamGrads(
            weights=[a + b for a, b in zip(self.weights, other.weights)],
            biases=[a + b for a, b in zip(self.biases, other.biases)],
        )


@dataclass
class ForwardCache:
    """Per-layer values kept for the backward pass. `outputs[0]` is the input batch."""

    outputs: List[np.ndarray] = field(default_factory=list)
    pre_activations: List[np.ndarray] = field(default_factory=list)


def mlp_init(
    layer_sizes: Sequence[int],
    seed: int,
    *,
    activation: str = "relu",
    output_activation: str = "identity",
    activations: Optional[Sequence[str]] = None,
) -> Network:
    """Create a network with deterministic scaled-uniform weights and zero biases."""
    sizes = tuple(int(size) for size in layer_sizes)
    if len(sizes) < 2:
        raise ConfigurationError(
            "A network needs at least one layer of weights (two layer sizes)",
            payload={"layer_sizes": list(sizes)},
        )
    if any(size < 1 for size in sizes):
        raise ConfigurationError("Layer sizes must be positive", payload={"layer_sizes": list(sizes)})

    n_hidden = len(sizes) - 2
    hidden = tuple(activations) if activations is not None else (activation,) * n_hidden
    if len(hidden) != n_hidden:
        raise ConfigurationError(
            "One activation tag is required per hidden layer",
            payload={"hidden_layers": n_hidden, "activations": list(hidden)},
        )
    for tag in hidden:
        if tag not in HIDDEN_ACTIVATIONS:
            raise ConfigurationError(f"Unknown hidden activation {tag!r}")
    if output_activation not in OUTPUT_ACTIVATIONS:
        raise ConfigurationError(f"Unknown output activation {output_activation!r}")

    rng = np.random.default_rng(seed)
    weights: List[np.ndarray] = []
    biases: List[np.ndarray] = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))

    return Network(
        layer_sizes=sizes,
        weights=weights,
        biases=biases,
        activations=hidden,
        output_activation=output_activation,
    )


def _activate(tag: str, z: np.ndarray) -> np.ndarray:
    if tag == "relu":
        return np.maximum(z, 0.0)
    if tag == "tanh":
        return np.tanh(z)
    if tag == "clip":
        return np.clip(z, -1.0, 1.0)
    return z


def _activation_grad(tag: str, z: np.ndarray, a: np.ndarray) -> np.ndarray | float:
    if tag == "relu":
        return (z > 0.0).astype(z.dtype)
    if tag == "tanh":
        return 1.0 - a * a
    if tag == "clip":
        return ((z > -1.0) & (z < 1.0)).astype(z.dtype)
    return 1.0


def forward_batch(net: Network, x: np.ndarray) -> Tuple[np.ndarray, ForwardCache]:
    """Run a (B, in) batch through the network; returns outputs (B, out) and the cache for backward."""
    inputs = np.asarray(x, dtype=float)
    if inputs.ndim != 2 or inputs.shape[1] != net.input_size:
        raise ShapeError(
            "Input batch does not match the network input size",
            payload={"expected": [None, net.input_size], "got": list(inputs.shape)},
        )
    require_finite("network input", inputs)

    cache = ForwardCache(outputs=[inputs])
    hidden = inputs
    last = net.n_layers - 1
    for k, (weight, bias) in enumerate(zip(net.weights, net.biases)):
        z = hidden @ weight.T + bias
        tag = net.activations[k] if k < last else net.output_activation
        hidden = _activate(tag, z)
        cache.pre_activations.append(z)
        cache.outputs.append(hidden)
    return hidden, cache


def backward_batch(
    net: Network, cache: ForwardCache, upstream: np.ndarray
) -> Tuple[ParamGrads, np.ndarray]:
    """
    Reverse-mode pass for sum_b upstream[b] . output[b].

    Returns parameter gradients summed over the batch and the gradient with respect to the input batch.
    """
    grad_out = np.asarray(upstream, dtype=float)
    expected = cache.outputs[-1].shape
    if grad_out.shape != expected:
        raise ShapeError(
            "Upstream gradient does not match the network output",
            payload={"expected": list(expected), "got": list(grad_out.shape)},
        )

    grads = ParamGrads(weights=[None] * net.n_layers, biases=[None] * net.n_layers)  # type: ignore[list-item]
    last = net.n_layers - 1
    delta = grad_out * _activation_grad(net.output_activation, cache.pre_activations[last], cache.outputs[last + 1])
    input_grad = delta
    for k in range(last, -1, -1):
        grads.weights[k] = delta.T @ cache.outputs[k]
        grads.biases[k] = delta.sum(axis=0)
        input_grad = delta @ net.weights[k]
        if k > 0:
            delta = input_grad * _activation_grad(
                net.activations[k - 1], cache.pre_activations[k - 1], cache.outputs[k]
            )
    return grads, input_grad


def forward(net: Network, x: np.ndarray) -> np.ndarray:
    """Single input vector -> output vector."""
    vector = np.asarray(x, dtype=float)
    if vector.ndim != 1:
        raise ShapeError("forward expects a 1-D input vector", payload={"shape": list(vector.shape)})
    out, _ = forward_batch(net, vector[None, :])
    return out[0]


def backward(net: Network, x: np.ndarray, upstream: np.ndarray) -> ParamGrads:
    """Gradient of upstream . forward(net, x) with respect to every parameter."""
    vector = np.asarray(x, dtype=float)
    if vector.ndim != 1:
        raise ShapeError("backward expects a 1-D input vector", payload={"shape": list(vector.shape)})
    up = np.asarray(upstream, dtype=float)
    if up.shape != (net.output_size,):
        raise ShapeError(
            "Upstream length must equal the output size",
            payload={"expected": net.output_size, "got": list(up.shape)},
        )
    _, cache = forward_batch(net, vector[None, :])
    grads, _ = backward_batch(net, cache, up[None, :])
    return grads
