"""Dense feedforward machinery: activations, init, backprop, Adam.

One small engine serves both nets in the system (the sketch autoencoder
and the MLP mapper variant). Everything is float64 numpy and fully
deterministic given a seed: weight init and any data shuffling go
through a caller-supplied Generator, and the update rule has no hidden
state beyond the Adam moments.

Loss convention: mean squared error averaged over *all* elements of the
batch (batch size x output dim), so duplicating a batch row leaves the
gradient unchanged.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch

ACTIVATION_NAMES = ("tanh", "sigmoid", "identity")


def apply_activation(name: str, x: np.ndarray) -> np.ndarray:
    if name == "tanh":
        return np.tanh(x)
    if name == "sigmoid":
        return 1.0 / (1.0 + np.exp(-x))
    if name == "identity":
        return x
    raise ValueError(f"unknown activation {name!r}")


def activation_grad_from_output(name: str, y: np.ndarray) -> np.ndarray:
    """d(activation)/d(preactivation), expressed via the activation output."""
    if name == "tanh":
        return 1.0 - y * y
    if name == "sigmoid":
        return y * (1.0 - y)
    if name == "identity":
        return np.ones_like(y)
    raise ValueError(f"unknown activation {name!r}")


def init_layers(
    layer_dims, init_scale: float, rng: np.random.Generator
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Uniform +-init_scale weights, zero biases; weights[i] has shape
    (layer_dims[i], layer_dims[i+1])."""
    weights = []
    biases = []
    for fan_in, fan_out in zip(layer_dims, layer_dims[1:]):
        weights.append(rng.uniform(-init_scale, init_scale, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out, dtype=np.float64))
    return weights, biases


def forward(
    weights, biases, activations, x: np.ndarray
) -> list[np.ndarray]:
    """All layer outputs for a batch; outs[0] is the input, outs[-1] the output."""
    if x.ndim != 2 or x.shape[1] != weights[0].shape[0]:
        raise DimensionMismatch(
            f"input shape {x.shape} does not match first layer fan-in {weights[0].shape[0]}"
        )
    outs = [x]
    h = x
    for w, b, act in zip(weights, biases, activations):
        h = apply_activation(act, h @ w + b)
        outs.append(h)
    return outs


def mse_loss(prediction: np.ndarray, target: np.ndarray) -> float:
    return float(np.mean((prediction - target) ** 2))


def backprop_mse(
    weights, biases, activations, x: np.ndarray, target: np.ndarray
) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
    """Loss and exact gradients of element-mean MSE w.r.t. every parameter."""
    outs = forward(weights, biases, activations, x)
    pred = outs[-1]
    if pred.shape != target.shape:
        raise DimensionMismatch(f"prediction {pred.shape} vs target {target.shape}")
    loss = mse_loss(pred, target)
    n_elements = pred.size
    delta = (2.0 / n_elements) * (pred - target)
    grad_w = [np.empty(0)] * len(weights)
    grad_b = [np.empty(0)] * len(biases)
    for i in range(len(weights) - 1, -1, -1):
        delta = delta * activation_grad_from_output(activations[i], outs[i + 1])
        grad_w[i] = outs[i].T @ delta
        grad_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = delta @ weights[i].T
    return loss, grad_w, grad_b


class Adam:
    """Adam with the usual defaults (lr 1e-3, beta1 0.9, beta2 0.999, eps 1e-8).

    Updates parameters in place; the moment buffers are created lazily to
    match the parameter shapes on the first step.
    """

    def __init__(self, learning_rate: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m: list[np.ndarray] | None = None
        self._v: list[np.ndarray] | None = None

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        if self._m is None:
            self._m = [np.zeros_like(p) for p in params]
            self._v = [np.zeros_like(p) for p in params]
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        bias1 = 1.0 - b1 ** self.t
        bias2 = 1.0 - b2 ** self.t
        for p, g, m, v in zip(params, grads, self._m, self._v):
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * (g * g)
            p -= self.learning_rate * (m / bias1) / (np.sqrt(v / bias2) + self.eps)
