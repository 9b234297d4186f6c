"""Minimal dense networks: forward/backward passes, Adam, checkpoints.

Everything is float64 numpy. A network records its last forward pass so
backward() can run without re-evaluating; gradients mirror parameter shapes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np


class DimensionMismatch(Exception):
    pass


class NoForwardRecorded(Exception):
    pass


_ACTIVATIONS = {
    "relu": (lambda z: np.maximum(z, 0.0), lambda z: (z > 0.0).astype(np.float64)),
    "tanh": (np.tanh, lambda z: 1.0 - np.tanh(z) ** 2),
    "identity": (lambda z: z, lambda z: np.ones_like(z)),
}


@dataclass
class Gradients:
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def as_list(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend([w, b])
        return out


class Mlp:
    """Fully connected net; weight k has shape (dims[k+1], dims[k])."""

    def __init__(self, layer_dims: list[int], hidden_activation: str = "relu",
                 seed: int = 0):
        if len(layer_dims) < 2:
            raise ValueError("need at least input and output dims")
        if hidden_activation not in _ACTIVATIONS:
            raise ValueError(f"unknown activation {hidden_activation!r}")
        self.layer_dims = list(layer_dims)
        self.hidden_activation = hidden_activation
        rng = np.random.default_rng(seed)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(layer_dims[:-1], layer_dims[1:]):
            bound = np.sqrt(6.0 / (fan_in + fan_out))
            self.weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
            self.biases.append(np.zeros(fan_out))
        self._trace: tuple | None = None

    def parameters(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend([w, b])
        return out

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Evaluate the net on one vector or a (batch, dim) matrix.

        Records activations for backward(). The output has the same
        leading shape as the input.
        """
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        h = x[None, :] if single else x
        if h.shape[1] != self.layer_dims[0]:
            raise DimensionMismatch(
                f"input dim {h.shape[1]} != {self.layer_dims[0]}")
        act, _ = _ACTIVATIONS[self.hidden_activation]
        inputs = [h]  # post-activation input to each layer
        pre = []  # pre-activation of each layer
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ w.T + b
            pre.append(z)
            h = act(z) if k < len(self.weights) - 1 else z  # linear output head
            inputs.append(h)
        self._trace = (inputs, pre, single)
        return h[0] if single else h

    def backward(self, grad_output: np.ndarray) -> Gradients:
        """Backpropagate d(loss)/d(output) from the recorded forward pass."""
        if self._trace is None:
            raise NoForwardRecorded("call forward() before backward()")
        inputs, pre, single = self._trace
        g = np.asarray(grad_output, dtype=np.float64)
        if single:
            g = g[None, :]
        if g.shape != (inputs[-1].shape[0], self.layer_dims[-1]):
            raise DimensionMismatch(
                f"grad shape {g.shape} != output shape {inputs[-1].shape}")
        _, dact = _ACTIVATIONS[self.hidden_activation]
        grads_w = [np.empty(0)] * len(self.weights)
        grads_b = [np.empty(0)] * len(self.biases)
        for k in range(len(self.weights) - 1, -1, -1):
            if k < len(self.weights) - 1:
                g = g * dact(pre[k])
            grads_w[k] = g.T @ inputs[k]
            grads_b[k] = g.sum(axis=0)
            if k > 0:
                g = g @ self.weights[k]
        return Gradients(grads_w, grads_b)

    def copy_weights_from(self, other: "Mlp") -> None:
        if other.layer_dims != self.layer_dims:
            raise DimensionMismatch("layer dims differ")
        self.weights = [w.copy() for w in other.weights]
        self.biases = [b.copy() for b in other.biases]


@dataclass
class AdamState:
    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step_count: int = 0
    first_moment: list[np.ndarray] = field(default_factory=list)
    second_moment: list[np.ndarray] = field(default_factory=list)


def adam_step(params: list[np.ndarray], grads: list[np.ndarray],
              state: AdamState) -> None:
    """One bias-corrected Adam update, applied to params in place."""
    if not state.first_moment:
        state.first_moment = [np.zeros_like(p) for p in params]
        state.second_moment = [np.zeros_like(p) for p in params]
    if len(params) != len(grads) or len(params) != len(state.first_moment):
        raise DimensionMismatch("params/grads/state length mismatch")
    state.step_count += 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1 ** state.step_count
    bc2 = 1.0 - b2 ** state.step_count
    for p, g, m, v in zip(params, grads, state.first_moment, state.second_moment):
        if p.shape != g.shape:
            raise DimensionMismatch(f"param {p.shape} vs grad {g.shape}")
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p -= state.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + state.epsilon)


def softmax_logits_to_distribution(logits: np.ndarray) -> np.ndarray:
    """Shift-invariant softmax along the last axis."""
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


# checkpoint layout: magic b"MLP1", uint32 layer count, uint32 dims,
# then float64 row-major W0, b0, W1, b1, ...
_MAGIC = b"MLP1"


def save_checkpoint(net: Mlp, path) -> None:
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(net.layer_dims)))
        fh.write(struct.pack(f"<{len(net.layer_dims)}I", *net.layer_dims))
        for p in net.parameters():
            fh.write(np.ascontiguousarray(p, dtype="<f8").tobytes())


def load_checkpoint(path, hidden_activation: str = "relu") -> Mlp:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError(f"{path}: not a checkpoint file")
        (n_dims,) = struct.unpack("<I", fh.read(4))
        dims = list(struct.unpack(f"<{n_dims}I", fh.read(4 * n_dims)))
        net = Mlp(dims, hidden_activation=hidden_activation, seed=0)
        for k, (fan_in, fan_out) in enumerate(zip(dims[:-1], dims[1:])):
            w = np.frombuffer(fh.read(8 * fan_out * fan_in), dtype="<f8")
            net.weights[k] = w.reshape(fan_out, fan_in).copy()
            b = np.frombuffer(fh.read(8 * fan_out), dtype="<f8")
            net.biases[k] = b.copy()
        if fh.read(1):
            raise ValueError(f"{path}: trailing bytes")
    return net
