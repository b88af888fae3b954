"""The potential network and its optimizer, in plain numpy."""
from __future__ import annotations

import io
import zipfile
from pathlib import Path

import numpy as np

from ..errors import DimensionMismatch

CHECKPOINT_VERSION = 1


def softplus(x: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, x)


def sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    e = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


class PotentialNet:
    """ReLU MLP mapping edge features to a scalar potential ``F``.

    Parameters are ``[W1, b1, W2, b2, W3, b3]`` with weights drawn
    uniformly from ``±1/sqrt(fan_in)`` and zero biases.
    """

    def __init__(self, input_dim: int = 64, hidden: tuple[int, ...] = (300, 128), seed: int = 0):
        rng = np.random.default_rng(seed)
        sizes = (input_dim, *hidden, 1)
        self.params: list[np.ndarray] = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            self.params.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            self.params.append(np.zeros(fan_out))

    @property
    def input_dim(self) -> int:
        return self.params[0].shape[0]

    @property
    def sizes(self) -> tuple[int, ...]:
        return (self.params[0].shape[0], *(w.shape[1] for w in self.params[0::2]))

    def copy(self) -> PotentialNet:
        out = PotentialNet.__new__(PotentialNet)
        out.params = [p.copy() for p in self.params]
        return out

    def _check(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.input_dim:
            raise DimensionMismatch(f"expected {self.input_dim} features, got {X.shape[1]}")
        return X

    def forward(self, X, keep: bool = False):
        """Potentials for a batch of feature rows; ``keep`` also returns activations."""
        a = self._check(X)
        acts = [a]
        n_layers = len(self.params) // 2
        for layer in range(n_layers):
            W, b = self.params[2 * layer], self.params[2 * layer + 1]
            z = a @ W + b
            a = np.maximum(z, 0.0) if layer < n_layers - 1 else z
            acts.append(a)
        out = a[:, 0]
        return (out, acts) if keep else out

    def backward(self, acts, dout: np.ndarray) -> list[np.ndarray]:
        """Gradients of ``sum(dout * F)`` with respect to every parameter."""
        n_layers = len(self.params) // 2
        g = np.asarray(dout, dtype=np.float64)[:, None]
        grads: list[np.ndarray] = [None] * len(self.params)
        for layer in reversed(range(n_layers)):
            a_in = acts[layer]
            grads[2 * layer] = a_in.T @ g
            grads[2 * layer + 1] = g.sum(axis=0)
            if layer:
                g = (g @ self.params[2 * layer].T) * (acts[layer] > 0)
        return grads

    def save(self, path) -> None:
        arrays = {"version": np.array(CHECKPOINT_VERSION), "sizes": np.array(self.sizes)}
        arrays.update({f"p{i}": p for i, p in enumerate(self.params)})
        # np.savez stamps entries with the current time; fixed stamps keep files byte-identical
        with zipfile.ZipFile(path, "w", zipfile.ZIP_STORED) as zf:
            for name, arr in arrays.items():
                buf = io.BytesIO()
                np.save(buf, arr, allow_pickle=False)
                zf.writestr(zipfile.ZipInfo(name + ".npy", (1980, 1, 1, 0, 0, 0)), buf.getvalue())

    @classmethod
    def load(cls, path) -> PotentialNet:
        with np.load(Path(path)) as data:
            if int(data["version"]) != CHECKPOINT_VERSION:
                raise ValueError("unsupported checkpoint version")
            sizes = tuple(int(s) for s in data["sizes"])
            params = [data[f"p{i}"] for i in range(2 * (len(sizes) - 1))]
        for i, (fi, fo) in enumerate(zip(sizes[:-1], sizes[1:])):
            if params[2 * i].shape != (fi, fo) or params[2 * i + 1].shape != (fo,):
                raise ValueError("checkpoint shapes disagree with its header")
        out = cls.__new__(cls)
        out.params = [np.array(p, dtype=np.float64) for p in params]
        return out


def edge_probability(net: PotentialNet, features) -> float | np.ndarray:
    """``phi = sigmoid(-F(f))``: the chance of selecting an edge."""
    f = np.asarray(features, dtype=np.float64)
    F = net.forward(f)
    phi = sigmoid(-F)
    return float(phi[0]) if f.ndim == 1 else phi


class Adam:
    def __init__(self, params, lr: float = 0.01, betas=(0.9, 0.999), eps: float = 1e-8):
        self.lr, self.b1, self.b2, self.eps = lr, betas[0], betas[1], eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads, ascent: bool = True) -> None:
        """In-place update; ``ascent`` follows the gradient uphill."""
        self.t += 1
        sign = 1.0 if ascent else -1.0
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.b1
            m += (1 - self.b1) * g
            v *= self.b2
            v += (1 - self.b2) * g * g
            mhat = m / (1 - self.b1 ** self.t)
            vhat = v / (1 - self.b2 ** self.t)
            p += sign * self.lr * mhat / (np.sqrt(vhat) + self.eps)
