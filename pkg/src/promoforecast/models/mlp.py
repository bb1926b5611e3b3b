"""Fully connected regressor: tanh hidden layers, linear output, trained by
seeded mini-batch gradient descent on squared loss.

Inputs and targets are standardized internally (stored on the model), and
the output layer starts at zero, so a constant target is a fixed point of
training and is predicted exactly.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..domain import ModelKind
from .ensembles import _check_training_inputs


@dataclass(frozen=True)
class MLPConfig:
    hidden: tuple[int, ...] = (64, 32)
    epochs: int = 200
    learning_rate: float = 1e-3
    batch_size: int = 32
    min_samples: int = 8
    seed: int = 0


class MLPModel:
    kind = ModelKind.MLP

    def __init__(self, n_features: int, config: MLPConfig, layout_fingerprint: str = ""):
        self.n_features = n_features
        self.config = config
        self.layout_fingerprint = layout_fingerprint
        sizes = [n_features, *config.hidden, 1]
        rng = np.random.default_rng(config.seed)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for i in range(len(sizes) - 1):
            fan_in, fan_out = sizes[i], sizes[i + 1]
            if i == len(sizes) - 2:
                w = np.zeros((fan_in, fan_out))
            else:
                w = rng.standard_normal((fan_in, fan_out)) * np.sqrt(2.0 / (fan_in + fan_out))
            self.weights.append(w)
            self.biases.append(np.zeros(fan_out))
        self.x_mean = np.zeros(n_features)
        self.x_scale = np.ones(n_features)
        self.y_mean = 0.0
        self.y_scale = 1.0

    # --- forward ---------------------------------------------------------

    def _standardize(self, X: np.ndarray) -> np.ndarray:
        return (X - self.x_mean) / self.x_scale

    def _forward(self, Z: np.ndarray) -> list[np.ndarray]:
        """Returns activations per layer, Z first, raw output last."""
        acts = [Z]
        a = Z
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            a = a @ w + b
            if i < last:
                a = np.tanh(a)
            acts.append(a)
        return acts

    def predict_many(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        out = self._forward(self._standardize(X))[-1][:, 0]
        return out * self.y_scale + self.y_mean

    def predict_row(self, x: np.ndarray) -> float:
        return float(self.predict_many(np.asarray(x, dtype=np.float64)[None, :])[0])

    # --- training --------------------------------------------------------

    @classmethod
    def train(
        cls, X: np.ndarray, y: np.ndarray, config: MLPConfig, layout_fingerprint: str = ""
    ) -> "MLPModel":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        _check_training_inputs(X, y, config.min_samples)
        model = cls(X.shape[1], config, layout_fingerprint)
        model.x_mean = X.mean(axis=0)
        scale = X.std(axis=0)
        model.x_scale = np.where(scale > 0, scale, 1.0)
        model.y_mean = float(y.mean())
        y_scale = float(y.std())
        model.y_scale = y_scale if y_scale > 0 else 1.0

        Z = model._standardize(X)
        t = (y - model.y_mean) / model.y_scale
        n = len(Z)
        rng = np.random.default_rng(config.seed + 1)
        for _ in range(config.epochs):
            order = rng.permutation(n)
            for lo in range(0, n, config.batch_size):
                batch = order[lo : lo + config.batch_size]
                model._sgd_step(Z[batch], t[batch], config.learning_rate)
        return model

    def _sgd_step(self, Z: np.ndarray, t: np.ndarray, lr: float) -> None:
        acts = self._forward(Z)
        delta = (acts[-1][:, 0] - t)[:, None] / len(Z)
        grads_w, grads_b = self._backprop(acts, delta)
        for w, b, gw, gb in zip(self.weights, self.biases, grads_w, grads_b):
            w -= lr * gw
            b -= lr * gb

    def _backprop(
        self, acts: list[np.ndarray], delta: np.ndarray
    ) -> tuple[list[np.ndarray], list[np.ndarray]]:
        """Gradients for every layer given d(loss)/d(raw output) rows."""
        grads_w = [np.empty(0)] * len(self.weights)
        grads_b = [np.empty(0)] * len(self.biases)
        for i in range(len(self.weights) - 1, -1, -1):
            grads_w[i] = acts[i].T @ delta
            grads_b[i] = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ self.weights[i].T) * (1.0 - acts[i] ** 2)
        return grads_w, grads_b

    # --- analytic gradient (gradient-check surface) -----------------------

    def loss(self, x: np.ndarray, y: float) -> float:
        """Squared loss 0.5 * (predict(x) - y)^2 in raw target units."""
        return 0.5 * (self.predict_row(x) - float(y)) ** 2

    def gradient(self, x: np.ndarray, y: float) -> np.ndarray:
        """Analytic d(loss)/d(weights,biases), flattened in parameter order."""
        x = np.asarray(x, dtype=np.float64)[None, :]
        acts = self._forward(self._standardize(x))
        pred = float(acts[-1][0, 0]) * self.y_scale + self.y_mean
        # Chain through the output un-standardization.
        delta = np.asarray([[(pred - float(y)) * self.y_scale]])
        grads_w, grads_b = self._backprop(acts, delta)
        return np.concatenate(
            [g.ravel() for pair in zip(grads_w, grads_b) for g in pair]
        )

    def get_flat_weights(self) -> np.ndarray:
        return np.concatenate(
            [a.ravel() for pair in zip(self.weights, self.biases) for a in pair]
        )

    def set_flat_weights(self, flat: np.ndarray) -> None:
        pos = 0
        for i in range(len(self.weights)):
            for arr in (self.weights[i], self.biases[i]):
                arr.flat[:] = flat[pos : pos + arr.size]
                pos += arr.size
        if pos != len(flat):
            raise ValueError(f"weight vector length {len(flat)} != {pos}")

    # --- persistence -------------------------------------------------------

    def to_payload(self) -> dict:
        return {
            "config": {**asdict(self.config), "hidden": list(self.config.hidden)},
            "n_features": self.n_features,
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "x_mean": self.x_mean.tolist(),
            "x_scale": self.x_scale.tolist(),
            "y_mean": self.y_mean,
            "y_scale": self.y_scale,
        }

    @classmethod
    def from_payload(cls, payload: dict, layout_fingerprint: str) -> "MLPModel":
        cfg = dict(payload["config"])
        cfg["hidden"] = tuple(cfg["hidden"])
        model = cls(int(payload["n_features"]), MLPConfig(**cfg), layout_fingerprint)
        model.weights = [np.asarray(w, dtype=np.float64) for w in payload["weights"]]
        model.biases = [np.asarray(b, dtype=np.float64) for b in payload["biases"]]
        model.x_mean = np.asarray(payload["x_mean"], dtype=np.float64)
        model.x_scale = np.asarray(payload["x_scale"], dtype=np.float64)
        model.y_mean = float(payload["y_mean"])
        model.y_scale = float(payload["y_scale"])
        return model
