"""Feedforward regressor trained by full-batch backpropagation.

The loss is the batch mean of squared errors (no 1/2 factor) plus an
optional weight penalty:

* ``"l1"``   adds ``strength * sum(|w|)``
* ``"l1/2"`` adds ``strength * sum(sqrt(|w| + eps))``, a smoothed L1/2 term

Biases are never penalized.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DimensionError, DivergenceError, InvalidInputError
from .interval import ACTIVATIONS, get_activation

L_HALF_EPS = 1e-8
REGULARIZERS = ("none", "l1", "l1/2")


@dataclass
class NetworkModel:
    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    hidden_activation: str = "sigmoid"
    output_activation: str = "identity"
    final_mse: float | None = None

    def __post_init__(self):
        self.layer_sizes = tuple(int(s) for s in self.layer_sizes)
        if len(self.layer_sizes) < 2 or any(s < 1 for s in self.layer_sizes):
            raise ConfigurationError(f"bad layer sizes {self.layer_sizes}")
        if self.layer_sizes[-1] != 1:
            raise ConfigurationError("only single-output networks are supported")
        get_activation(self.hidden_activation)
        get_activation(self.output_activation)
        n_layers = len(self.layer_sizes) - 1
        if len(self.weights) != n_layers or len(self.biases) != n_layers:
            raise DimensionError("number of weight/bias arrays does not match layer_sizes")
        self.weights = [np.asarray(w, dtype=float) for w in self.weights]
        self.biases = [np.asarray(b, dtype=float) for b in self.biases]
        for k, (W, b) in enumerate(zip(self.weights, self.biases)):
            expected = (self.layer_sizes[k + 1], self.layer_sizes[k])
            if W.shape != expected or b.shape != (expected[0],):
                raise DimensionError(
                    f"layer {k}: weights {W.shape}, biases {b.shape}; expected {expected}"
                )
            if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
                raise InvalidInputError(f"layer {k} has non-finite parameters")

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def activations(self) -> list[str]:
        n_layers = len(self.weights)
        return [self.hidden_activation] * (n_layers - 1) + [self.output_activation]

    def copy(self) -> "NetworkModel":
        return NetworkModel(
            self.layer_sizes,
            [W.copy() for W in self.weights],
            [b.copy() for b in self.biases],
            self.hidden_activation,
            self.output_activation,
            self.final_mse,
        )

    def to_dict(self) -> dict:
        return {
            "layer_sizes": list(self.layer_sizes),
            "hidden_activation": self.hidden_activation,
            "output_activation": self.output_activation,
            "weights": [W.ravel().tolist() for W in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "final_mse": self.final_mse,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "NetworkModel":
        sizes = [int(s) for s in doc["layer_sizes"]]
        weights = [
            np.asarray(w, dtype=float).reshape(sizes[k + 1], sizes[k])
            for k, w in enumerate(doc["weights"])
        ]
        return cls(
            tuple(sizes),
            weights,
            [np.asarray(b, dtype=float) for b in doc["biases"]],
            doc.get("hidden_activation", "sigmoid"),
            doc.get("output_activation", "identity"),
            doc.get("final_mse"),
        )


@dataclass(frozen=True)
class TrainingConfig:
    learning_rate: float = 0.5
    epochs: int = 3000
    regularizer: str = "none"
    reg_strength: float = 0.0
    seed: int = 0
    init_scale: float = 0.5

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ConfigurationError("learning_rate must be positive")
        if self.epochs < 1:
            raise ConfigurationError("epochs must be a positive integer")
        if self.regularizer not in REGULARIZERS:
            raise ConfigurationError(f"regularizer must be one of {REGULARIZERS}")
        if not self.reg_strength >= 0:
            raise ConfigurationError("reg_strength must be nonnegative")
        if not self.init_scale > 0:
            raise ConfigurationError("init_scale must be positive")


def affine(X: np.ndarray, W: np.ndarray, b: np.ndarray) -> np.ndarray:
    # shared by the point and interval forward passes so degenerate boxes agree bitwise
    return X @ W.T + b


def _as_batch(model: NetworkModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != model.n_inputs:
        raise DimensionError(f"expected inputs with {model.n_inputs} features, got shape {X.shape}")
    return X


def _layer_outputs(model: NetworkModel, X: np.ndarray) -> list[np.ndarray]:
    outs = [X]
    for W, b, act in zip(model.weights, model.biases, model.activations):
        outs.append(get_activation(act)(affine(outs[-1], W, b)))
    return outs


def predict(model: NetworkModel, X) -> np.ndarray:
    """Point predictions for a batch of shape ``(n, m)``; returns shape ``(n,)``."""
    return _layer_outputs(model, _as_batch(model, X))[-1][:, 0]


def forward(model: NetworkModel, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionError("forward takes a single feature vector")
    return float(predict(model, x)[0])


def init_model(
    layer_sizes: Sequence[int],
    seed: int = 0,
    init_scale: float = 0.5,
    hidden_activation: str = "sigmoid",
) -> NetworkModel:
    rng = np.random.default_rng(seed)
    sizes = [int(s) for s in layer_sizes]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        weights.append(rng.uniform(-init_scale, init_scale, size=(fan_out, fan_in)))
        biases.append(rng.uniform(-init_scale, init_scale, size=fan_out))
    return NetworkModel(tuple(sizes), weights, biases, hidden_activation)


def penalty(model: NetworkModel, config: TrainingConfig) -> float:
    lam = config.reg_strength
    if config.regularizer == "none" or lam == 0:
        return 0.0
    if config.regularizer == "l1":
        return lam * sum(float(np.abs(W).sum()) for W in model.weights)
    return lam * sum(float(np.sqrt(np.abs(W) + L_HALF_EPS).sum()) for W in model.weights)


def _penalty_grad(W: np.ndarray, config: TrainingConfig) -> np.ndarray | None:
    lam = config.reg_strength
    if config.regularizer == "none" or lam == 0:
        return None
    if config.regularizer == "l1":
        return lam * np.sign(W)
    return lam * np.sign(W) / (2.0 * np.sqrt(np.abs(W) + L_HALF_EPS))


def _check_batch(model, X, y):
    X = _as_batch(model, X)
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] == 0:
        raise InvalidInputError("empty batch")
    if y.shape[0] != X.shape[0]:
        raise DimensionError(f"{X.shape[0]} inputs but {y.shape[0]} targets")
    return X, y


def loss(model: NetworkModel, X, y, config: TrainingConfig | None = None) -> float:
    X, y = _check_batch(model, X, y)
    err = predict(model, X) - y
    value = float(np.mean(err**2))
    if config is not None:
        value += penalty(model, config)
    return value


def _backprop(model: NetworkModel, X: np.ndarray, y: np.ndarray, config: TrainingConfig | None):
    outs = _layer_outputs(model, X)
    n = X.shape[0]
    err = outs[-1][:, 0] - y
    mse = float(np.mean(err**2))
    delta = (2.0 / n) * err[:, None]
    grad_w: list[np.ndarray] = [None] * len(model.weights)
    grad_b: list[np.ndarray] = [None] * len(model.weights)
    for k in reversed(range(len(model.weights))):
        delta = delta * ACTIVATIONS[model.activations[k]][1](outs[k + 1])
        grad_w[k] = delta.T @ outs[k]
        grad_b[k] = delta.sum(axis=0)
        if config is not None:
            reg = _penalty_grad(model.weights[k], config)
            if reg is not None:
                grad_w[k] = grad_w[k] + reg
        delta = delta @ model.weights[k]
    return mse, grad_w, grad_b


def gradient(model: NetworkModel, X, y, config: TrainingConfig | None = None):
    """Backpropagated gradient of :func:`loss`.

    Returns ``(weight_grads, bias_grads)`` laid out like the model parameters.
    """
    X, y = _check_batch(model, X, y)
    _, grad_w, grad_b = _backprop(model, X, y, config)
    return grad_w, grad_b


def train(X, y, layer_sizes: Sequence[int], config: TrainingConfig | None = None,
          hidden_activation: str = "sigmoid") -> NetworkModel:
    """Seeded uniform initialization followed by full-batch gradient descent.

    The returned model carries the final training MSE (without penalty) in
    ``final_mse``.
    """
    config = config or TrainingConfig()
    model = init_model(layer_sizes, config.seed, config.init_scale, hidden_activation)
    X, y = _check_batch(model, X, y)
    lr = config.learning_rate
    for epoch in range(config.epochs):
        with np.errstate(over="ignore", invalid="ignore"):
            mse, gw, gb = _backprop(model, X, y, config)
        if not np.isfinite(mse):
            raise DivergenceError(epoch, mse)
        for k in range(len(model.weights)):
            model.weights[k] -= lr * gw[k]
            model.biases[k] -= lr * gb[k]
    mse = loss(model, X, y)
    if not np.isfinite(mse) or not all(np.all(np.isfinite(W)) for W in model.weights):
        raise DivergenceError(config.epochs, mse)
    model.final_mse = mse
    return model


def save_model(model: NetworkModel, path: str | os.PathLike, extra: dict | None = None) -> None:
    doc = model.to_dict()
    if extra:
        doc.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_model(path: str | os.PathLike) -> NetworkModel:
    with open(path, encoding="utf-8") as fh:
        return NetworkModel.from_dict(json.load(fh))
