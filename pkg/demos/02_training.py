"""Train a regressor by gradient descent and compare its gradient with finite differences.

Run: python3 demos/02_training.py
"""

import numpy as np

from grannet import TrainingConfig, gradient, predict, train
from grannet.mlp import loss

rng = np.random.default_rng(1)
X = rng.uniform(0, 1, size=(80, 2))
y = 0.5 + 0.3 * np.sin(np.pi * X[:, 0]) - 0.2 * X[:, 1] ** 2

for reg in ("none", "l1", "l1/2"):
    cfg = TrainingConfig(epochs=3000, regularizer=reg, reg_strength=1e-4 if reg != "none" else 0.0)
    model = train(X, y, (2, 6, 1), cfg)
    small = sum(int(np.sum(np.abs(W) < 1e-2)) for W in model.weights)
    print(f"{reg:>5}: final MSE {model.final_mse:.2e}, near-zero weights {small}")

# Central differences on one weight.
gw, _ = gradient(model, X, y)
W = model.weights[0]
h = 1e-5
W[0, 0] += h
up = loss(model, X, y)
W[0, 0] -= 2 * h
down = loss(model, X, y)
W[0, 0] += h
print(f"dL/dW[0,0]: backprop {gw[0][0, 0]:.8f}, finite difference {(up - down) / (2 * h):.8f}")
print(f"fit on first 3 records: {np.round(predict(model, X[:3]), 3)} vs {np.round(y[:3], 3)}")
