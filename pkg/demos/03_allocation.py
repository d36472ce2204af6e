"""Allocate granularity across attributes with the particle swarm.

The target ignores the third attribute, so that attribute can afford the
widest granule. Run: python3 demos/03_allocation.py
"""

import numpy as np

from grannet import GranularityAllocation, NetworkModel, evaluate, optimize, predict

model = NetworkModel(
    layer_sizes=(3, 2, 1),
    weights=[np.array([[3.0, 1.0, 0.0], [-2.0, 0.5, 0.0]]), np.array([[1.0, 1.0]])],
    biases=[np.zeros(2), np.zeros(1)],
)
X = np.random.default_rng(0).uniform(0, 1, size=(40, 3))
y = predict(model, X)

uniform = GranularityAllocation.uniform(3, 0.5)
print("uniform  ", evaluate(model, X, y, uniform))

history = []
result = optimize(model, X, y, base_alpha=0.5, callback=lambda it, i, a, q: history.append(q))
print("optimized", result.component_scores)
print(f"alphas {np.round(result.best_allocation.alphas, 4)} (sum {result.best_allocation.alphas.sum():.12f})")
print(f"importance ranking (most important first): {result.best_allocation.importance_ranking()}")
print(f"{result.evaluations} evaluations, stopped early: {result.stopped_early}")
