"""Push a box of inputs through a small network and check the bounds by sampling.

Run: python3 demos/01_interval_bounds.py
"""

import numpy as np

from grannet import Interval, NetworkModel, interval_forward, predict

model = NetworkModel(
    layer_sizes=(2, 3, 1),
    weights=[np.array([[1.5, -0.7], [0.4, 2.0], [-1.2, 0.9]]), np.array([[0.8, -0.6, 1.1]])],
    biases=[np.array([0.1, -0.3, 0.2]), np.array([0.0])],
)

box = [Interval(0.2, 0.4), Interval(0.5, 0.9)]
out = interval_forward(model, box)
print(f"input box  {[(iv.lo, iv.hi) for iv in box]}")
print(f"output     [{out.lo:.6f}, {out.hi:.6f}]")

# Every sampled output should land inside the bound.
rng = np.random.default_rng(0)
samples = rng.uniform([0.2, 0.5], [0.4, 0.9], size=(10_000, 2))
ys = predict(model, samples)
print(f"sampled    [{ys.min():.6f}, {ys.max():.6f}]  all inside: {bool(np.all((ys >= out.lo) & (ys <= out.hi)))}")

# A degenerate box reproduces the point prediction exactly.
x = np.array([0.3, 0.7])
point = interval_forward(model, [Interval(v, v) for v in x])
print(f"point box  {point.lo!r} == predict {predict(model, x[None])[0]!r}")
