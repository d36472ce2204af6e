"""Granular inputs, interval propagation and allocation scoring.

An allocation assigns attribute ``i`` a granule of full width ``alphas[i]``
centred on the (normalized) feature value. Widths are never clipped to the
unit range. The total width is fixed at ``m * base_alpha``.

Scores of an allocation over a dataset ``(X, y)``:

* coverage      fraction of targets inside their output interval
* specificity   sum of output widths divided by ``n * m * base_alpha``
* balance       ``prod(alphas) / base_alpha**m``
* Q1            ``C * exp(-S) * (X0 - (B - b0)**2)`` where ``X0`` is
                ``(1 - b0)**2`` for ``b0 <= 1/2`` and ``b0**2`` otherwise
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionError, InvalidInputError
from .interval import Interval, get_activation
from .mlp import NetworkModel, affine

BUDGET_TOL = 1e-9


@dataclass(frozen=True)
class GranularityAllocation:
    alphas: np.ndarray
    base_alpha: float

    def __post_init__(self):
        alphas = np.array(self.alphas, dtype=float).ravel()
        alphas.setflags(write=False)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "base_alpha", float(self.base_alpha))
        if alphas.size == 0:
            raise DimensionError("allocation needs at least one attribute")
        if not (np.all(np.isfinite(alphas)) and math.isfinite(self.base_alpha)):
            raise InvalidInputError("allocation has non-finite entries")
        if not self.base_alpha > 0:
            raise InvalidInputError("base granularity must be positive")
        if np.any(alphas < 0):
            raise InvalidInputError(f"negative granularity in {alphas}")
        budget = alphas.size * self.base_alpha
        if abs(alphas.sum() - budget) > BUDGET_TOL:
            raise InvalidInputError(
                f"granularities sum to {alphas.sum()!r}, budget is {budget!r}"
            )

    @classmethod
    def uniform(cls, m: int, base_alpha: float) -> "GranularityAllocation":
        return cls(np.full(m, float(base_alpha)), base_alpha)

    @property
    def m(self) -> int:
        return self.alphas.size

    def importance_ranking(self) -> list[int]:
        """Attribute indices from most to least important (ascending width)."""
        return [int(i) for i in np.argsort(self.alphas, kind="stable")]


@dataclass(frozen=True)
class ObjectiveConfig:
    target_balance: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.target_balance <= 1.0:
            raise InvalidInputError("target balance must lie in [0, 1]")


class Scores(NamedTuple):
    coverage: float
    specificity: float
    balance: float
    q1: float


def _check_alloc(X: np.ndarray, alloc: GranularityAllocation) -> None:
    if X.shape[-1] != alloc.m:
        raise DimensionError(f"{X.shape[-1]} features but allocation covers {alloc.m}")


def granulate(x, alloc: GranularityAllocation) -> list[Interval]:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionError("granulate takes a single feature vector")
    _check_alloc(x, alloc)
    half = alloc.alphas / 2.0
    return [Interval(xi - h, xi + h) for xi, h in zip(x, half)]


def granulate_batch(X, alloc: GranularityAllocation) -> tuple[np.ndarray, np.ndarray]:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    _check_alloc(X, alloc)
    half = alloc.alphas / 2.0
    return X - half, X + half


def propagate(model: NetworkModel, lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exact per-neuron interval pass for a batch of boxes.

    ``lo`` and ``hi`` have shape ``(n, m)``; returns two arrays of shape ``(n,)``.
    """
    lo = np.atleast_2d(np.asarray(lo, dtype=float))
    hi = np.atleast_2d(np.asarray(hi, dtype=float))
    if lo.shape != hi.shape or lo.shape[1] != model.n_inputs:
        raise DimensionError(
            f"boxes of shape {lo.shape}/{hi.shape} for a {model.n_inputs}-input model"
        )
    if np.any(lo > hi):
        raise InvalidInputError("box with lower end above upper end")
    for W, b, act in zip(model.weights, model.biases, model.activations):
        f = get_activation(act)
        centre = (lo + hi) / 2.0
        radius = (hi - lo) / 2.0
        c = affine(centre, W, b)
        r = radius @ np.abs(W).T
        lo, hi = f(c - r), f(c + r)
    return lo[:, 0], hi[:, 0]


def interval_forward(model: NetworkModel, ivs: Sequence[Interval]) -> Interval:
    if len(ivs) != model.n_inputs:
        raise DimensionError(f"{len(ivs)} intervals for a {model.n_inputs}-input model")
    lo = np.array([[iv.lo for iv in ivs]])
    hi = np.array([[iv.hi for iv in ivs]])
    out_lo, out_hi = propagate(model, lo, hi)
    return Interval(out_lo[0], out_hi[0])


def output_intervals(model: NetworkModel, X, alloc: GranularityAllocation):
    """Output interval bounds for every record of ``X`` under ``alloc``."""
    lo, hi = granulate_batch(X, alloc)
    return propagate(model, lo, hi)


def _check_data(X, y):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if y.size == 0:
        raise InvalidInputError("empty dataset")
    if X.shape[0] != y.size:
        raise DimensionError(f"{X.shape[0]} records but {y.size} targets")
    return X, y


def coverage_from_bounds(y, lo, hi) -> float:
    y = np.asarray(y, dtype=float)
    return float(np.count_nonzero((lo <= y) & (y <= hi))) / y.size


def specificity_from_bounds(lo, hi, m: int, base_alpha: float) -> float:
    if not base_alpha > 0:
        raise InvalidInputError("base granularity must be positive")
    return float(np.sum(hi - lo)) / (len(lo) * m * base_alpha)


def coverage(model: NetworkModel, X, y, alloc: GranularityAllocation) -> float:
    X, y = _check_data(X, y)
    lo, hi = output_intervals(model, X, alloc)
    return coverage_from_bounds(y, lo, hi)


def specificity(model: NetworkModel, X, y, alloc: GranularityAllocation) -> float:
    X, y = _check_data(X, y)
    lo, hi = output_intervals(model, X, alloc)
    return specificity_from_bounds(lo, hi, alloc.m, alloc.base_alpha)


def balance(alloc: GranularityAllocation) -> float:
    ratio = float(np.prod(alloc.alphas / alloc.base_alpha))
    # AM-GM bounds the ratio by 1; trim rounding overshoot from the rescaled budget
    return min(ratio, 1.0)


def balance_vertex(b0: float) -> float:
    return (1.0 - b0) ** 2 if b0 <= 0.5 else b0**2


def objective_q1(C: float, S: float, B: float, cfg: ObjectiveConfig | None = None) -> float:
    cfg = cfg or ObjectiveConfig()
    b0 = cfg.target_balance
    if not 0.0 <= C <= 1.0:
        raise InvalidInputError(f"coverage {C!r} outside [0, 1]")
    if not S >= 0.0:
        raise InvalidInputError(f"specificity {S!r} is negative or NaN")
    if not 0.0 <= B <= 1.0:
        raise InvalidInputError(f"balance {B!r} outside [0, 1]")
    return C * math.exp(-S) * (balance_vertex(b0) - (B - b0) ** 2)


def evaluate(model: NetworkModel, X, y, alloc: GranularityAllocation,
             cfg: ObjectiveConfig | None = None) -> Scores:
    """Coverage, specificity, balance and Q1 from a single interval pass."""
    X, y = _check_data(X, y)
    lo, hi = output_intervals(model, X, alloc)
    C = coverage_from_bounds(y, lo, hi)
    S = specificity_from_bounds(lo, hi, alloc.m, alloc.base_alpha)
    B = balance(alloc)
    return Scores(C, S, B, objective_q1(C, S, B, cfg))
