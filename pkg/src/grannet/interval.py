"""Closed-interval arithmetic for affine maps and monotone activations.

Only the operations needed to push a box of inputs through a feedforward
network are provided: scaling by a real, addition, affine images and
nondecreasing activations. All of them return the exact image of their
arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import expit

from .errors import ConfigurationError, DimensionError, InvalidInputError


def _identity(z):
    return z


def _sigmoid_grad(a):
    return a * (1.0 - a)


def _tanh_grad(a):
    return 1.0 - a * a


def _identity_grad(a):
    return np.ones_like(a)


# name -> (function, derivative expressed through the activation value)
ACTIVATIONS: dict[str, tuple[Callable, Callable]] = {
    "sigmoid": (expit, _sigmoid_grad),
    "tanh": (np.tanh, _tanh_grad),
    "identity": (_identity, _identity_grad),
}


def get_activation(name: str) -> Callable:
    try:
        return ACTIVATIONS[name][0]
    except KeyError:
        raise ConfigurationError(
            f"unknown activation {name!r}; expected one of {sorted(ACTIVATIONS)}"
        ) from None


def _check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise InvalidInputError(f"non-finite value {v!r}")


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` with finite endpoints."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        _check_finite(lo, hi)
        if lo > hi:
            raise InvalidInputError(f"interval lower end {lo} exceeds upper end {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, x)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def issubset(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def __contains__(self, y: float) -> bool:
        return contains(self, y)

    def __add__(self, other: "Interval") -> "Interval":
        return add(self, other)

    def __iter__(self):
        yield self.lo
        yield self.hi

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"


def scale(w: float, iv: Interval) -> Interval:
    """Image of ``iv`` under multiplication by ``w``."""
    _check_finite(w)
    a, b = w * iv.lo, w * iv.hi
    return Interval(min(a, b), max(a, b))


def add(a: Interval, b: Interval) -> Interval:
    return Interval(a.lo + b.lo, a.hi + b.hi)


def affine_image(weights: Sequence[float], bias: float, ivs: Sequence[Interval]) -> Interval:
    """Range of ``w @ x + bias`` over the box spanned by ``ivs``."""
    if len(weights) != len(ivs):
        raise DimensionError(f"{len(weights)} weights for {len(ivs)} intervals")
    if len(ivs) == 0:
        raise DimensionError("affine image of an empty box")
    _check_finite(bias)
    acc = Interval(bias, bias)
    for w, iv in zip(weights, ivs):
        acc = add(acc, scale(float(w), iv))
    return acc


def apply_monotone(activation: str, iv: Interval) -> Interval:
    f = get_activation(activation)
    return Interval(float(f(iv.lo)), float(f(iv.hi)))


def contains(iv: Interval, y: float) -> bool:
    return iv.lo <= y <= iv.hi
