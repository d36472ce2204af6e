import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grannet.errors import ConfigurationError, DimensionError, InvalidInputError
from grannet.interval import Interval, add, affine_image, apply_monotone, contains, scale

finite = st.floats(-50, 50, allow_nan=False)


@st.composite
def intervals(draw):
    a, b = draw(finite), draw(finite)
    return Interval(min(a, b), max(a, b))


def test_construction_rejects_reversed_and_nonfinite():
    with pytest.raises(InvalidInputError):
        Interval(2.0, 1.0)
    with pytest.raises(InvalidInputError):
        Interval(0.0, math.inf)
    with pytest.raises(InvalidInputError):
        Interval(math.nan, 0.0)
    assert Interval(1, 3).width == 2.0


@pytest.mark.parametrize("w, iv, expected", [
    (2.0, Interval(1, 3), Interval(2, 6)),
    (-1.0, Interval(1, 3), Interval(-3, -1)),
    (0.0, Interval(-5, 7), Interval(0, 0)),
])
def test_scale(w, iv, expected):
    assert scale(w, iv) == expected


def test_scale_rejects_nonfinite_weight():
    with pytest.raises(InvalidInputError):
        scale(math.inf, Interval(0, 1))


@pytest.mark.parametrize("a, b, expected", [
    (Interval(0, 1), Interval(0, 0), Interval(0, 1)),
    (Interval(1, 2), Interval(3, 5), Interval(4, 7)),
    (Interval(-1, 1), Interval(-2, 2), Interval(-3, 3)),
])
def test_add(a, b, expected):
    assert add(a, b) == expected
    assert a + b == expected


def _corner_range(weights, bias, ivs):
    values = [sum(w * c for w, c in zip(weights, corner)) + bias
              for corner in itertools.product(*[(iv.lo, iv.hi) for iv in ivs])]
    return min(values), max(values)


def test_affine_image_examples():
    assert affine_image([1.0], 0.0, [Interval(2, 4)]) == Interval(2, 4)
    assert affine_image([1.0, -1.0], 0.0, [Interval(0, 1), Interval(0, 1)]) == Interval(-1, 1)
    ivs = [Interval(1, 2), Interval(0, 1)]
    assert _corner_range([2.0, 3.0], 1.0, ivs) == (3.0, 8.0)
    assert affine_image([2.0, 3.0], 1.0, ivs) == Interval(3, 8)


def test_affine_image_dimension_mismatch():
    with pytest.raises(DimensionError):
        affine_image([1.0, 2.0], 0.0, [Interval(0, 1)])


@given(st.lists(st.tuples(st.floats(-5, 5), intervals()), min_size=1, max_size=4), st.floats(-5, 5))
def test_affine_image_matches_corner_enumeration(terms, bias):
    weights = [w for w, _ in terms]
    ivs = [iv for _, iv in terms]
    got = affine_image(weights, bias, ivs)
    lo, hi = _corner_range(weights, bias, ivs)
    assert got.lo == pytest.approx(lo, abs=1e-9)
    assert got.hi == pytest.approx(hi, abs=1e-9)


def test_apply_monotone():
    assert apply_monotone("identity", Interval(-2, 3)) == Interval(-2, 3)
    assert apply_monotone("sigmoid", Interval(0, 0)) == Interval(0.5, 0.5)
    out = apply_monotone("sigmoid", Interval(0, math.log(3)))
    assert out.lo == 0.5
    assert out.hi == pytest.approx(0.75, abs=1e-15)
    with pytest.raises(ConfigurationError):
        apply_monotone("relu6", Interval(0, 1))


def test_contains_closed_endpoints():
    iv = Interval(0, 1)
    assert contains(iv, 0.5)
    assert contains(iv, 1.0)
    assert contains(iv, 0.0)
    assert not contains(iv, 1.0001)
    assert 0.25 in iv


@given(intervals(), intervals(), st.floats(0, 3), st.floats(0, 3), st.floats(-4, 4), st.floats(-4, 4))
def test_inclusion_monotonicity(a, b, grow_a, grow_b, w1, w2):
    a2 = Interval(a.lo - grow_a, a.hi + grow_a)
    b2 = Interval(b.lo - grow_b, b.hi + grow_b)
    assert affine_image([w1, w2], 0.3, [a, b]).issubset(affine_image([w1, w2], 0.3, [a2, b2]))
    for act in ("sigmoid", "tanh", "identity"):
        assert apply_monotone(act, a).issubset(apply_monotone(act, a2))


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=4), st.floats(-5, 5),
       st.lists(finite, min_size=4, max_size=4))
def test_degenerate_consistency(weights, bias, xs):
    xs = xs[: len(weights)]
    ivs = [Interval.point(x) for x in xs]
    out = affine_image(weights, bias, ivs)
    assert out.is_degenerate()
    assert out.lo == pytest.approx(sum(w * x for w, x in zip(weights, xs)) + bias, abs=1e-9)
    assert apply_monotone("sigmoid", Interval.point(0.3)).is_degenerate()


def test_affine_soundness_monte_carlo():
    rng = np.random.default_rng(11)
    for _ in range(50):
        m = int(rng.integers(1, 6))
        w = rng.normal(size=m) * 3
        b = float(rng.normal())
        lo = rng.uniform(-2, 1, size=m)
        hi = lo + rng.uniform(0, 2, size=m)
        out = affine_image(w, b, [Interval(l, h) for l, h in zip(lo, hi)])
        xs = rng.uniform(lo, hi, size=(1000, m))
        vals = xs @ w + b
        assert all(contains(out, v) for v in vals)
