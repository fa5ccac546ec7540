import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hvd.geom import CollinearInput, Sign, circumcenter, compare_dist, dist, incircle, orient

coord = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
point = st.tuples(coord, coord)
small = st.integers(-50, 50)
ipoint = st.tuples(small, small)


def exact_orient(a, b, c):
    a, b, c = [tuple(Fraction(x) for x in p) for p in (a, b, c)]
    v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (v > 0) - (v < 0)


def exact_incircle(a, b, c, d):
    rows = []
    for p in (a, b, c):
        dx, dy = Fraction(p[0]) - Fraction(d[0]), Fraction(p[1]) - Fraction(d[1])
        rows.append((dx, dy, dx * dx + dy * dy))
    (a1, a2, a3), (b1, b2, b3), (c1, c2, c3) = rows
    v = a1 * (b2 * c3 - b3 * c2) - a2 * (b1 * c3 - b3 * c1) + a3 * (b1 * c2 - b2 * c1)
    return (v > 0) - (v < 0)


def test_orient_examples():
    assert orient((0, 0), (1, 0), (0, 1)) == Sign.POSITIVE
    assert orient((0, 0), (1, 0), (2, 0)) == Sign.ZERO
    assert orient((0, 0), (1, 0), (0, -1)) == Sign.NEGATIVE


def test_circumcenter_examples():
    c = circumcenter((0, 0), (4, 0), (2, 3))
    assert c == pytest.approx((2.0, 5.0 / 6.0))
    assert circumcenter((0, 0), (2, 0), (1, 1)) == pytest.approx((1.0, 0.0))
    assert circumcenter((0, 0), (2, 0), (0, 2)) == pytest.approx((1.0, 1.0))
    with pytest.raises(CollinearInput):
        circumcenter((0, 0), (1, 1), (2, 2))


def test_incircle_examples():
    a, b, c = (0, 0), (4, 0), (2, 3)
    assert incircle(a, b, c, (2, 1)) == Sign.POSITIVE
    assert incircle(a, b, c, (0, 0)) == Sign.ZERO
    assert incircle(a, b, c, (10, 10)) == Sign.NEGATIVE


@given(point, point, point)
def test_orient_matches_exact(a, b, c):
    assert int(orient(a, b, c)) == exact_orient(a, b, c)


@given(point, point, point)
def test_orient_antisymmetric(a, b, c):
    assert orient(a, b, c) == -orient(b, a, c)


@given(ipoint, ipoint, ipoint, ipoint)
def test_orient_translation_invariant(a, b, c, t):
    move = lambda p: (p[0] + t[0], p[1] + t[1])
    assert orient(a, b, c) == orient(move(a), move(b), move(c))


@given(point, point, point, point)
def test_incircle_matches_exact(a, b, c, d):
    assert int(incircle(a, b, c, d)) == exact_incircle(a, b, c, d)


def test_incircle_near_degenerate_is_exact():
    # points on a circle up to one ulp, where the float filter cannot decide
    a, b, c = (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0)
    d = (0.0, -1.0 + 2.0 ** -52)
    assert int(incircle(a, b, c, d)) == exact_incircle(a, b, c, d) == 1
    assert incircle(a, b, c, (0.0, -1.0)) == Sign.ZERO


@given(point, point, point)
def test_circumcenter_equidistant(a, b, c):
    if exact_orient(a, b, c) == 0:
        return
    o = circumcenter(a, b, c)
    r = dist(o, a)
    if not math.isfinite(r) or r > 1e8:
        return  # nearly collinear input; the construction is ill-conditioned
    assert abs(dist(o, b) - r) <= 1e-9 * max(1.0, r) * 1e3
    assert abs(dist(o, c) - r) <= 1e-9 * max(1.0, r) * 1e3


def test_incircle_agrees_with_circumradius():
    rng = np.random.default_rng(0)
    pts = rng.uniform(-10, 10, size=(100_000, 4, 2))
    disagree = 0
    for quad in pts:
        a, b, c, d = (tuple(p) for p in quad)
        if orient(a, b, c) == Sign.NEGATIVE:
            a, b = b, a
        elif orient(a, b, c) == Sign.ZERO:
            continue
        o = circumcenter(a, b, c)
        gap = dist(o, a) - dist(o, d)
        if abs(gap) < 1e-9 * (1 + dist(o, a)):
            continue
        disagree += int(incircle(a, b, c, d)) != (1 if gap > 0 else -1)
    assert disagree == 0


@given(point, point, point)
def test_compare_dist_is_exact(q, a, b):
    fq, fa, fb = [tuple(Fraction(x) for x in p) for p in (q, a, b)]
    da = (fq[0] - fa[0]) ** 2 + (fq[1] - fa[1]) ** 2
    db = (fq[0] - fb[0]) ** 2 + (fq[1] - fb[1]) ** 2
    assert int(compare_dist(q, a, b)) == (da > db) - (da < db)
