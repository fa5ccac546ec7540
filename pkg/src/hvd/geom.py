"""Low-level planar primitives.

Predicates (``orient``, ``incircle``, distance comparisons) use a floating
point filter and fall back to exact rational arithmetic when the filter
cannot certify the sign. Constructions (``circumcenter`` and friends) are
plain double precision.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

EPS = 1e-9

_U = 2.0 ** -53
_ORIENT_BOUND = (3.0 + 16.0 * _U) * _U
_INCIRCLE_BOUND = (10.0 + 96.0 * _U) * _U


class Point(NamedTuple):
    x: float
    y: float


class Sign(enum.IntEnum):
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1


@dataclass(frozen=True)
class Disk:
    center: Point
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("negative radius")

    def contains(self, q, tol: float = 0.0) -> bool:
        return dist(self.center, q) <= self.radius + tol


class CollinearInput(ValueError):
    pass


def set_epsilon(value: float) -> None:
    global EPS
    if value <= 0:
        raise ValueError("epsilon must be positive")
    EPS = value


def _sign(v) -> Sign:
    return Sign.POSITIVE if v > 0 else Sign.NEGATIVE if v < 0 else Sign.ZERO


def orient(a, b, c) -> Sign:
    """Sign of the turn a -> b -> c (positive for a left turn)."""
    detleft = (a[0] - c[0]) * (b[1] - c[1])
    detright = (a[1] - c[1]) * (b[0] - c[0])
    det = detleft - detright
    if abs(det) > _ORIENT_BOUND * (abs(detleft) + abs(detright)):
        return _sign(det)
    ax, ay, bx, by, cx, cy = (Fraction(v) for v in (a[0], a[1], b[0], b[1], c[0], c[1]))
    return _sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))


def incircle(a, b, c, d) -> Sign:
    """Positive iff d lies strictly inside the circle through ccw a, b, c."""
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    t1 = (bdx * cdy - bdy * cdx)
    t2 = (cdx * ady - cdy * adx)
    t3 = (adx * bdy - ady * bdx)
    det = alift * t1 + blift * t2 + clift * t3
    perm = (
        (abs(bdx * cdy) + abs(bdy * cdx)) * alift
        + (abs(cdx * ady) + abs(cdy * adx)) * blift
        + (abs(adx * bdy) + abs(ady * bdx)) * clift
    )
    if abs(det) > _INCIRCLE_BOUND * perm:
        return _sign(det)
    fa = [Fraction(v) for v in a]
    fb = [Fraction(v) for v in b]
    fc = [Fraction(v) for v in c]
    fd = [Fraction(v) for v in d]
    adx, ady = fa[0] - fd[0], fa[1] - fd[1]
    bdx, bdy = fb[0] - fd[0], fb[1] - fd[1]
    cdx, cdy = fc[0] - fd[0], fc[1] - fd[1]
    det = (
        (adx * adx + ady * ady) * (bdx * cdy - bdy * cdx)
        + (bdx * bdx + bdy * bdy) * (cdx * ady - cdy * adx)
        + (cdx * cdx + cdy * cdy) * (adx * bdy - ady * bdx)
    )
    return _sign(det)


def dist2(a, b) -> float:
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return dx * dx + dy * dy


def dist(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def compare_dist(q, a, b) -> Sign:
    """Sign of d(q, a) - d(q, b), exact.

    Equivalent to the side of q with respect to the bisector of a and b.
    """
    da = dist2(q, a)
    db = dist2(q, b)
    diff = da - db
    if abs(diff) > 8 * _U * (da + db):
        return _sign(diff)
    qx, qy = Fraction(q[0]), Fraction(q[1])
    fa = (qx - Fraction(a[0])) ** 2 + (qy - Fraction(a[1])) ** 2
    fb = (qx - Fraction(b[0])) ** 2 + (qy - Fraction(b[1])) ** 2
    return _sign(fa - fb)


def circumcenter(a, b, c) -> Point:
    if orient(a, b, c) == Sign.ZERO:
        raise CollinearInput(f"collinear points {a}, {b}, {c}")
    bx, by = b[0] - a[0], b[1] - a[1]
    cx, cy = c[0] - a[0], c[1] - a[1]
    d = 2.0 * (bx * cy - by * cx)
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    return Point(a[0] + ux, a[1] + uy)


def bisector_line_intersection(p, q, a, b):
    """Parameter t with a + t (b - a) equidistant from p and q, or None."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    wx, wy = q[0] - p[0], q[1] - p[1]
    den = 2.0 * (dx * wx + dy * wy)
    if den == 0.0:
        return None
    mx, my = (p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0
    return 2.0 * ((mx - a[0]) * wx + (my - a[1]) * wy) / den


def lerp(a, b, t: float) -> Point:
    return Point(a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))


def angle_of(v) -> float:
    return math.atan2(v[1], v[0])


def unit(theta: float) -> tuple[float, float]:
    return math.cos(theta), math.sin(theta)
