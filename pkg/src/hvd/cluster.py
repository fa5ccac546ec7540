"""Input clusters, convex hulls, farthest-point queries and family validation."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

import numpy as np

from .geom import Point, Sign, compare_dist, dist, incircle, orient

LINEAR_SCAN_LIMIT = 32


class InsideHull(ValueError):
    pass


class Degenerate(ValueError):
    pass


def convex_hull(points) -> list[Point]:
    """Strictly convex hull in counterclockwise order, starting at the lexicographic minimum."""
    pts = sorted(set(Point(float(p[0]), float(p[1])) for p in points))
    if not pts:
        raise ValueError("empty point set")
    if len(pts) <= 2:
        return pts

    def half(seq):
        chain = []
        for p in seq:
            while len(chain) >= 2 and orient(chain[-2], chain[-1], p) != Sign.POSITIVE:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        return hull[:1]
    return hull


@dataclass(eq=False)
class Cluster:
    id: int
    points: tuple
    hull: tuple = None
    _sd: object = field(default=None, repr=False)

    def __post_init__(self):
        self.points = tuple(Point(float(x), float(y)) for x, y in self.points)
        if not self.points:
            raise ValueError(f"cluster {self.id} is empty")
        if self.hull is None:
            self.hull = tuple(convex_hull(self.points))
        self.index = {p: i for i, p in enumerate(self.hull)}

    def __len__(self):
        return len(self.hull)

    def __repr__(self):
        return f"Cluster({self.id}, hull={list(self.hull)})"

    @property
    def bbox(self):
        xs = [p.x for p in self.hull]
        ys = [p.y for p in self.hull]
        return min(xs), min(ys), max(xs), max(ys)

    def contains(self, q) -> bool:
        """Closed containment of q in conv(hull)."""
        h = self.hull
        if len(h) == 1:
            return tuple(q) == tuple(h[0])
        if len(h) == 2:
            return orient(h[0], h[1], q) == Sign.ZERO and min(h[0], h[1]) <= tuple(q) <= max(h[0], h[1])
        return all(orient(h[i], h[(i + 1) % len(h)], q) != Sign.NEGATIVE for i in range(len(h)))

    def strictly_contains(self, q) -> bool:
        h = self.hull
        if len(h) < 3:
            return False
        return all(orient(h[i], h[(i + 1) % len(h)], q) == Sign.POSITIVE for i in range(len(h)))


@dataclass
class Family:
    clusters: list

    @property
    def k(self) -> int:
        return len(self.clusters)

    @property
    def n(self) -> int:
        return sum(len(c.hull) for c in self.clusters)

    def by_id(self) -> dict:
        return {c.id: c for c in self.clusters}

    @classmethod
    def from_points(cls, groups) -> "Family":
        return cls([Cluster(i, pts) for i, pts in enumerate(groups)])


def farthest_index(cluster: Cluster, q) -> int:
    hull = cluster.hull
    if len(hull) > LINEAR_SCAN_LIMIT:
        from .sepdec import build_sd, locate_index

        if cluster._sd is None:
            from .fvd import build_fvd

            cluster._sd = build_sd(build_fvd(cluster))
        return locate_index(cluster._sd, q)
    best = 0
    for i in range(1, len(hull)):
        if compare_dist(q, hull[i], hull[best]) == Sign.POSITIVE:
            best = i
    return best


def farthest_point(cluster: Cluster, q) -> tuple[Point, float]:
    i = farthest_index(cluster, q)
    p = cluster.hull[i]
    return p, dist(p, q)


def farthest_distance(cluster: Cluster, q) -> float:
    return farthest_point(cluster, q)[1]


def tangents(points, q) -> tuple[Point, Point]:
    """Tangent vertices from an exterior point q to a convex polygon (ccw list).

    Returns (a, b) with the polygon to the left of q->a and to the right of q->b.
    """
    hull = list(points.hull) if isinstance(points, Cluster) else list(points)
    m = len(hull)
    if m == 1:
        raise Degenerate("tangents to a single point")
    right = left = None
    for i, v in enumerate(hull):
        prv, nxt = hull[i - 1], hull[(i + 1) % m]
        s1, s2 = orient(q, v, prv), orient(q, v, nxt)
        if s1 != Sign.NEGATIVE and s2 != Sign.NEGATIVE and right is None:
            right = v
        if s1 != Sign.POSITIVE and s2 != Sign.POSITIVE and left is None:
            left = v
    if right is None or left is None or right == left:
        raise InsideHull(f"{q} is not outside the hull")
    if m == 2 and orient(q, right, left) == Sign.ZERO:
        raise InsideHull(f"{q} is collinear with a two-point hull")
    if m > 2:
        for i in range(m):
            if orient(hull[i], hull[(i + 1) % m], q) == Sign.NEGATIVE:
                break
        else:
            raise InsideHull(f"{q} is inside the hull")
    return right, left


@dataclass
class ValidationReport:
    ok: bool
    crossing_pairs: list
    m: int
    degeneracies: list

    def summary(self) -> str:
        if self.ok:
            return "ok"
        lines = [f"crossing pairs: {self.crossing_pairs} (m={self.m})"]
        lines += self.degeneracies
        return "\n".join(lines)


def supporting_segments(P: Cluster, Q: Cluster) -> int:
    """Number of edges of CH(P u Q) joining a point of P to a point of Q."""
    owner = {p: 0 for p in P.hull}
    owner.update({q: 1 for q in Q.hull})
    hull = convex_hull(list(P.hull) + list(Q.hull))
    if len(hull) < 2:
        return 0
    if len(hull) == 2:
        return int(owner[hull[0]] != owner[hull[1]])
    return sum(owner[hull[i]] != owner[hull[(i + 1) % len(hull)]] for i in range(len(hull)))


def _overlapping_pairs(clusters):
    boxes = sorted(((c.bbox, c) for c in clusters), key=lambda t: t[0][0])
    active = []
    for box, c in boxes:
        active = [(b, d) for b, d in active if b[2] >= box[0]]
        for b, d in active:
            if b[1] <= box[3] and box[1] <= b[3]:
                yield d, c
        active.append((box, c))


def _cocircular_candidates(pts: np.ndarray, rng: random.Random, exhaustive_limit: int = 200):
    n = len(pts)
    if n < 4:
        return []
    if n <= exhaustive_limit:
        triples = np.array(list(itertools.combinations(range(n), 3)), dtype=np.int64)
    else:
        triples = np.array([sorted(rng.sample(range(n), 3)) for _ in range(4000)], dtype=np.int64)
    a, b, c = pts[triples[:, 0]], pts[triples[:, 1]], pts[triples[:, 2]]
    bx, by = b[:, 0] - a[:, 0], b[:, 1] - a[:, 1]
    cx, cy = c[:, 0] - a[:, 0], c[:, 1] - a[:, 1]
    d = 2.0 * (bx * cy - by * cx)
    ok = np.abs(d) > 0
    triples, a, bx, by, cx, cy, d = triples[ok], a[ok], bx[ok], by[ok], cx[ok], cy[ok], d[ok]
    b2, c2 = bx * bx + by * by, cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d + a[:, 0]
    uy = (bx * c2 - cx * b2) / d + a[:, 1]
    r = np.hypot(ux - a[:, 0], uy - a[:, 1])
    scale = max(1.0, float(np.abs(pts).max()))
    out = []
    if n <= exhaustive_limit:
        tol = 1e-7 * scale
        order = np.lexsort((uy, ux))
        for j in range(len(order) - 1):
            i0, i1 = order[j], order[j + 1]
            if abs(ux[i0] - ux[i1]) < tol and abs(uy[i0] - uy[i1]) < tol and abs(r[i0] - r[i1]) < tol:
                quad = sorted(set(triples[i0]) | set(triples[i1]))
                if len(quad) == 4:
                    out.append(tuple(quad))
    else:
        for t, x, y, rr in zip(triples, ux, uy, r):
            dd = np.abs(np.hypot(pts[:, 0] - x, pts[:, 1] - y) - rr)
            for j in np.nonzero(dd < 1e-9 * scale)[0]:
                if j not in t:
                    out.append(tuple(sorted(list(t) + [int(j)])))
    return sorted(set(out))


def validate_family(family: Family, seed: int = 0) -> ValidationReport:
    crossing = []
    m = 0
    degeneracies = []
    owner = {}
    for c in family.clusters:
        if len(set(c.points)) != len(c.points):
            degeneracies.append(f"cluster {c.id} has repeated points")
        for p in c.hull:
            if p in owner and owner[p] != c.id:
                degeneracies.append(f"point {tuple(p)} shared by clusters {owner[p]} and {c.id}")
            owner[p] = c.id
        for p in c.points:
            if p in owner and owner[p] != c.id:
                degeneracies.append(f"point {tuple(p)} shared by clusters {owner[p]} and {c.id}")
    for P, Q in _overlapping_pairs(family.clusters):
        s = supporting_segments(P, Q)
        if s > 2:
            crossing.append(tuple(sorted((P.id, Q.id))))
            m += s - 2
    crossing.sort()
    allpts = [p for c in family.clusters for p in c.hull]
    if allpts:
        arr = np.array(allpts, dtype=float)
        for quad in _cocircular_candidates(arr, random.Random(seed)):
            a, b, c, d = (allpts[i] for i in quad)
            if orient(a, b, c) == Sign.ZERO:
                continue
            if orient(a, b, c) == Sign.NEGATIVE:
                a, b = b, a
            if incircle(a, b, c, d) == Sign.ZERO:
                degeneracies.append(f"cocircular points {[tuple(allpts[i]) for i in quad]}")
    return ValidationReport(not crossing and not degeneracies, crossing, m, degeneracies)
