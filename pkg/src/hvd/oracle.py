"""Brute-force reference answers.

Nothing here touches the diagram structures; only distance evaluation from
``geom`` is shared, so the oracle stays an independent check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geom import dist, orient, Sign


@dataclass(frozen=True)
class GridSpec:
    xmin: float
    xmax: float
    ymin: float
    ymax: float
    res: int

    def __post_init__(self):
        if self.res < 2:
            raise ValueError("grid resolution must be at least 2")

    def points(self) -> np.ndarray:
        xs = np.linspace(self.xmin, self.xmax, self.res)
        ys = np.linspace(self.ymin, self.ymax, self.res)
        gx, gy = np.meshgrid(xs, ys)
        return np.column_stack([gx.ravel(), gy.ravel()])


def _points(c):
    return c.hull if hasattr(c, "hull") else c


def grid_for(family, res: int = 64, margin: float = 2.0) -> GridSpec:
    pts = np.array([p for c in family.clusters for p in c.points], dtype=float)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    mid, half = (lo + hi) / 2, np.maximum((hi - lo) / 2, 0.5) * margin
    return GridSpec(mid[0] - half[0], mid[0] + half[0], mid[1] - half[1], mid[1] + half[1], res)


def far_probe_points(family, count: int = 64) -> np.ndarray:
    pts = np.array([p for c in family.clusters for p in c.points], dtype=float)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    radius = 1e3 * max(float(np.hypot(*(hi - lo))), 1.0)
    mid = (lo + hi) / 2
    ang = np.linspace(0.0, 2 * math.pi, count, endpoint=False) + 0.123
    return np.column_stack([mid[0] + radius * np.cos(ang), mid[1] + radius * np.sin(ang)])


def oracle_nearest(q, family) -> tuple[int, float]:
    best_id, best = None, math.inf
    for c in sorted(family.clusters, key=lambda c: c.id):
        d = max(dist(q, p) for p in c.points)
        if d < best:
            best_id, best = c.id, d
    return best_id, best


def farthest_distances(family, qs: np.ndarray) -> tuple[list, np.ndarray]:
    """(cluster ids sorted, array of shape (k, len(qs)) with d_f of every query)."""
    clusters = sorted(family.clusters, key=lambda c: c.id)
    out = np.empty((len(clusters), len(qs)))
    for i, c in enumerate(clusters):
        pts = np.asarray(c.points, dtype=float)
        d = np.hypot(qs[:, None, 0] - pts[None, :, 0], qs[:, None, 1] - pts[None, :, 1])
        out[i] = d.max(axis=1)
    return [c.id for c in clusters], out


def oracle_grid(family, qs: np.ndarray, tol: float = 1e-9):
    """Owner id per query, and a mask of queries whose top two distances differ by less than tol."""
    ids, d = farthest_distances(family, qs)
    order = np.argsort(d, axis=0, kind="stable")
    owner = np.asarray(ids)[order[0]]
    if len(ids) == 1:
        return owner, np.zeros(len(qs), dtype=bool)
    best = np.take_along_axis(d, order[:1], axis=0)[0]
    second = np.take_along_axis(d, order[1:2], axis=0)[0]
    return owner, (second - best) < tol


# ---------------------------------------------------------------- emptiness


def _in_closed_hull(hull, q, tol=1e-12) -> bool:
    if len(hull) == 1:
        return dist(hull[0], q) <= tol
    if len(hull) == 2:
        a, b = hull
        if orient(a, b, q) != Sign.ZERO:
            return False
        return min(a[0], b[0]) - tol <= q[0] <= max(a[0], b[0]) + tol and min(a[1], b[1]) - tol <= q[1] <= max(a[1], b[1]) + tol
    return all(orient(hull[i], hull[(i + 1) % len(hull)], q) != Sign.NEGATIVE for i in range(len(hull)))


def _bisector_pieces(hull):
    """Pieces of the farthest-point skeleton, found by brute force.

    For each pair (i, j) the points of their bisector where both are farthest
    form an interval [t0, t1] of the line m + t*d (possibly unbounded).
    """
    pieces = []
    n = len(hull)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = hull[i], hull[j]
            m = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
            ln = math.hypot(b[0] - a[0], b[1] - a[1])
            d = (-(b[1] - a[1]) / ln, (b[0] - a[0]) / ln)
            t0, t1 = -math.inf, math.inf
            for k in range(n):
                if k in (i, j):
                    continue
                c = hull[k]
                # |x-a|^2 >= |x-c|^2 is linear in t
                w = (c[0] - a[0], c[1] - a[1])
                rhs = (c[0] ** 2 + c[1] ** 2 - a[0] ** 2 - a[1] ** 2) / 2 - (m[0] * w[0] + m[1] * w[1])
                coef = d[0] * w[0] + d[1] * w[1]
                if abs(coef) < 1e-15:
                    if rhs < 0:
                        t0, t1 = 1.0, 0.0
                    continue
                if coef > 0:
                    t0 = max(t0, rhs / coef)
                else:
                    t1 = min(t1, rhs / coef)
            if t0 < t1:
                pieces.append((a, b, m, d, t0, t1))
    return pieces


def _cap_interval(points, hull, a, b, m, d, side, t0, t1, tol):
    """Centers t on the bisector for which points lie in the closed cap on ``side`` or in conv(C).

    |y(t) - q|^2 <= |y(t) - a|^2 is linear in t, so the answer is an interval.
    """
    lo, hi = t0, t1
    for q in points:
        if _in_closed_hull(hull, q):
            continue
        if int(orient(a, b, q)) != side:
            return None
        base = dist(m, q) ** 2 - dist(m, a) ** 2
        coef = 2 * (d[0] * (a[0] - q[0]) + d[1] * (a[1] - q[1]))
        if abs(coef) < 1e-300:
            if base > tol:
                return None
        elif coef > 0:
            hi = min(hi, (tol - base) / coef)
        else:
            lo = max(lo, (tol - base) / coef)
        if lo > hi:
            return None
    return lo, hi


def oracle_region_empty(C, family, grid: Optional[GridSpec] = None):
    """Emptiness of the Hausdorff region of C, with a certificate.

    Primary answer: a cluster inside conv(C), or two clusters on opposite sides
    of a chord inside a common C-circle.  Circle centers are swept along every
    skeleton piece; since cap membership is linear in the center parameter the
    sweep is done exactly, one interval per (cluster, side).  Secondary: the
    number of grid points owned by C.
    Returns (empty, certificate, grid_owned).
    """
    others = [Q for Q in family.clusters if Q.id != C.id]
    hull = list(C.hull)
    certificate = None
    for Q in sorted(others, key=lambda c: c.id):
        if all(_in_closed_hull(hull, q) for q in Q.points):
            certificate = ("ContainedCluster", Q.id)
            break
    if certificate is None and len(hull) >= 2:
        scale = max(dist(p, q) for p in hull for q in hull)
        tol = 1e-12 * scale
        for a, b, m, d, t0, t1 in _bisector_pieces(hull):
            caps = {1: {}, -1: {}}
            for Q in others:
                for side in (1, -1):
                    iv = _cap_interval(Q.points, hull, a, b, m, d, side, t0, t1, tol)
                    if iv is not None:
                        caps[side][Q.id] = iv
            pairs = [
                (x, z)
                for x, (l1, h1) in caps[1].items()
                for z, (l2, h2) in caps[-1].items()
                if x != z and max(l1, l2) <= min(h1, h2)
            ]
            if pairs:
                x, z = min(pairs)
                certificate = ("KillingPair", min(x, z), max(x, z))
                break
    owned = 0
    if grid is not None:
        qs = np.vstack([grid.points(), far_probe_points(family)])
        owner, amb = oracle_grid(family, qs)
        owned = int(np.sum((owner == C.id) & ~amb))
    return certificate is not None, certificate, owned


def oracle_segment_equidistant(u, v, C, P, samples: int = 10_000, tol: float = 1e-12):
    """Point of segment uv where d_f(., C) = d_f(., P), by sweep and bisection."""

    def g(t):
        x = (u[0] + t * (v[0] - u[0]), u[1] + t * (v[1] - u[1]))
        return max(dist(x, p) for p in _points(C)) - max(dist(x, p) for p in _points(P))

    prev_t, prev = 0.0, g(0.0)
    if prev == 0.0:
        return tuple(u)
    for s in range(1, samples + 1):
        t = s / samples
        cur = g(t)
        if cur == 0.0:
            return (u[0] + t * (v[0] - u[0]), u[1] + t * (v[1] - u[1]))
        if (cur > 0) != (prev > 0):
            lo, hi, glo = prev_t, t, prev
            while hi - lo > tol:
                mid = (lo + hi) / 2
                gm = g(mid)
                if (gm > 0) == (glo > 0):
                    lo, glo = mid, gm
                else:
                    hi = mid
            t = (lo + hi) / 2
            return (u[0] + t * (v[0] - u[0]), u[1] + t * (v[1] - u[1]))
        prev_t, prev = t, cur
    return None
