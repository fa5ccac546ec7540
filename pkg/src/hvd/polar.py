"""Piecewise angular functions of the form g(phi) = u(phi) . z.

Seen from a hull point p, the bisector of p and another point x is the set of
points p + s*u(phi) with 1/s = u(phi) . z_x, where z_x = 2 (x - p) / |x - p|^2.
Working with g = 1/s turns every boundary the diagram needs (farthest-skeleton
chains, Hausdorff bisectors, the domination region of a new cluster) into
upper or lower envelopes of such linear functionals over an angular interval.
A value of 0 stands for a boundary at infinity.
"""
from __future__ import annotations

import math
from typing import Optional

TWO_PI = 2.0 * math.pi
ANGLE_TOL = 1e-12


class PW:
    """Pieces (start, label, zx, zy) covering [lo, hi]; starts are increasing."""

    __slots__ = ("pieces", "hi")

    def __init__(self, pieces, hi):
        self.pieces = pieces
        self.hi = hi

    @property
    def lo(self) -> float:
        return self.pieces[0][0]

    def __repr__(self):
        body = ", ".join(f"{s:.4f}:{lab}" for s, lab, _, _ in self.pieces)
        return f"PW[{body} | {self.hi:.4f}]"

    def ends(self):
        for i, (s, lab, zx, zy) in enumerate(self.pieces):
            e = self.pieces[i + 1][0] if i + 1 < len(self.pieces) else self.hi
            yield s, e, lab, zx, zy

    def at(self, phi: float):
        ps = self.pieces
        lo, hi = 0, len(ps) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if ps[mid][0] <= phi:
                lo = mid
            else:
                hi = mid - 1
        return ps[lo]

    def value(self, phi: float) -> float:
        _, _, zx, zy = self.at(phi)
        return math.cos(phi) * zx + math.sin(phi) * zy

    def label(self, phi: float):
        return self.at(phi)[1]

    def slice(self, lo: float, hi: float) -> "PW":
        out = []
        for s, e, lab, zx, zy in self.ends():
            if e <= lo or s >= hi:
                continue
            out.append((max(s, lo), lab, zx, zy))
        if not out:
            out.append((lo,) + self.at(lo)[1:])
        return PW(out, hi)


def inv(x, p) -> tuple[float, float]:
    dx, dy = x[0] - p[0], x[1] - p[1]
    r2 = dx * dx + dy * dy
    return 2.0 * dx / r2, 2.0 * dy / r2


def line(lo: float, hi: float, z, label) -> PW:
    return PW([(lo, label, z[0], z[1])], hi)


def zero(lo: float, hi: float) -> PW:
    return PW([(lo, None, 0.0, 0.0)], hi)


def _crossings(dx: float, dy: float, s: float, e: float) -> list:
    if dx == 0.0 and dy == 0.0:
        return []
    first = math.atan2(dy, dx) + 0.5 * math.pi
    k = math.ceil((s - first) / math.pi)
    out = []
    t = first + k * math.pi
    while t < e:
        if t - s > ANGLE_TOL and e - t > ANGLE_TOL:
            out.append(t)
        t += math.pi
    return out


def _push(out, s, lab, zx, zy):
    if out and out[-1][1] == lab and out[-1][2] == zx and out[-1][3] == zy:
        return
    if out and s - out[-1][0] <= ANGLE_TOL:
        out[-1] = (out[-1][0], lab, zx, zy)
        if len(out) > 1 and out[-2][1] == lab and out[-2][2] == zx and out[-2][3] == zy:
            out.pop()
        return
    out.append((s, lab, zx, zy))


def combine(f: PW, g: PW, upper: bool) -> PW:
    """Pointwise max (upper) or min of f and g; ties keep f's label."""
    hi = f.hi
    cuts = sorted({s for s, *_ in f.pieces} | {s for s, *_ in g.pieces if f.lo < s < hi})
    cuts.append(hi)
    out = []
    fi = gi = 0
    fp, gp = f.pieces, g.pieces
    for k in range(len(cuts) - 1):
        s, e = cuts[k], cuts[k + 1]
        if e - s <= 0.0:
            continue
        while fi + 1 < len(fp) and fp[fi + 1][0] <= s:
            fi += 1
        while gi + 1 < len(gp) and gp[gi + 1][0] <= s:
            gi += 1
        _, lf, fx, fy = fp[fi]
        _, lg, gx, gy = gp[gi]
        if fx == gx and fy == gy:
            _push(out, s, lf, fx, fy)
            continue
        pts = [s] + _crossings(fx - gx, fy - gy, s, e) + [e]
        for a, b in zip(pts, pts[1:]):
            m = 0.5 * (a + b)
            c, sn = math.cos(m), math.sin(m)
            diff = c * (fx - gx) + sn * (fy - gy)
            take_f = diff >= 0 if upper else diff <= 0
            if take_f:
                _push(out, a, lf, fx, fy)
            else:
                _push(out, a, lg, gx, gy)
    return PW(out, hi)


def envelope(funcs, upper: bool) -> PW:
    it = iter(funcs)
    acc = next(it)
    for f in it:
        acc = combine(acc, f, upper)
    return acc


def clamp0(f: PW) -> PW:
    return combine(f, zero(f.lo, f.hi), upper=True)


def min_of_points(points, labels, p, lo: float, hi: float) -> PW:
    """min over x of u . z_x (x relative to p), labelled by the minimizing point."""
    zs = [inv(x, p) for x in points]
    if len(zs) > 8:
        keep = _hull_indices(zs)
        zs = [zs[i] for i in keep]
        labels = [labels[i] for i in keep]
    return envelope((line(lo, hi, z, lab) for z, lab in zip(zs, labels)), upper=False)


def _hull_indices(zs) -> list:
    # only vertices of conv{z} can minimize a linear functional
    idx = sorted(range(len(zs)), key=lambda i: zs[i])

    def cross(o, a, b):
        return (zs[a][0] - zs[o][0]) * (zs[b][1] - zs[o][1]) - (zs[a][1] - zs[o][1]) * (zs[b][0] - zs[o][0])

    lower, upper = [], []
    for i in idx:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], i) <= 0:
            lower.pop()
        lower.append(i)
    for i in reversed(idx):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], i) <= 0:
            upper.pop()
        upper.append(i)
    hull = lower[:-1] + upper[:-1]
    return sorted(set(hull)) if hull else idx


def where_greater(f: Optional[PW], g: PW, lo: float, hi: float, rtol: float = 0.0) -> list:
    """Maximal intervals of [lo, hi] on which f > g (f None means +infinity).

    With ``rtol`` the excess must exceed rtol times the larger magnitude.
    """
    if f is None:
        return [(lo, hi)] if hi - lo > ANGLE_TOL else []
    d = combine(f.slice(lo, hi), g.slice(lo, hi), upper=True)
    out = []
    for s, e, lab, zx, zy in d.ends():
        # a piece of the max carrying f's functional (and not g's) marks f > g
        m = 0.5 * (s + e)
        fv = f.value(m)
        gv = g.value(m)
        if fv > gv + rtol * max(abs(fv), abs(gv)):
            if out and abs(out[-1][1] - s) <= ANGLE_TOL:
                out[-1] = (out[-1][0], e)
            else:
                out.append((s, e))
    return [(s, e) for s, e in out if e - s > ANGLE_TOL]


def breakpoints(f: PW, lo: float, hi: float) -> list:
    return [s for s, *_ in f.pieces if lo < s < hi]


def intersect(a: list, b: list) -> list:
    """Intersection of two sorted lists of disjoint intervals."""
    out, i, j = [], 0, 0
    while i < len(a) and j < len(b):
        s, e = max(a[i][0], b[j][0]), min(a[i][1], b[j][1])
        if e - s > ANGLE_TOL:
            out.append((s, e))
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return out


def runs(f: PW, lo: float, hi: float) -> list:
    """(start, end, label) runs of f restricted to [lo, hi], equal labels merged."""
    out = []
    for s, e, lab, *_ in f.ends():
        s, e = max(s, lo), min(e, hi)
        if e - s <= 0:
            continue
        if out and out[-1][2] == lab:
            out[-1] = (out[-1][0], e, lab)
        else:
            out.append((s, e, lab))
    return [r for r in out if r[1] - r[0] > ANGLE_TOL] or out[:1]
