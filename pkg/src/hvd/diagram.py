"""One level of the Hausdorff Voronoi diagram, stored around its owner points.

The region of an active hull point p (of cluster Q) is star-shaped from p
inside freg(p): along the ray p + s*u(phi) it is the interval a(phi) < s < b(phi),
where a is where the ray enters freg(p) (the skeleton chain) and b is where
some other cluster becomes closer.  We keep, per active point, the sorted list
of angular sectors [lo, hi] on which b is given by a single witness point (or
is infinite).  Each sector is one face of the visibility-refined diagram: the
intersection of a wedge narrower than a right angle, freg(p), and the
half-plane of points closer to p than to the witness, hence convex.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import polar
from .cluster import Cluster, farthest_index
from .fvd import build_fvd
from .geom import Point, dist
from .polar import PW, TWO_PI
from .sepdec import build_sd

MAX_SECTOR = 0.5 * math.pi
G_TINY = 1e-13  # inverse distances below this (relative to the cluster scale) count as infinity


@dataclass(slots=True)
class Sector:
    lo: float
    hi: float
    far: Optional[tuple]  # (cluster id, hull index) of the witness, None when unbounded
    fid: int


class Frame:
    """Angular frame and skeleton chain of one hull point."""

    __slots__ = ("key", "p", "base", "width", "near", "chain")

    def __init__(self, key, p, base, width, near, chain):
        self.key = key
        self.p = p
        self.base = base
        self.width = width
        self.near = near  # PW of the chain, None for a single-point cluster
        self.chain = chain  # [(start angle, hull index)]

    @property
    def end(self) -> float:
        return self.base + self.width

    def norm(self, theta: float) -> float:
        return self.base + (theta - self.base) % TWO_PI

    def angle(self, q) -> float:
        return self.norm(math.atan2(q[1] - self.p[1], q[0] - self.p[0]))


def fvd_of(cluster: Cluster):
    t = cluster.__dict__.get("_fvd")
    if t is None:
        t = build_fvd(cluster)
        cluster.__dict__["_fvd"] = t
    return t


def sd_of(cluster: Cluster):
    if cluster._sd is None:
        cluster._sd = build_sd(fvd_of(cluster))
    return cluster._sd


def frames_of(cluster: Cluster) -> list:
    fr = cluster.__dict__.get("_frames")
    if fr is not None:
        return fr
    hull = cluster.hull
    if len(hull) == 1:
        fr = [Frame((cluster.id, 0), hull[0], -math.pi, TWO_PI, None, [])]
    else:
        tree = fvd_of(cluster)
        fr = []
        for i, cone in enumerate(tree.cones):
            p = hull[i]
            pieces = [(s, ("n", j)) + polar.inv(hull[j], p) for s, j in cone.chain]
            fr.append(Frame((cluster.id, i), p, cone.base, cone.width, PW(pieces, cone.base + cone.width), cone.chain))
    cluster.__dict__["_frames"] = fr
    return fr


@dataclass
class UpdateStats:
    insertions: int = 0
    deletions: int = 0
    per_insertion: list = field(default_factory=list)  # (cluster id, created, deleted)

    def record(self, cid: int, created: int, deleted: int) -> None:
        self.insertions += created
        self.deletions += deleted
        self.per_insertion.append((cid, created, deleted))

    @property
    def ops(self) -> int:
        return self.insertions + self.deletions


def split_wide(lo: float, hi: float, limit: float = MAX_SECTOR) -> list:
    n = max(1, math.ceil((hi - lo) / limit - 1e-9))
    step = (hi - lo) / n
    return [(lo + i * step, hi if i == n - 1 else lo + (i + 1) * step) for i in range(n)]


class LevelDiagram:
    def __init__(self, level: int = 0):
        self.level = level
        self.clusters: dict = {}
        self.sectors: dict = {}  # (cid, idx) -> [Sector] sorted by lo
        self.empty: dict = {}  # cid -> reason tuple
        self.stats = UpdateStats()
        self._fid = 0

    # ------------------------------------------------------------ basics

    def new_fid(self) -> int:
        self._fid += 1
        return self._fid

    def frame(self, key) -> Frame:
        return frames_of(self.clusters[key[0]])[key[1]]

    def point(self, key) -> Point:
        return self.clusters[key[0]].hull[key[1]]

    def has_region(self, cid: int) -> bool:
        c = self.clusters.get(cid)
        return c is not None and any((cid, i) in self.sectors for i in range(len(c.hull)))

    def active_points(self, cid: int) -> list:
        c = self.clusters[cid]
        return [i for i in range(len(c.hull)) if (cid, i) in self.sectors]

    def present(self) -> list:
        return sorted(self.clusters)

    def nonempty(self) -> list:
        return sorted({k[0] for k in self.sectors})

    def faces(self):
        for key in sorted(self.sectors):
            for sec in self.sectors[key]:
                yield key, sec

    def face_count(self) -> int:
        return sum(len(v) for v in self.sectors.values())

    def far_fn(self, key, sec: Sector) -> PW:
        if sec.far is None:
            return polar.zero(sec.lo, sec.hi)
        z = polar.inv(self.point(sec.far), self.point(key))
        return polar.clamp0(polar.line(sec.lo, sec.hi, z, sec.far))

    def set_sectors(self, key, secs: list) -> None:
        if secs:
            secs.sort(key=lambda s: s.lo)
            self.sectors[key] = secs
        else:
            self.sectors.pop(key, None)

    def sector_index(self, key, phi: float, tol: float = 1e-12) -> Optional[int]:
        secs = self.sectors.get(key)
        if not secs:
            return None
        fr = self.frame(key)
        for shift in (0.0, -TWO_PI, TWO_PI):
            x = phi + shift
            i = bisect.bisect_right([s.lo for s in secs], x + tol) - 1
            if i >= 0 and secs[i].lo - tol <= x <= secs[i].hi + tol:
                return i
            if fr.width < TWO_PI - 1e-9:
                break
        return None

    def nearest_sector(self, key, phi: float) -> Sector:
        secs = self.sectors[key]

        def gap(s):
            if s.lo <= phi <= s.hi:
                return 0.0
            d = min(abs(phi - s.lo), abs(phi - s.hi))
            return min(d % TWO_PI, TWO_PI - d % TWO_PI)

        return min(secs, key=gap)

    # ------------------------------------------------------------ faces

    def face_margin(self, key, sec: Sector, q) -> float:
        """Smallest slack of the face's defining inequalities at q (positive inside)."""
        fr = self.frame(key)
        p = fr.p
        dx, dy = q[0] - p[0], q[1] - p[1]
        r = math.hypot(dx, dy)
        if r == 0.0:
            return 0.0 if fr.near is not None else 1.0
        phi = fr.norm(math.atan2(dy, dx))
        if phi > sec.hi and fr.width >= TWO_PI - 1e-9:
            phi -= TWO_PI
        m = min(math.sin(phi - sec.lo), math.sin(sec.hi - phi))
        if not (sec.lo - 1e-12 <= phi <= sec.hi + 1e-12):
            m = min(m, -1e-3)
        if fr.near is not None:
            for s, e, lab, zx, zy in fr.near.ends():
                if e < sec.lo or s > sec.hi:
                    continue
                m = min(m, dx * zx + dy * zy - 1.0)
        if sec.far is not None:
            zx, zy = polar.inv(self.point(sec.far), p)
            m = min(m, 1.0 - (dx * zx + dy * zy))
        return m

    def face_constraints(self, key, sec: Sector) -> list:
        """Inequalities a*x + b*y + c >= 0 describing the face."""
        fr = self.frame(key)
        px, py = fr.p
        out = []
        for ang, sign in ((sec.lo, 1.0), (sec.hi, -1.0)):
            ux, uy = math.cos(ang), math.sin(ang)
            # sign * cross(u, x - p) >= 0, scaled to be dimensionless near p
            a, b = -uy * sign, ux * sign
            out.append(("wedge", a, b, -(a * px + b * py)))
        if fr.near is not None:
            for s, e, lab, zx, zy in fr.near.ends():
                if e < sec.lo or s > sec.hi:
                    continue
                out.append(("near", zx, zy, -(zx * px + zy * py) - 1.0))
        if sec.far is not None:
            zx, zy = polar.inv(self.point(sec.far), fr.p)
            out.append(("far", -zx, -zy, zx * px + zy * py + 1.0))
        return out

    def nearest_cluster(self, q) -> tuple:
        """(cluster id, hull index, distance) of the face containing q."""
        best = None
        for cid in self.nonempty():
            c = self.clusters[cid]
            b = farthest_index(c, q)
            key = (cid, b)
            if key not in self.sectors:
                continue
            fr = self.frame(key)
            phi = fr.angle(q)
            i = self.sector_index(key, phi)
            sec = self.sectors[key][i] if i is not None else self.nearest_sector(key, phi)
            m = self.face_margin(key, sec, q)
            if best is None or m > best[0] + 1e-12:
                best = (m, cid, b)
        if best is None:
            raise ValueError("diagram has no faces")
        _, cid, b = best
        return cid, b, dist(q, self.clusters[cid].hull[b])

    def owner_grid(self, qs: np.ndarray, scale: float = 1.0) -> np.ndarray:
        """Cluster id owning each query point, decided face by face with numpy."""
        best = np.full(len(qs), -np.inf)
        owner = np.full(len(qs), -1, dtype=np.int64)
        for key, sec in self.faces():
            m = np.full(len(qs), np.inf)
            for kind, a, b, c in self.face_constraints(key, sec):
                v = a * qs[:, 0] + b * qs[:, 1] + c
                if kind == "wedge":
                    v = v / scale
                m = np.minimum(m, v)
            upd = m > best
            best[upd] = m[upd]
            owner[upd] = key[0]
        return owner

    def feature_count(self, key, sec: Sector) -> int:
        """Face plus its boundary edges and vertices, for update accounting."""
        fr = self.frame(key)
        chain = 0 if fr.near is None else sum(1 for s, e, *_ in fr.near.ends() if e > sec.lo and s < sec.hi)
        edges = chain + (1 if sec.far is not None else 0) + 2
        return 1 + edges + edges
