"""Voronoi hierarchy over level diagrams, with walks, point location and linking.

Level 0 holds every inserted cluster; each cluster also lives on levels
1..L where L is drawn once from a geometric distribution.  Point location
walks on the top level and reuses the answer as the start of the walk one
level down.  A cluster whose region vanishes on level l-1 while surviving on
level l is linked to clusters of level l-1 that dominate it everywhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cluster import Cluster, farthest_distance, farthest_index
from .diagram import G_TINY, LevelDiagram, fvd_of, frames_of, sd_of
from . import geom
from .geom import Point, Sign, dist, lerp, orient
from .incremental import CandidateEdge, find_representative, grow_region
from .sepdec import PreconditionViolated, segment_query

MAX_WALK = 100_000


class AlreadyNearest(Exception):
    pass


class NoWitness(Exception):
    pass


@dataclass
class CriticalLink:
    cluster: int
    level: int
    targets: tuple  # clusters the descent continues from
    killers: tuple  # clusters that together dominate ``cluster`` everywhere on level-1
    how: str  # "single" | "pair" | "search"


@dataclass
class MixedVertex:
    pos: Point
    p1: Point  # the two points of the owner cluster
    p2: Point
    q: Point  # the foreign point
    cluster: int  # cluster of q


def assign_levels(k: int, beta: float, rng) -> list:
    """Maximum level of each cluster: P(level = l) = beta**l * (1 - beta)."""
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    return [int(x) - 1 for x in rng.geometric(1.0 - beta, size=k)]


# ------------------------------------------------------------------ tiny families


def _edge_param(tree, e, far_end: bool):
    if e.b is not None:
        a, b = tree.vertices[e.a].pos, tree.vertices[e.b].pos
        return a, (b[0] - a[0], b[1] - a[1]), 0.0, 1.0
    if e.a is not None:
        return e.origin, e.direction, 0.0, math.inf
    return e.origin, e.direction, -math.inf, math.inf


def region_empty_among(P: Cluster, others) -> bool:
    """Whether no point is strictly closer to P than to every cluster in ``others``.

    A nonempty region of P meets the skeleton of P, and along a skeleton edge
    with chord (c1, c2) a cluster Q is at least as close as P exactly where
    every q in Q satisfies |x - q| <= |x - c1|, a linear condition in the edge
    parameter.  So each Q covers one closed interval and the region is empty
    iff those intervals cover every edge.
    """
    hull = P.hull
    if len(hull) == 1 or not others:
        return False
    tree = fvd_of(P)
    scale = max(dist(a, b) for a in hull for b in hull)
    for e in tree.edges:
        c1 = hull[e.chord[0]]
        A, D, t0, t1 = _edge_param(tree, e, True)
        covers = []
        for Q in others:
            lo, hi = t0, t1
            for q in Q.hull:
                w = (q[0] - c1[0], q[1] - c1[1])
                const = (q[0] ** 2 + q[1] ** 2 - c1[0] ** 2 - c1[1] ** 2) - 2 * (A[0] * w[0] + A[1] * w[1])
                coef = -2 * (D[0] * w[0] + D[1] * w[1])
                # const + coef * t <= 0
                if abs(coef) < 1e-300:
                    if const > 0:
                        lo, hi = 1.0, 0.0
                        break
                elif coef > 0:
                    hi = min(hi, -const / coef)
                else:
                    lo = max(lo, -const / coef)
                if lo > hi:
                    break
            if lo <= hi:
                covers.append((lo, hi))
        covers.sort()
        tol = 1e-12 * (1.0 if e.b is not None else scale)
        reach = t0
        gap = False
        for lo, hi in covers:
            if lo > reach + tol:
                gap = True
                break
            reach = max(reach, hi)
        if gap or reach < t1 - tol:
            return False
    return True


# ------------------------------------------------------------------ hierarchy


@dataclass
class Hierarchy:
    beta: float = 0.25
    seed: int = 0
    far: float = 1e6  # finite stand-in for points at infinity
    levels: list = field(default_factory=lambda: [LevelDiagram(0)])
    links: dict = field(default_factory=dict)  # (cluster id, level) -> CriticalLink
    max_level: dict = field(default_factory=dict)
    walk_steps: list = field(default_factory=list)  # steps of every walk, one entry per level visited
    fallbacks: dict = field(default_factory=lambda: {"neighbour": 0, "scan": 0, "start": 0, "segment": 0})
    unlinked: list = field(default_factory=list)
    record_walks: bool = True

    def __post_init__(self):
        self.rng = np.random.default_rng(self.seed)

    @property
    def height(self) -> int:
        return len(self.levels)

    def level(self, l: int) -> LevelDiagram:
        while len(self.levels) <= l:
            self.levels.append(LevelDiagram(len(self.levels)))
        return self.levels[l]

    def active_set(self, l: int, cid: int) -> list:
        return self.levels[l].active_points(cid)

    @staticmethod
    def dist_to(D: LevelDiagram, cid: int, q) -> float:
        return farthest_distance(D.clusters[cid], q)

    # -------------------------------------------------------------- walks

    def walk_step(self, l: int, cid: int, q) -> int:
        """A neighbour of ``cid`` at level l strictly closer to q, or AlreadyNearest."""
        D = self.levels[l]
        C = D.clusters[cid]
        b = farthest_index(C, q)
        d_here = dist(q, C.hull[b])
        key = (cid, b)
        cand = None
        if key in D.sectors:
            fr = D.frame(key)
            phi = fr.angle(q)
            i = D.sector_index(key, phi)
            sec = D.sectors[key][i] if i is not None else D.nearest_sector(key, phi)
            if sec.far is None:
                raise AlreadyNearest(cid)
            w = D.point(sec.far)
            if dist(q, w) >= d_here:
                raise AlreadyNearest(cid)
            cand = sec.far[0]
        else:
            active = D.active_points(cid)
            if not active:
                raise AlreadyNearest(cid)
            c = max(active, key=lambda j: (dist(q, C.hull[j]), -j))
            key = (cid, c)
            fr = D.frame(key)
            phi = fr.angle(q)
            secs = [s for s in D.sectors[key] if s.far is not None]
            if secs:
                i = D.sector_index(key, phi)
                sec = D.sectors[key][i] if i is not None and D.sectors[key][i].far is not None else None
                if sec is None:
                    def gap(s):
                        if s.lo <= phi <= s.hi:
                            return 0.0
                        d = min(abs(phi - s.lo), abs(phi - s.hi)) % (2 * math.pi)
                        return min(d, 2 * math.pi - d)
                    sec = min(secs, key=gap)
                cand = sec.far[0]
        if cand is not None and self.dist_to(D, cand, q) < d_here:
            return cand
        # the direct step did not reduce the distance: try every neighbour, then everything
        nbrs = {s.far[0] for k2 in [(cid, j) for j in D.active_points(cid)] for s in D.sectors[k2] if s.far is not None}
        if nbrs:
            best = min(sorted(nbrs), key=lambda x: self.dist_to(D, x, q))
            if self.dist_to(D, best, q) < d_here:
                self.fallbacks["neighbour"] += 1
                return best
        best = min(D.nonempty(), key=lambda x: (self.dist_to(D, x, q), x))
        if self.dist_to(D, best, q) < d_here:
            self.fallbacks["scan"] += 1
            return best
        raise AlreadyNearest(cid)

    def walk(self, l: int, start: int, q) -> tuple:
        cur, steps = start, 0
        while True:
            try:
                nxt = self.walk_step(l, cur, q)
            except AlreadyNearest:
                break
            cur = nxt
            steps += 1
            if steps > MAX_WALK:
                raise RuntimeError("walk does not terminate")
        if self.record_walks:
            self.walk_steps.append(steps)
        return cur, steps

    def _resolve_start(self, s: Optional[int], l: int, q) -> Optional[int]:
        D = self.levels[l]
        if s is not None and D.has_region(s):
            return s
        found, seen = [], set()
        stack = [s] if s is not None else []
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            if x in D.clusters and D.has_region(x):
                found.append(x)
                continue
            link = self.links.get((x, l + 1))
            if link is not None:
                stack.extend(link.targets)
        if found:
            return min(found, key=lambda x: (self.dist_to(D, x, q), x))
        ne = D.nonempty()
        if not ne:
            return None
        if s is not None:
            self.fallbacks["start"] += 1
        return ne[0]

    def locate(self, q, target: int = 0) -> Optional[tuple]:
        """(cluster id, farthest distance) of the nearest cluster at level ``target``."""
        s = None
        for l in range(len(self.levels) - 1, target - 1, -1):
            s2 = self._resolve_start(s, l, q)
            if s2 is None:
                continue
            s, _ = self.walk(l, s2, q)
        if s is None:
            return None
        return s, self.dist_to(self.levels[target], s, q)

    # -------------------------------------------------------------- parametric location

    def _parametric_end(self, u, v, C: Cluster, chord, target: int):
        """Walk along u->v to the first point where C becomes nearest at level ``target``."""

        def dfc(x):
            return dist(x, chord[0]) if chord is not None else farthest_distance(C, x)

        a = u
        s = None
        for l in range(len(self.levels) - 1, target - 1, -1):
            D = self.levels[l]
            for _ in range(MAX_WALK):
                s2 = self._resolve_start(s, l, a)
                if s2 is None:
                    break
                s, _ = self.walk(l, s2, a)
                dq, dc = self.dist_to(D, s, a), dfc(a)
                tol = geom.EPS * max(1.0, dc)
                if abs(dc - dq) <= tol or dc < dq:
                    break
                if self.dist_to(D, s, v) <= dfc(v):
                    return None
                nxt = self._equidistant(D.clusters[s], v, a, C, chord)
                if dist(nxt, a) <= tol:
                    break
                a = nxt
        if s is None:
            return a, None
        return a, s

    def _equidistant(self, Q: Cluster, v, a, C, chord):
        try:
            return segment_query(sd_of(Q), v, a, C, chord)
        except PreconditionViolated:
            self.fallbacks["segment"] += 1
            f = lambda x: (dist(x, chord[0]) if chord else farthest_distance(C, x)) - farthest_distance(Q, x)
            lo, hi = 0.0, 1.0
            for _ in range(200):
                m = (lo + hi) / 2
                if f(lerp(v, a, m)) < 0:
                    lo = m
                else:
                    hi = m
            return lerp(v, a, (lo + hi) / 2)

    def parametric_locate(self, u, v, C: Cluster, chord=None, target: int = 0):
        """(t, P): a point of uv where C ties with its nearest rival P at level ``target``, or None.

        Searches from u toward v first; if C is already nearest at u, the
        search runs from v toward u instead.
        """
        if not self.levels[target].nonempty():
            return None
        for x, y in ((u, v), (v, u)):
            nearest = self.locate(x, target)
            dc = dist(x, chord[0]) if chord else farthest_distance(C, x)
            if dc < nearest[1]:
                continue
            res = self._parametric_end(x, y, C, chord, target)
            if res is None:
                return None
            return res
        return None

    def parametric_interval(self, cand: CandidateEdge, C: Cluster, target: int):
        """Both ends of C's stretch on a candidate edge, and a verified interior point."""
        a = self._parametric_end(cand.u, cand.v, C, cand.chord, target)
        if a is None:
            return None
        b = self._parametric_end(cand.v, cand.u, C, cand.chord, target)
        if b is None:
            return None
        for frac in (0.5, 0.25, 0.75):
            t = lerp(a[0], b[0], frac)
            found = self.locate(t, target)
            if farthest_distance(C, t) < found[1]:
                return a, b, t, found[0]
        return None

    # -------------------------------------------------------------- insertion

    def insert_cluster(self, C: Cluster, max_level: int) -> dict:
        """Insert C into levels 0..max_level; returns per-level growth results."""
        self.max_level[C.id] = max_level
        results, killed_at, empty_levels = {}, {}, []
        for l in range(max_level + 1):
            D = self.level(l)
            res, located = self._insert_at(C, l)
            results[l] = res
            if res is None:
                empty_levels.append(l)
                D.empty[C.id] = self._empty_reason(C, D, located)
                continue
            for P in res.killed:
                V = mixed_vertices(D, P, res.old_sectors[P])
                killed_at.setdefault(P, {})[l] = V
                D.empty[P] = self._killed_reason(D, P, C, V)
        for P, per in killed_at.items():
            for L, V in sorted(per.items()):
                up = L + 1
                if up in per or up >= len(self.levels):
                    continue
                Du = self.levels[up]
                if P in Du.clusters and Du.has_region(P):
                    self._link(P, up, C, V)
        for L in empty_levels:
            up = L + 1
            if up <= max_level and self.levels[up].has_region(C.id):
                self._link_search(C.id, up, [])
        return results

    def _insert_at(self, C: Cluster, l: int):
        D = self.levels[l]
        located = []

        def loc(x):
            r = self.locate(x, l)
            return r

        def dist_to(cid, x):
            return self.dist_to(D, cid, x)

        if not D.nonempty():
            rep = find_representative(C, lambda x: None, dist_to, self.far)
            return grow_region(rep.t, C, D), located
        rep = find_representative(C, loc, dist_to, self.far)
        located = rep.located
        if rep.kind == "vertex":
            owner = self.locate(rep.t, l)[0]
            return grow_region(rep.t, C, D, start_cluster=owner), located
        if rep.kind == "edge":
            got = self.parametric_interval(rep.candidate, C, l)
            if got is not None:
                _, _, t, owner = got
                return grow_region(t, C, D, start_cluster=owner), located
        D.clusters[C.id] = C
        return None, located

    # -------------------------------------------------------------- empty regions

    def _empty_reason(self, C: Cluster, D: LevelDiagram, located) -> tuple:
        near = [x for x in dict.fromkeys(located) if x in D.clusters and x != C.id]
        pool = near + [x for x in D.present() if x != C.id and x not in near]
        for x in pool:
            Q = D.clusters[x]
            if all(C.contains(p) for p in Q.hull):
                return ("ContainedCluster", x)
        found = self._find_killers(C, D, near)
        if found is not None and len(found) == 2:
            return ("KillingPair",) + tuple(sorted(found))
        if found is not None:
            return ("ContainedCluster", found[0])
        return ("Unknown",)

    def _killed_reason(self, D: LevelDiagram, P: int, C: Cluster, V) -> tuple:
        Pc = D.clusters[P]
        if all(Pc.contains(p) for p in C.hull):
            return ("ContainedCluster", C.id)
        for x in dict.fromkeys(v.cluster for v in V):
            if x in D.clusters and x != C.id and region_empty_among(Pc, [C, D.clusters[x]]):
                return ("KillingPair",) + tuple(sorted((x, C.id)))
        found = self._find_killers(Pc, D, [C.id] + [v.cluster for v in V])
        if found is not None and len(found) == 2:
            return ("KillingPair",) + tuple(sorted(found))
        if found is not None:
            return ("ContainedCluster", found[0])
        return ("Unknown",)

    def _find_killers(self, P: Cluster, D: LevelDiagram, hint) -> Optional[tuple]:
        """One cluster or a pair of level clusters whose presence alone empties P's region."""
        pool = [x for x in dict.fromkeys(hint) if x in D.clusters and x != P.id]
        for x in pool:
            if region_empty_among(P, [D.clusters[x]]):
                return (x,)
        for i, x in enumerate(pool):
            for y in pool[i + 1:]:
                if region_empty_among(P, [D.clusters[x], D.clusters[y]]):
                    return (x, y)
        return None

    # -------------------------------------------------------------- linking

    def _link(self, P: int, l: int, C: Cluster, V: list) -> CriticalLink:
        try:
            link = link_critical(self, P, l, C, V)
        except NoWitness:
            link = None
        lower = self.levels[l - 1]
        if link is not None and not region_empty_among(lower.clusters[P], [lower.clusters[x] for x in link.killers]):
            link = None
        if link is None:
            return self._link_search(P, l, [C.id] + [v.cluster for v in V])
        self.links[(P, l)] = link
        return link

    def _link_search(self, P: int, l: int, hint) -> Optional[CriticalLink]:
        lower = self.levels[l - 1]
        Pc = lower.clusters[P]
        hint = list(hint)
        for x in list(hint):
            if x in lower.clusters:
                for key in [(x, j) for j in lower.active_points(x)]:
                    hint.extend(s.far[0] for s in lower.sectors[key] if s.far is not None)
        found = self._find_killers(Pc, lower, hint)
        if found is None and len(lower.clusters) <= 64:
            found = self._find_killers(Pc, lower, lower.present())
        if found is None:
            self.unlinked.append((P, l))
            return None
        link = CriticalLink(P, l, found, found, "search")
        self.links[(P, l)] = link
        return link


def mixed_vertices(D: LevelDiagram, cid: int, sectors_by_idx: dict) -> list:
    """Mixed vertices of a region given by its sectors: where the skeleton chain meets the far boundary."""
    out = []
    C = D.clusters[cid]
    frames = frames_of(C)
    for i, secs in sectors_by_idx.items():
        if not secs or frames[i].near is None:
            continue
        fr = frames[i]
        p = fr.p
        runs = []
        for s in sorted(secs, key=lambda s: s.lo):
            if runs and abs(runs[-1][-1].hi - s.lo) < 1e-9:
                runs[-1].append(s)
            else:
                runs.append([s])
        for run in runs:
            for sec, phi in ((run[0], run[0].lo), (run[-1], run[-1].hi)):
                if sec.far is None:
                    continue
                g = fr.near.value(phi)
                if g <= G_TINY:
                    continue
                w = D.point(sec.far)
                j = fr.near.label(phi if phi < fr.end else phi - 1e-12)[1]
                x = Point(p[0] + math.cos(phi) / g, p[1] + math.sin(phi) / g)
                r = dist(x, p)
                if abs(dist(x, w) - r) > 1e-6 * max(1.0, r):
                    continue
                out.append(MixedVertex(x, p, C.hull[j], w, sec.far[0]))
    return out


def link_critical(hier: Hierarchy, P: int, l: int, C: Cluster, V: list) -> CriticalLink:
    """Link P, critical at level l after inserting C, to the clusters dominating it on level l-1."""
    up = hier.levels[l]
    Pc = up.clusters[P]
    current = mixed_vertices(up, P, {j: up.sectors.get((P, j), []) for j in range(len(Pc.hull))})
    c_up = C.id in up.clusters
    far_side = [v for v in current if farthest_distance(C, v.pos) >= dist(v.pos, v.p1)]
    if current and not far_side:
        return CriticalLink(P, l, (C.id,), (C.id,), "single")
    if not far_side:
        raise NoWitness(P)
    c = max(C.hull, key=lambda z: dist(z, far_side[0].pos))
    for u in V:
        sc, sq = orient(u.p1, u.p2, c), orient(u.p1, u.p2, u.q)
        if sc != Sign.ZERO and sq != Sign.ZERO and sc != sq and u.cluster != C.id:
            K = u.cluster
            targets = (K,) if c_up else (K, C.id)
            return CriticalLink(P, l, targets, (K, C.id), "pair")
    raise NoWitness(P)
