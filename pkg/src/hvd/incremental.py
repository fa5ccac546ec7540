"""Insertion of one cluster into a level diagram.

The first step searches the farthest-point skeleton of the new cluster for a point
closer to it than to every present cluster (``find_representative``).
The second grows the new region from that point (``grow_region``): faces of the
current diagram reached by the new region are found by flooding across their
shared boundaries, clipped, and the new cluster's own faces are assembled from
the clusters it displaced.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import polar
from .cluster import Cluster, farthest_distance, farthest_index
from .diagram import G_TINY, LevelDiagram, Sector, fvd_of, frames_of, split_wide
from .geom import Point, dist
from .polar import TWO_PI


class TracingStuck(RuntimeError):
    pass


@dataclass
class CandidateEdge:
    edge: int  # FvdEdge id of the new cluster's skeleton
    u: Point
    v: Point
    chord: tuple  # the two hull points bisected by the edge
    q_u: int
    q_v: int
    du_qu: float
    du_c: float
    du_qv: float
    dv_qv: float
    dv_c: float
    dv_qu: float


def is_candidate(e: CandidateEdge) -> bool:
    return (
        e.q_u != e.q_v
        and e.du_qu < e.du_c < e.du_qv
        and e.dv_qv < e.dv_c < e.dv_qu
    )


@dataclass
class SwitchEdgeSet:
    edges: list  # skeleton edge ids whose endpoints disagree on membership
    anchors: list  # boundary point on each edge (None when it could not be isolated)

    @property
    def kappa(self) -> int:
        return len(self.edges)


@dataclass
class Representative:
    kind: str  # "vertex" | "edge" | "empty"
    t: Optional[Point] = None
    candidate: Optional[CandidateEdge] = None
    located: list = field(default_factory=list)  # clusters met during the search
    visits: int = 0


@dataclass
class GrowResult:
    created: int
    deleted: int
    neighbours: list  # clusters whose regions lost area
    killed: list  # clusters whose regions vanished
    old_sectors: dict  # cid -> {hull idx: [Sector]} before the update, for killed clusters
    faces_visited: int
    switch: Optional[SwitchEdgeSet] = None


# ------------------------------------------------------------------ representative search


def skeleton_nodes(cluster: Cluster, far: float):
    """Positions and adjacency of the skeleton, unbounded ends cut at distance ``far``.

    Returns (pos, adj, root) where nodes are ("v", i) for skeleton vertices and
    ("inf", e) / ("inf-", e) for far points along unbounded edges.
    """
    tree = fvd_of(cluster)
    pos, adj = {}, {}
    for v in tree.vertices:
        pos[("v", v.id)] = v.pos
        adj[("v", v.id)] = []
    for e in tree.edges:
        if e.a is not None and e.b is not None:
            adj[("v", e.a)].append((("v", e.b), e.id))
            adj[("v", e.b)].append((("v", e.a), e.id))
            continue
        tip = ("inf", e.id)
        pos[tip] = Point(e.origin[0] + far * e.direction[0], e.origin[1] + far * e.direction[1])
        if e.a is None:
            other = ("inf-", e.id)
            pos[other] = Point(e.origin[0] - far * e.direction[0], e.origin[1] - far * e.direction[1])
        else:
            other = ("v", e.a)
        adj.setdefault(tip, []).append((other, e.id))
        adj.setdefault(other, []).append((tip, e.id))
    return pos, adj, ("inf", tree.root.edge)


def find_representative(C: Cluster, locate: Callable, dist_to: Callable, far: float) -> Representative:
    """Search the skeleton of C from its root for a point closer to C than to anything present.

    ``locate(x)`` returns (cluster id, farthest distance) of the nearest present
    cluster, or None when nothing is present; ``dist_to(cid, x)`` is the
    farthest distance from x to a present cluster.
    """
    hull = C.hull
    if len(hull) == 1:
        return Representative("vertex", hull[0])
    pos, adj, root = skeleton_nodes(C, far)
    tree = fvd_of(C)
    first = ("v", 0) if tree.vertices else root
    rep = Representative("empty")
    found = locate(pos[root])
    rep.visits += 1
    if found is None:
        rep.kind, rep.t = "vertex", pos[first] if tree.vertices else tree.edges[0].origin
        return rep
    q_root, d_root = found
    rep.located.append(q_root)

    def dfc(x):
        return farthest_distance(C, x)

    if dfc(pos[root]) < d_root:
        rep.kind, rep.t = "vertex", pos[root]
        return rep

    stack = [(root, None, q_root, d_root)]
    while stack:
        u, parent, q_u, d_u = stack.pop()
        kids = []
        for v, eid in adj[u]:
            if v == parent:
                continue
            q_v, d_v = locate(pos[v])
            rep.visits += 1
            rep.located.append(q_v)
            if dfc(pos[v]) < d_v:
                rep.kind, rep.t = "vertex", pos[v]
                return rep
            kids.append((v, eid, q_v, d_v))
        for v, eid, q_v, d_v in kids:
            if q_v == q_u:
                continue
            e = tree.edges[eid]
            cand = CandidateEdge(
                eid, pos[u], pos[v], (hull[e.chord[0]], hull[e.chord[1]]), q_u, q_v,
                d_u, dfc(pos[u]), dist_to(q_v, pos[u]),
                d_v, dfc(pos[v]), dist_to(q_u, pos[v]),
            )
            if is_candidate(cand):
                rep.kind, rep.candidate = "edge", cand
                return rep
        # a child closer to C than Q_u pins the region to its side, so its
        # siblings are pruned; otherwise every child stays admissible and the
        # one with the larger margin is explored first
        scored = sorted(
            ((dist_to(q_u, pos[v]) - dfc(pos[v]), v, q_v, d_v) for v, eid, q_v, d_v in kids),
            key=lambda a: a[0],
        )
        if scored and scored[-1][0] > 0:
            scored = scored[-1:]
        for margin, v, q_v, d_v in scored:
            stack.append((v, u, q_v, d_v))
    return rep


# ------------------------------------------------------------------ region growth


def _touch_point(p, f, phi):
    g = f.value(phi)
    if g <= G_TINY:
        return None
    return (p[0] + math.cos(phi) / g, p[1] + math.sin(phi) / g)


def _mapped_range(p2, x1, phi1, x2, phi2):
    """Angular range, seen from p2, of a straight boundary piece traversed from x1 to x2.

    The piece separates p2 from the viewer that produced it, so the
    orientation flips.  Points at infinity are seen in their own direction.
    """
    a1 = phi1 if x1 is None else math.atan2(x1[1] - p2[1], x1[0] - p2[0])
    a2 = phi2 if x2 is None else math.atan2(x2[1] - p2[1], x2[0] - p2[0])
    width = (a1 - a2) % TWO_PI
    if width > math.pi + 1e-6:
        width = 0.0
    return a2, width


class _Flood:
    def __init__(self, D: LevelDiagram, C: Cluster):
        self.D = D
        self.C = C
        self.labels = [(C.id, j) for j in range(len(C.hull))]
        self.beta_cache = {}
        self.seen = set()
        self.queue = deque()
        self.affected = {}
        self.visited = 0

    def beta(self, key):
        b = self.beta_cache.get(key)
        if b is None:
            fr = self.D.frame(key)
            b = polar.clamp0(polar.min_of_points(self.C.hull, self.labels, fr.p, fr.base, fr.end))
            self.beta_cache[key] = b
        return b

    def push(self, key, sec):
        if sec.fid not in self.seen:
            self.seen.add(sec.fid)
            self.queue.append((key, sec))

    def push_range(self, key, start, width, tol=1e-9):
        secs = self.D.sectors.get(key)
        if not secs:
            return
        fr = self.D.frame(key)
        a = fr.norm(start)
        for sec in secs:
            for shift in (0.0, -TWO_PI, TWO_PI):
                if sec.lo - tol <= a + width + shift and a + shift <= sec.hi + tol:
                    self.push(key, sec)
                    break

    def push_adjacent(self, key, sec, before: bool):
        secs = self.D.sectors[key]
        i = secs.index(sec)
        fr = self.D.frame(key)
        full = fr.width >= TWO_PI - 1e-9
        if before:
            j = i - 1 if i > 0 else (len(secs) - 1 if full else None)
            gap = None if j is None else sec.lo - secs[j].hi
        else:
            j = i + 1 if i + 1 < len(secs) else (0 if full else None)
            gap = None if j is None else secs[j].lo - sec.hi
        if gap is not None and min(abs(gap), abs(abs(gap) - TWO_PI)) < 1e-9:
            self.push(key, secs[j])

    def run(self, rtol=1e-12):
        D = self.D
        while self.queue:
            key, sec = self.queue.popleft()
            self.visited += 1
            fr = D.frame(key)
            lo, hi = sec.lo, sec.hi
            gb = D.far_fn(key, sec)
            B = self.beta(key).slice(lo, hi)
            cover = polar.intersect(
                polar.where_greater(B, gb, lo, hi, rtol),
                polar.where_greater(fr.near, gb, lo, hi, rtol),
            )
            if not cover:
                continue
            newfar = polar.combine(gb, B, upper=True)
            self.affected[sec.fid] = (key, sec, newfar)
            if cover[0][0] - lo <= 1e-9:
                self.push_adjacent(key, sec, before=True)
            if hi - cover[-1][1] <= 1e-9:
                self.push_adjacent(key, sec, before=False)
            p = fr.p
            if fr.near is not None:
                touch = polar.intersect(cover, polar.where_greater(B, fr.near, lo, hi, rtol))
                for s, e in touch:
                    for s2, e2, lab in polar.runs(fr.near, s, e):
                        nb = (key[0], lab[1])
                        start, width = _mapped_range(
                            D.point(nb), _touch_point(p, fr.near, s2), s2, _touch_point(p, fr.near, e2), e2
                        )
                        self.push_range(nb, start, width)
            if sec.far is not None:
                for s, e in cover:
                    for s2, e2, lab in polar.runs(gb, s, e):
                        if lab is None:
                            continue
                        start, width = _mapped_range(
                            D.point(sec.far), _touch_point(p, gb, s2), s2, _touch_point(p, gb, e2), e2
                        )
                        self.push_range(sec.far, start, width)


def _sectors_from(D: LevelDiagram, near, far, lo, hi) -> list:
    out = []
    for s, e in polar.where_greater(near, far, lo, hi):
        for a, b, lab in polar.runs(far, s, e):
            for x, y in split_wide(a, b):
                out.append(Sector(x, y, lab, D.new_fid()))
    return out


def grow_region(t, C: Cluster, D: LevelDiagram, start_cluster: Optional[int] = None,
                trace: bool = False) -> GrowResult:
    """Insert the region of C into D, growing it from t (a point closer to C than to all present clusters)."""
    D.clusters[C.id] = C
    D.empty.pop(C.id, None)
    flood = _Flood(D, C)
    if D.sectors:
        seeds = []
        if start_cluster is not None and D.has_region(start_cluster):
            seeds.append(start_cluster)
        else:
            seeds = [cid for cid in D.nonempty() if cid != C.id]
        for cid in seeds:
            Q = D.clusters[cid]
            key = (cid, farthest_index(Q, t))
            if key not in D.sectors:
                continue
            fr = D.frame(key)
            i = D.sector_index(key, fr.angle(t))
            sec = D.sectors[key][i] if i is not None else D.nearest_sector(key, fr.angle(t))
            flood.push(key, sec)
            for s in D.sectors[key]:
                if s is not sec and (abs(s.hi - sec.lo) < 1e-9 or abs(s.lo - sec.hi) < 1e-9):
                    flood.push(key, s)
        flood.run()
        if not flood.affected and start_cluster is not None:
            for key, sec in list(D.faces()):
                if key[0] != C.id:
                    flood.push(key, sec)
            flood.run()

    created = deleted = 0
    by_key = {}
    for key, sec, newfar in flood.affected.values():
        by_key.setdefault(key, []).append((sec, newfar))
    touched = sorted({key[0] for key in by_key})
    old = {cid: {i: list(D.sectors.get((cid, i), [])) for i in range(len(D.clusters[cid].hull))} for cid in touched}
    for key in sorted(by_key):
        fr = D.frame(key)
        gone = {sec.fid for sec, _ in by_key[key]}
        keep = [s for s in D.sectors[key] if s.fid not in gone]
        for sec, newfar in by_key[key]:
            deleted += D.feature_count(key, sec)
            for ns in _sectors_from(D, fr.near, newfar, sec.lo, sec.hi):
                keep.append(ns)
                created += D.feature_count(key, ns)
        D.set_sectors(key, keep)

    others = [D.clusters[cid] for cid in touched]
    for j, fr in enumerate(frames_of(C)):
        lo, hi = fr.base, fr.end
        if others:
            fs = [
                polar.clamp0(polar.min_of_points(Q.hull, [(Q.id, m) for m in range(len(Q.hull))], fr.p, lo, hi))
                for Q in others
            ]
            far = polar.envelope(fs, upper=True)
        else:
            far = polar.zero(lo, hi)
        secs = _sectors_from(D, fr.near, far, lo, hi)
        D.set_sectors((C.id, j), secs)
        created += sum(D.feature_count((C.id, j), s) for s in secs)

    killed = [cid for cid in touched if not D.has_region(cid)]
    D.stats.record(C.id, created, deleted)
    res = GrowResult(created, deleted, touched, killed, {cid: old[cid] for cid in killed}, flood.visited)
    if trace:
        res.switch = switch_edges(D, C)
    return res


def in_region(D: LevelDiagram, cid: int, x) -> bool:
    """Whether the diagram's point location puts x in the region of cid."""
    return D.has_region(cid) and D.nearest_cluster(x)[0] == cid


def switch_edges(D: LevelDiagram, C: Cluster, far: Optional[float] = None) -> SwitchEdgeSet:
    """Skeleton edges of C whose endpoints disagree on membership in C's region, with boundary anchors."""
    if len(C.hull) == 1:
        return SwitchEdgeSet([], [])
    if far is None:
        pts = [p for cid in D.clusters for p in D.clusters[cid].hull]
        xs, ys = [p[0] for p in pts], [p[1] for p in pts]
        far = 1e3 * (max(xs) - min(xs) + max(ys) - min(ys) + 1.0)
    pos, adj, _ = skeleton_nodes(C, far)
    inside = {node: in_region(D, C.id, x) for node, x in pos.items()}
    tree = fvd_of(C)
    edges, anchors = [], []
    for e in tree.edges:
        ends = [n for n in pos if n[1] == e.id and n[0] != "v"]
        a = ("v", e.a) if e.a is not None else ends[-1]
        b = ("v", e.b) if e.b is not None else ("inf", e.id)
        if inside[a] == inside[b]:
            continue
        edges.append(e.id)
        lo, hi = (pos[a], pos[b]) if inside[a] else (pos[b], pos[a])
        for _ in range(60):
            mid = ((lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2)
            if in_region(D, C.id, mid):
                lo = mid
            else:
                hi = mid
        anchors.append(Point(*lo))
    return SwitchEdgeSet(edges, anchors)


# ------------------------------------------------------------------ driver


def bounding_scale(family) -> float:
    """Finite distance used in place of points at infinity on skeletons."""
    pts = [p for c in family.clusters for p in c.hull]
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    diam = math.hypot(max(xs) - min(xs), max(ys) - min(ys))
    return 1e4 * (diam + 1.0)


def construct(family, seed: int = 0, beta: float = 0.25, on_insert: Optional[Callable] = None):
    """Insert the clusters of ``family`` in a seeded random order.

    ``on_insert(hierarchy, cluster)`` is called after every insertion.
    Returns (hierarchy, level-0 diagram, level-0 update stats).
    """
    from .hierarchy import Hierarchy, assign_levels

    hier = Hierarchy(beta=beta, seed=seed, far=bounding_scale(family))
    order = hier.rng.permutation(len(family.clusters))
    levels = assign_levels(len(order), beta, hier.rng)
    hier.order = [family.clusters[i].id for i in order]
    for i, lvl in zip(order, levels):
        hier.insert_cluster(family.clusters[i], lvl)
        if on_insert is not None:
            on_insert(hier, family.clusters[i])
    D = hier.levels[0]
    return hier, D, D.stats
