"""Centroid decomposition of a farthest-point Voronoi tree.

Every internal node stores one skeleton vertex w together with the three rays
leaving w in the directions w - p_i, one per defining hull point.  The ray for
p_i stays inside the farthest region of p_i, so the farthest distance along it
is known in constant time.  Removing w splits the tree into three components,
each lying in one of the sectors between consecutive rays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

from . import geom
from .cluster import Cluster, farthest_distance
from .fvd import FvdTree
from .geom import Point, Sign, compare_dist, dist, orient


class PreconditionViolated(ValueError):
    pass


@dataclass
class SdLeaf:
    edge: int  # FvdEdge id, or -1 for a single-point cluster
    chord: tuple


@dataclass
class SdNode:
    vertex: int
    pos: Point
    owners: tuple  # hull indices, ccw
    dirs: tuple  # unit ray directions, ccw, one per owner
    children: list = field(default_factory=list)  # child i covers the sector from ray i to ray i+1


SdItem = Union[SdNode, SdLeaf]


@dataclass
class SdTree:
    cluster_id: int
    hull: tuple
    root: SdItem
    depth: int
    comparisons: int  # vertex visits spent while building


def _components(adj: dict, vertices: set, removed: int) -> list:
    comps, seen = [], {removed}
    for s in adj[removed]:
        if s in seen or s not in vertices:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if w not in seen and w in vertices:
                    seen.add(w)
                    stack.append(w)
        comps.append(comp)
    return comps


def centroid(adj: dict, vertices, counter: Optional[list] = None) -> int:
    """Vertex whose removal leaves components of at most half the size."""
    vertices = set(vertices)
    start = min(vertices)
    order, parent = [start], {start: None}
    for v in order:
        for w in adj[v]:
            if w in vertices and w not in parent:
                parent[w] = v
                order.append(w)
    if counter is not None:
        counter[0] += len(order)
    size = {}
    for v in reversed(order):
        size[v] = 1 + sum(size[w] for w in adj[v] if w in vertices and parent.get(w) == v)
    total = len(order)
    for v in order:
        biggest = total - size[v]
        for w in adj[v]:
            if w in vertices and parent.get(w) == v:
                biggest = max(biggest, size[w])
        if 2 * biggest <= total:
            return v
    raise AssertionError("tree has no centroid")


def _in_sector(w, da, db, q) -> bool:
    """q lies in the ccw sector from ray (w, da) inclusive to ray (w, db) exclusive."""
    a = (w[0] + da[0], w[1] + da[1])
    b = (w[0] + db[0], w[1] + db[1])
    sa, sb = orient(w, a, q), orient(w, b, q)
    if orient(w, a, b) == Sign.POSITIVE:  # sector narrower than a half-plane
        if sa == Sign.ZERO:
            return da[0] * (q[0] - w[0]) + da[1] * (q[1] - w[1]) >= 0
        return sa == Sign.POSITIVE and sb == Sign.NEGATIVE
    if sb == Sign.ZERO and db[0] * (q[0] - w[0]) + db[1] * (q[1] - w[1]) > 0:
        return False
    return sa != Sign.NEGATIVE or sb != Sign.POSITIVE


def _sector_of(node: SdNode, q) -> int:
    for i in range(3):
        if _in_sector(node.pos, node.dirs[i], node.dirs[(i + 1) % 3], q):
            return i
    return 0  # q coincides with the vertex


def _owner_sector(owners, chord) -> Optional[int]:
    # the bisector of owners i, i+1 leaves the vertex between their away-directions;
    # this stays correct when a very short edge makes its direction unreliable
    pair = set(chord)
    for i in range(3):
        if {owners[i], owners[(i + 1) % 3]} == pair:
            return i
    return None


def build_sd(fvd: FvdTree) -> SdTree:
    hull = fvd.hull
    if fvd.size == 1:
        return SdTree(fvd.cluster_id, hull, SdLeaf(-1, (0, 0)), 0, 0)
    if not fvd.vertices:
        return SdTree(fvd.cluster_id, hull, SdLeaf(0, fvd.edges[0].chord), 0, 0)
    adj = fvd.adjacency()
    counter = [0]

    def edge_dir(e, v):
        if e.b is None:
            return e.direction
        other = fvd.vertices[e.other(v)].pos
        return other[0] - fvd.vertices[v].pos[0], other[1] - fvd.vertices[v].pos[1]

    def build(vertices: set, dangling: list):
        # ``dangling`` holds edges of this component whose far endpoint was already used
        if not vertices:
            assert len(dangling) == 1
            e = fvd.edges[dangling[0]]
            return SdLeaf(e.id, e.chord), 1
        w = centroid(adj, vertices, counter)
        vx = fvd.vertices[w]
        pos = vx.pos
        dirs = []
        for i in vx.owners:
            d = (pos[0] - hull[i][0], pos[1] - hull[i][1])
            n = math.hypot(*d)
            dirs.append((d[0] / n, d[1] / n))
        node = SdNode(w, pos, vx.owners, tuple(dirs), [None, None, None])
        comps = _components(adj, vertices, w)
        comp_of = {}
        for ci, comp in enumerate(comps):
            for v in comp:
                comp_of[v] = ci
        groups = {0: [], 1: [], 2: []}
        sector_comp, comp_edges = {}, {ci: [] for ci in range(len(comps))}
        for eid in vx.edges:
            e = fvd.edges[eid]
            s = _owner_sector(vx.owners, e.chord)
            if s is None:
                d = edge_dir(e, w)
                s = _sector_of(node, (pos[0] + d[0], pos[1] + d[1]))
            other = e.other(w)
            if other is not None and other in vertices:
                sector_comp[s] = comp_of[other]
                comp_edges[comp_of[other]].append(eid)
            else:
                groups[s].append(eid)
        for eid in dangling:
            e = fvd.edges[eid]
            if w in (e.a, e.b):
                continue
            end = e.a if e.a in vertices else e.b
            comp_edges[comp_of[end]].append(eid)
        depth = 0
        for s in range(3):
            if s in sector_comp:
                ci = sector_comp[s]
                child, d = build(set(comps[ci]), comp_edges[ci])
            else:
                child, d = build(set(), groups[s])
            node.children[s] = child
            depth = max(depth, d)
        return node, depth + 1

    root, depth = build(set(adj), [])
    return SdTree(fvd.cluster_id, hull, root, depth, counter[0])


def _leaf_answer(hull, leaf: SdLeaf, q) -> int:
    a, b = leaf.chord
    s = compare_dist(q, hull[a], hull[b])
    if s == Sign.ZERO:
        return min(a, b)
    return a if s == Sign.POSITIVE else b


def locate_index(sd: SdTree, q) -> int:
    """Hull index of the farthest point of the cluster from q."""
    item = sd.root
    while isinstance(item, SdNode):
        item = item.children[_sector_of(item, q)]
    if item.edge < 0:
        return 0
    return _leaf_answer(sd.hull, item, q)


def locate(sd: SdTree, q) -> Point:
    return sd.hull[locate_index(sd, q)]


def visit_count(sd: SdTree, q) -> int:
    item, n = sd.root, 1
    while isinstance(item, SdNode):
        item = item.children[_sector_of(item, q)]
        n += 1
    return n


def _ray_hit(w, d, u, v):
    """Parameter along u->v where the segment crosses the ray (w, d), or None."""
    ex, ey = v[0] - u[0], v[1] - u[1]
    den = ex * d[1] - ey * d[0]
    if den == 0.0:
        return None
    rx, ry = w[0] - u[0], w[1] - u[1]
    t = (rx * d[1] - ry * d[0]) / den
    s = (rx * ey - ry * ex) / den
    if s < 0 or t <= 0 or t >= 1:
        return None
    return t


def segment_query(sd: SdTree, u, v, c_cluster: Cluster, chord: Optional[tuple] = None) -> Point:
    """Point x on uv with d_f(x, C) = d_f(x, P), P being the cluster of ``sd``.

    Requires d_f(u, C) < d_f(u, P) and d_f(v, C) > d_f(v, P).  ``chord`` may
    name the two points of C bisected by the skeleton edge carrying uv, which
    makes d_f(., C) a single distance evaluation.
    """
    hull = sd.hull

    def dfc(x):
        return dist(x, chord[0]) if chord is not None else farthest_distance(c_cluster, x)

    def dfp(x):
        return dist(x, hull[locate_index(sd, x)])

    gu, gv = dfc(u) - dfp(u), dfc(v) - dfp(v)
    if not (gu < 0 < gv):
        raise PreconditionViolated(f"distance signs at segment ends are {gu:.3g}, {gv:.3g}")
    scale = max(1.0, dist(u, v), abs(dfc(u)))
    tol = geom.EPS * scale
    lo, hi = 0.0, 1.0
    item = sd.root
    while isinstance(item, SdNode):
        a, b = geom.lerp(u, v, lo), geom.lerp(u, v, hi)
        cuts = []
        for i, d in zip(item.owners, item.dirs):
            t = _ray_hit(item.pos, d, a, b)
            if t is not None:
                x = geom.lerp(a, b, t)
                cuts.append((lo + t * (hi - lo), dfc(x) - dist(x, hull[i]), x))
        cuts.sort()
        for t, g, x in cuts:
            if abs(g) <= tol:
                return x
            if g > 0:
                hi = t
                break
            lo = t
        if hi - lo <= 0.0:
            return geom.lerp(u, v, lo)
        mid = geom.lerp(u, v, (lo + hi) / 2)
        item = item.children[_sector_of(item, mid)]
    if item.edge < 0:
        owners = [0]
    else:
        owners = list(item.chord)
        p1, p2 = hull[owners[0]], hull[owners[1]]
        t = geom.bisector_line_intersection(p1, p2, u, v)
        if t is not None and lo < t < hi:
            x = geom.lerp(u, v, t)
            g = dfc(x) - dist(x, p1)
            if abs(g) <= tol:
                return x
            if g > 0:
                hi = t
            else:
                lo = t
        mid = geom.lerp(u, v, (lo + hi) / 2)
        owners = [_leaf_answer(hull, item, mid)]
    p = hull[owners[0]]
    if chord is not None:
        c = chord[0]
    else:
        mid = geom.lerp(u, v, (lo + hi) / 2)
        c = max(c_cluster.hull, key=lambda z: dist(z, mid))
    t = geom.bisector_line_intersection(c, p, u, v)
    if t is None:
        raise PreconditionViolated("segment is parallel to the bisector")
    x = geom.lerp(u, v, t)
    if not (-1e-12 <= t <= 1 + 1e-12) or abs(dfc(x) - dfp(x)) > tol:
        raise PreconditionViolated("no consistent equidistant point on the segment")
    return x
