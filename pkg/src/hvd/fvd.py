"""Farthest-point Voronoi diagram of a single cluster.

The skeleton is built from the farthest-point Delaunay triangulation of the
hull, obtained by repeatedly clipping an ear whose circumcircle encloses
every remaining hull point (O(h^2) incircle tests).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from . import geom
from .cluster import Cluster, Degenerate
from .geom import Point, Sign, circumcenter, dist, incircle, orient

TWO_PI = 2.0 * math.pi


class OffEdge(ValueError):
    pass


@dataclass
class FvdVertex:
    id: int
    pos: Point
    owners: tuple  # three hull indices, ccw
    edges: list = field(default_factory=list)


@dataclass
class FvdEdge:
    id: int
    chord: tuple  # (i, j) hull indices, i < j
    a: Optional[int]  # vertex id, None when the edge has no finite endpoint
    b: Optional[int]  # vertex id, None for an unbounded end
    origin: Point  # position of ``a`` (midpoint of the chord for a full line)
    direction: Optional[tuple] = None  # unit vector toward infinity at the ``b`` end

    @property
    def bounded(self) -> bool:
        return self.b is not None

    def other(self, v: int) -> Optional[int]:
        return self.b if v == self.a else self.a


class RootRef(NamedTuple):
    edge: int
    root_pair: tuple  # hull indices
    direction: tuple


@dataclass
class PointCone:
    """Directions (seen from a hull point p) along which a ray meets freg(p).

    ``base`` starts the cone and ``width`` is its angular size; ``chain`` lists
    (start angle, hull index) pieces of the skeleton bounding freg(p): along
    direction phi the ray enters freg(p) on the bisector of p and that point.
    """
    base: float
    width: float
    chain: list

    def norm(self, theta: float) -> float:
        return self.base + (theta - self.base) % TWO_PI

    def neighbor_at(self, phi: float) -> Optional[int]:
        if not self.chain:
            return None
        lo, hi = 0, len(self.chain) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.chain[mid][0] <= phi:
                lo = mid
            else:
                hi = mid - 1
        return self.chain[lo][1]


@dataclass
class FvdTree:
    cluster_id: int
    hull: tuple
    vertices: list
    edges: list
    regions: dict  # hull index -> edge ids bounding its farthest region
    root: Optional[RootRef]
    cones: list  # PointCone per hull index

    @property
    def size(self) -> int:
        return len(self.hull)

    def edge_points(self, e: FvdEdge, far: float = 1.0):
        """Two points spanning an edge (the unbounded end pushed ``far`` along its direction)."""
        if e.b is not None:
            return self.vertices[e.a].pos, self.vertices[e.b].pos
        end = Point(e.origin[0] + far * e.direction[0], e.origin[1] + far * e.direction[1])
        if e.a is None:
            start = Point(e.origin[0] - far * e.direction[0], e.origin[1] - far * e.direction[1])
            return start, end
        return e.origin, end

    def adjacency(self) -> dict:
        adj = {v.id: [] for v in self.vertices}
        for e in self.edges:
            if e.a is not None and e.b is not None:
                adj[e.a].append(e.b)
                adj[e.b].append(e.a)
        return adj


def _farthest_delaunay(hull) -> list:
    h = len(hull)
    nxt = {i: (i + 1) % h for i in range(h)}
    prv = {i: (i - 1) % h for i in range(h)}
    alive = set(range(h))

    def ear_ok(i):
        a, c = prv[i], nxt[i]
        return all(
            incircle(hull[a], hull[i], hull[c], hull[x]) != Sign.NEGATIVE
            for x in alive
            if x not in (a, i, c)
        )

    ok = {i: ear_ok(i) for i in alive}
    triangles = []
    stack = [i for i in range(h) if ok[i]]
    while len(alive) > 3:
        while stack and (stack[-1] not in alive or not ok[stack[-1]]):
            stack.pop()
        if not stack:
            raise Degenerate("no farthest-Delaunay ear (cocircular hull points?)")
        i = stack.pop()
        a, c = prv[i], nxt[i]
        triangles.append((a, i, c))
        alive.discard(i)
        nxt[a], prv[c] = c, a
        for j in (a, c):
            ok[j] = ear_ok(j)
            if ok[j]:
                stack.append(j)
    i = min(alive)
    triangles.append((prv[i], i, nxt[i]))
    return triangles


def _inward_normal(a, b) -> tuple:
    dx, dy = b[0] - a[0], b[1] - a[1]
    n = math.hypot(dx, dy)
    return -dy / n, dx / n


def build_fvd(cluster: Cluster) -> FvdTree:
    hull = tuple(cluster.hull)
    h = len(hull)
    if h == 1:
        cones = [PointCone(-math.pi, TWO_PI, [])]
        return FvdTree(cluster.id, hull, [], [], {0: []}, None, cones)
    if h == 2:
        c1, c2 = sorted(range(2), key=lambda i: hull[i])
        d = (hull[c2][0] - hull[c1][0], hull[c2][1] - hull[c1][1])
        n = math.hypot(*d)
        direction = (-d[1] / n, d[0] / n)
        mid = Point((hull[0][0] + hull[1][0]) / 2, (hull[0][1] + hull[1][1]) / 2)
        edge = FvdEdge(0, (0, 1), None, None, mid, direction)
        tree = FvdTree(cluster.id, hull, [], [edge], {0: [0], 1: [0]}, RootRef(0, (0, 1), direction), [])
        tree.cones = _cones(tree)
        return tree

    triangles = _farthest_delaunay(hull)
    vertices = [FvdVertex(t, circumcenter(*(hull[i] for i in tri)), tri) for t, tri in enumerate(triangles)]
    by_pair = {}
    for t, tri in enumerate(triangles):
        for k in range(3):
            i, j = sorted((tri[k], tri[(k + 1) % 3]))
            by_pair.setdefault((i, j), []).append(t)
    edges = []
    for pair in sorted(by_pair):
        ts = by_pair[pair]
        eid = len(edges)
        if len(ts) == 2:
            e = FvdEdge(eid, pair, ts[0], ts[1], vertices[ts[0]].pos)
            vertices[ts[0]].edges.append(eid)
            vertices[ts[1]].edges.append(eid)
        else:
            i, j = pair
            a, b = (hull[i], hull[j]) if (i + 1) % h == j else (hull[j], hull[i])
            e = FvdEdge(eid, pair, ts[0], None, vertices[ts[0]].pos, _inward_normal(a, b))
            vertices[ts[0]].edges.append(eid)
        edges.append(e)
    regions = {i: [] for i in range(h)}
    for e in edges:
        for i in e.chord:
            regions[i].append(e.id)
    tree = FvdTree(cluster.id, hull, vertices, edges, regions, None, [])
    tree.root = choose_root(tree)
    tree.cones = _cones(tree)
    return tree


def choose_root(tree: FvdTree) -> RootRef:
    if tree.size == 1:
        raise Degenerate("single-point cluster has no root")
    hull = tree.hull

    def key(e):
        a, b = sorted((hull[e.chord[0]], hull[e.chord[1]]))
        return a, b

    e = min((e for e in tree.edges if not e.bounded), key=key)
    return RootRef(e.id, e.chord, e.direction)


def _cones(tree: FvdTree) -> list:
    """Angular description of every farthest region as seen from its owner."""
    hull = tree.hull
    h = len(hull)
    fan = {i: set() for i in range(h)}
    for v in tree.vertices:
        for i in v.owners:
            fan[i].update(j for j in v.owners if j != i)
    if h == 2:
        fan = {0: {1}, 1: {0}}
    cones = []
    for i in range(h):
        p = hull[i]
        nx, pv = hull[(i + 1) % h], hull[(i - 1) % h]
        start = math.atan2(pv[1] - p[1], pv[0] - p[0]) - math.pi / 2
        end = math.atan2(nx[1] - p[1], nx[0] - p[0]) + math.pi / 2
        base = (start + math.pi) % TWO_PI - math.pi
        width = (end - start) % TWO_PI
        cone = PointCone(base, width, [])
        if h == 2:
            cone.chain = [(base, 1 - i)]
            cones.append(cone)
            continue
        # fan neighbours ordered ccw around p, from the next hull point to the previous one
        nbrs = sorted(fan[i], key=lambda j: (math.atan2(hull[j][1] - p[1], hull[j][0] - p[0]) - math.atan2(nx[1] - p[1], nx[0] - p[0])) % TWO_PI)
        chain = [(base, nbrs[-1])]
        for j in range(len(nbrs) - 2, -1, -1):
            v = circumcenter(p, hull[nbrs[j]], hull[nbrs[j + 1]])
            chain.append((cone.norm(math.atan2(v[1] - p[1], v[0] - p[0])), nbrs[j]))
        cone.chain = chain
        cones.append(cone)
    return cones


class CCircle(NamedTuple):
    center: Point
    radius: float
    chord: tuple  # the two hull points
    forward_side: int  # orientation sign (w.r.t. the chord) of the forward part

    def side(self, x) -> int:
        return int(orient(self.chord[0], self.chord[1], x))

    def in_disk(self, x, rel: float = 1e-12) -> bool:
        return dist(self.center, x) <= self.radius * (1 + rel) + rel

    def in_forward(self, x) -> bool:
        return self.in_disk(x) and self.side(x) != -self.forward_side

    def in_rear(self, x) -> bool:
        return self.in_disk(x) and self.side(x) != self.forward_side


def on_edge(tree: FvdTree, edge: FvdEdge, y, tol: Optional[float] = None) -> bool:
    hull = tree.hull
    c1, c2 = hull[edge.chord[0]], hull[edge.chord[1]]
    scale = max(1.0, dist(c1, c2))
    tol = geom.EPS * scale if tol is None else tol
    r = dist(y, c1)
    if abs(r - dist(y, c2)) > tol * max(1.0, r):
        return False
    return all(dist(y, p) <= r + tol * max(1.0, r) for p in hull)


def c_circle(tree: FvdTree, edge_id: int, y) -> CCircle:
    edge = tree.edges[edge_id]
    if not on_edge(tree, edge, y):
        raise OffEdge(f"{y} is not on edge {edge_id}")
    hull = tree.hull
    c1, c2 = hull[edge.chord[0]], hull[edge.chord[1]]
    root = tree.root
    if edge_id == root.edge:
        away = (c1[0] + root.direction[0], c1[1] + root.direction[1])
        forward = -int(orient(c1, c2, away))
    else:
        r = next(hull[i] for i in root.root_pair if i not in edge.chord)
        forward = int(orient(c1, c2, r))
    return CCircle(Point(*y), dist(y, c1), (c1, c2), forward)


class Limiting(enum.Enum):
    FORWARD = "forward"
    REAR = "rear"
    NEITHER = "neither"


class LimitingResult(NamedTuple):
    kind: Limiting
    contained: bool


def classify_limiting(circle: CCircle, other: Cluster, container: Cluster) -> LimitingResult:
    pts = other.hull
    contained = all(container.contains(p) for p in pts)
    if all(circle.in_forward(p) or container.contains(p) for p in pts):
        return LimitingResult(Limiting.FORWARD, contained)
    if all(circle.in_rear(p) or container.contains(p) for p in pts):
        return LimitingResult(Limiting.REAR, contained)
    return LimitingResult(Limiting.NEITHER, contained)
