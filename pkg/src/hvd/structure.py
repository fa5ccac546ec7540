"""Explicit planar snapshot of a level diagram and its consistency checks.

The snapshot lists every face as a cyclic sequence of vertices (None stands
for the single vertex at infinity) joined by typed edges.  Vertices coming
from neighbouring faces are merged by position, and edges are cut at every
vertex lying on their supporting line, so the result is a planar graph on
which the Euler relation can be checked.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cluster import farthest_distance
from . import polar
from .diagram import G_TINY, LevelDiagram
from .polar import TWO_PI
from .geom import Point, dist

INF = None


class VertexKind(str, enum.Enum):
    PURE = "Pure"
    MIXED = "Mixed"
    CMIXED = "CMixed"
    SKELETON = "Skeleton"
    VISIBILITY = "Visibility"


class EdgeKind(str, enum.Enum):
    HAUSDORFF = "HausdorffBoundary"
    FARTHEST = "FarthestBoundary"
    VISIBILITY = "VisibilitySegment"


_RANK = {VertexKind.VISIBILITY: 0, VertexKind.SKELETON: 1, VertexKind.CMIXED: 2, VertexKind.MIXED: 2, VertexKind.PURE: 3}


@dataclass
class SVertex:
    id: int
    pos: Point
    kind: VertexKind
    witnesses: set  # {(cluster id, hull index)}
    lines: set = field(default_factory=set)  # supporting-line keys through the vertex


@dataclass
class SEdge:
    a: Optional[int]  # vertex id, None at infinity
    b: Optional[int]
    kind: EdgeKind
    line: tuple  # supporting-line key
    owners: tuple  # ((cid, idx), (cid, idx)) on the two sides, when known
    direction: Optional[tuple] = None  # toward infinity, for unbounded edges


@dataclass
class SFace:
    owner: tuple  # (cluster id, hull index)
    fid: int
    boundary: list  # [(vertex id or None, SEdge or None)] cyclic, edge leads to the next vertex
    t_chain: list  # vertex ids along the skeleton part, ccw


@dataclass
class Snapshot:
    vertices: list
    edges: list  # unique pieces after subdivision
    faces: list
    points: dict  # (cid, idx) -> Point
    empty: dict
    scale: float
    diagram: Optional[LevelDiagram] = None


class _Snapper:
    """Merges vertices closer than a tolerance that grows with distance from the data.

    A vertex at distance R comes from an inverse distance near 1/R, so its
    rounding error grows like R**2.
    """

    def __init__(self, scale: float, centre, far: float):
        self.scale = scale
        self.centre = centre
        self.far = far
        self.cells = {}
        self.vertices = []

    def tol(self, pos) -> float:
        r = math.hypot(pos[0] - self.centre[0], pos[1] - self.centre[1])
        return 1e-7 * self.scale + 1e-9 * r * r / self.scale

    def _cell(self, pos, level):
        size = 2.0 ** level
        return level, int(math.floor(pos[0] / size)), int(math.floor(pos[1] / size))

    def add(self, pos, kind, witnesses, lines) -> Optional[int]:
        if pos is None or not (math.isfinite(pos[0]) and math.isfinite(pos[1])):
            return None
        if math.hypot(pos[0] - self.centre[0], pos[1] - self.centre[1]) > self.far:
            return None
        tol = self.tol(pos)
        level = math.ceil(math.log2(tol))
        for lv in (level - 1, level, level + 1):
            _, cx, cy = self._cell(pos, lv)
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    for vid in self.cells.get((lv, cx + dx, cy + dy), ()):
                        v = self.vertices[vid]
                        if dist(v.pos, pos) <= max(tol, self.tol(v.pos)):
                            v.witnesses |= witnesses
                            v.lines |= lines
                            if _RANK[kind] > _RANK[v.kind]:
                                v.kind = kind
                            return vid
        vid = len(self.vertices)
        self.vertices.append(SVertex(vid, Point(*pos), kind, set(witnesses), set(lines)))
        self.cells.setdefault(self._cell(pos, level), []).append(vid)
        return vid


def _pair(a, b) -> tuple:
    return ("bis",) + tuple(sorted((a, b)))


def _ray(key, phi) -> tuple:
    return ("ray", key, round(phi % TWO_PI, 9) % round(TWO_PI, 9))


@dataclass
class _Corner:
    pos: Optional[tuple]
    kind: VertexKind
    witnesses: set
    lines: set


@dataclass
class _FaceEdge:
    kind: EdgeKind
    line: tuple
    owners: tuple
    origin: tuple  # a point of the supporting line
    direction: tuple  # unit traversal direction


def _rot(z) -> tuple:
    n = math.hypot(*z)
    return (-z[1] / n, z[0] / n)


def _face_corners(D: LevelDiagram, key, sec, scale: float):
    """Corners and edges of one face, ccw: far side lo->hi, ray at hi, chain hi->lo, ray at lo."""
    fr = D.frame(key)
    p = fr.p
    cid = key[0]
    far = D.far_fn(key, sec)
    w = sec.far

    def at(g, phi):
        if g <= G_TINY / scale:
            return None
        return (p[0] + math.cos(phi) / g, p[1] + math.sin(phi) / g)

    def chain_label(phi):
        return (cid, fr.near.label(min(max(phi, fr.base), fr.end))[1])

    def pairs(ws):
        ws = sorted(ws)
        return {_pair(a, b) for i, a in enumerate(ws) for b in ws[i + 1:]}

    nb_lo, nb_hi = _sector_neighbours(D, key, sec)
    ray_lo, ray_hi = _ray(key, sec.lo), _ray(key, sec.hi)
    f_lo, f_hi = at(far.value(sec.lo), sec.lo), at(far.value(sec.hi), sec.hi)
    if fr.near is None:
        a_lo = a_hi = tuple(p)
        j_lo = j_hi = None
    else:
        a_lo, a_hi = at(fr.near.value(sec.lo), sec.lo), at(fr.near.value(sec.hi), sec.hi)
        j_lo, j_hi = chain_label(sec.lo + 1e-12), chain_label(sec.hi - 1e-12)
    tol = 1e-9 * scale
    pinch_lo = fr.near is not None and f_lo is not None and a_lo is not None and dist(f_lo, a_lo) <= tol
    pinch_hi = fr.near is not None and f_hi is not None and a_hi is not None and dist(f_hi, a_hi) <= tol

    def far_corner(f, nb, pinch, j, ray):
        ws = {key} | ({w} if w is not None else set())
        if f is None:
            kind = VertexKind.VISIBILITY
        elif pinch:
            kind = VertexKind.CMIXED
            ws.add(j)
        elif nb is not None and nb.far is not None and w is not None and nb.far != w:
            ws.add(nb.far)
            kind = VertexKind.CMIXED if nb.far[0] == w[0] else VertexKind.PURE
        else:
            kind = VertexKind.VISIBILITY
        return _Corner(f, kind, ws, pairs(ws) | {ray})

    zw = polar.inv(D.point(w), p) if w is not None else None
    corners, edges = [], []
    corners.append(far_corner(f_lo, nb_lo, pinch_lo, j_lo, ray_lo))
    if w is not None:
        foot = (p[0] + zw[0] / (zw[0] ** 2 + zw[1] ** 2), p[1] + zw[1] / (zw[0] ** 2 + zw[1] ** 2))
        edges.append(_FaceEdge(EdgeKind.HAUSDORFF, _pair(key, w), (key, w), foot, _rot(zw)))
    else:
        edges.append(None)
    corners.append(far_corner(f_hi, nb_hi, pinch_hi, j_hi, ray_hi))
    u_hi = (math.cos(sec.hi), math.sin(sec.hi))
    u_lo = (math.cos(sec.lo), math.sin(sec.lo))
    if not pinch_hi:
        edges.append(_FaceEdge(EdgeKind.VISIBILITY, ray_hi, (key, key), tuple(p), (-u_hi[0], -u_hi[1])))
        ws = {key} | ({j_hi} if j_hi is not None else set())
        corners.append(_Corner(a_hi, VertexKind.VISIBILITY, ws, pairs(ws) | {ray_hi}))
    if fr.near is not None:
        angles = [sec.hi] + [s for s, *_ in reversed(fr.near.pieces) if sec.lo < s < sec.hi] + [sec.lo]
        for k in range(len(angles) - 1):
            hi_a, lo_a = angles[k], angles[k + 1]
            j = chain_label(0.5 * (hi_a + lo_a))
            zj = polar.inv(D.point(j), p)
            foot = (p[0] + zj[0] / (zj[0] ** 2 + zj[1] ** 2), p[1] + zj[1] / (zj[0] ** 2 + zj[1] ** 2))
            r = _rot(zj)
            edges.append(_FaceEdge(EdgeKind.FARTHEST, _pair(key, j), (key, j), foot, (-r[0], -r[1])))
            if k + 1 < len(angles) - 1:
                s = lo_a
                ws = {key, chain_label(s - 1e-12), chain_label(s + 1e-12)}
                corners.append(_Corner(at(fr.near.value(s), s), VertexKind.SKELETON, ws, pairs(ws)))
        if not pinch_lo:
            ws = {key, j_lo}
            corners.append(_Corner(a_lo, VertexKind.VISIBILITY, ws, pairs(ws) | {ray_lo}))
            edges.append(_FaceEdge(EdgeKind.VISIBILITY, ray_lo, (key, key), tuple(p), u_lo))
        else:
            # the chain ends at the pinch corner, which is the first corner
            pass
    else:
        edges.append(_FaceEdge(EdgeKind.VISIBILITY, ray_lo, (key, key), tuple(p), u_lo))
    assert len(corners) == len(edges), (len(corners), len(edges))
    return corners, edges


def export(D: LevelDiagram) -> Snapshot:
    """Build the explicit planar graph of a level diagram."""
    pts = {}
    for cid, C in D.clusters.items():
        for i, p in enumerate(C.hull):
            pts[(cid, i)] = p
    if pts:
        xs = [p[0] for p in pts.values()]
        ys = [p[1] for p in pts.values()]
        scale = math.hypot(max(xs) - min(xs), max(ys) - min(ys)) + 1.0
        centre = ((max(xs) + min(xs)) / 2, (max(ys) + min(ys)) / 2)
    else:
        scale, centre = 1.0, (0.0, 0.0)
    snap = _Snapper(scale, centre, 1e7 * scale)
    faces = []
    for key, sec in D.faces():
        corners, fedges = _face_corners(D, key, sec, scale)
        ids = [snap.add(c.pos, c.kind, c.witnesses, c.lines) for c in corners]
        bnd = []
        for vid, e in zip(ids, fedges):
            if bnd and bnd[-1][0] == vid:
                bnd[-1] = (vid, e)
            else:
                bnd.append((vid, e))
        while len(bnd) > 1 and bnd[0][0] == bnd[-1][0]:
            bnd.pop()
        tchain = [vid for c, vid in zip(corners, ids) if c.kind == VertexKind.SKELETON and vid is not None]
        faces.append(SFace(key, sec.fid, bnd, tchain))
    edges = _subdivide(snap.vertices, faces)
    return Snapshot(snap.vertices, edges, faces, pts, dict(D.empty), scale, D)


def _sector_neighbours(D: LevelDiagram, key, sec):
    """The sectors adjacent to ``sec`` around the same point on each side (or None)."""
    secs = D.sectors[key]
    i = secs.index(sec)
    fr = D.frame(key)
    full = fr.width >= TWO_PI - 1e-9
    out = []
    for j, gap_fn in ((i - 1, lambda o: sec.lo - o.hi), (i + 1, lambda o: o.lo - sec.hi)):
        if full:
            j %= len(secs)
        if 0 <= j < len(secs) and secs[j] is not sec:
            g = gap_fn(secs[j])
            if min(abs(g), abs(abs(g) - TWO_PI)) < 1e-9:
                out.append(secs[j])
                continue
        out.append(None)
    return out


def _subdivide(vertices, faces) -> list:
    """Unique edge pieces: face edges cut at every vertex on their supporting line."""
    on_line = {}
    for v in vertices:
        for ln in v.lines:
            on_line.setdefault(ln, []).append(v.id)
    pieces = {}
    for f in faces:
        n = len(f.boundary)
        new_bnd = []
        for i in range(n):
            a, fe = f.boundary[i]
            b = f.boundary[(i + 1) % n][0]
            if fe is None or (a is None and b is None and n > 1 and fe.kind == EdgeKind.VISIBILITY):
                new_bnd.append((a, None))
                continue
            chain = [a] + _cuts(vertices, on_line.get(fe.line, []), a, b, fe) + [b]
            for x, y in zip(chain, chain[1:]):
                if x is not None and y is not None:
                    k = (fe.kind, fe.line, frozenset((x, y)))
                    d = None
                elif x is None and y is None:
                    k = (fe.kind, fe.line, None)
                    d = None
                else:
                    fin = x if x is not None else y
                    d = fe.direction if y is None else (-fe.direction[0], -fe.direction[1])
                    canon = _canon(fe.line, vertices)
                    k = (fe.kind, fe.line, fin, (d[0] * canon[0] + d[1] * canon[1]) > 0)
                e = pieces.get(k)
                if e is None:
                    e = SEdge(x, y, fe.kind, fe.line, fe.owners, d)
                    pieces[k] = e
                new_bnd.append((x, e))
        f.boundary = new_bnd
    return list(pieces.values())


def _canon(line, vertices) -> tuple:
    # a fixed generic vector; it only has to tell the two directions of a line apart
    return (0.8017837257372732, 0.5345224838248488)


def _cuts(vertices, ids, a, b, fe: _FaceEdge) -> list:
    if not ids:
        return []
    d = fe.direction
    o = fe.origin
    ta = -math.inf if a is None else (vertices[a].pos[0] - o[0]) * d[0] + (vertices[a].pos[1] - o[1]) * d[1]
    tb = math.inf if b is None else (vertices[b].pos[0] - o[0]) * d[0] + (vertices[b].pos[1] - o[1]) * d[1]
    span = (tb - ta) if math.isfinite(tb - ta) else math.inf
    out = []
    for vid in ids:
        if vid == a or vid == b:
            continue
        q = vertices[vid].pos
        t = (q[0] - o[0]) * d[0] + (q[1] - o[1]) * d[1]
        off = abs((q[0] - o[0]) * d[1] - (q[1] - o[1]) * d[0])
        eps = 1e-9 * (1.0 + abs(t))
        if ta + eps < t < tb - eps and off <= 1e-6 * (1.0 + abs(t)):
            out.append((t, vid))
    return [vid for _, vid in sorted(out)]


# ------------------------------------------------------------------ checks


def _clusters_of(ws) -> dict:
    out = {}
    for cid, idx in ws:
        out.setdefault(cid, set()).add(idx)
    return out


def check_vertex(snap: Snapshot, v: SVertex, deep: bool = True) -> list:
    out = []
    pts = [snap.points[w] for w in v.witnesses if w in snap.points]
    if v.kind == VertexKind.VISIBILITY:
        return out
    rs = [dist(v.pos, p) for p in pts]
    if not rs:
        return [f"vertex {v.id}: no witnesses"]
    r = max(rs)
    tol = 1e-7 * (1.0 + r)
    if max(rs) - min(rs) > tol:
        out.append(f"vertex {v.id} ({v.kind.value}): witnesses not equidistant (spread {max(rs) - min(rs):.3g})")
    by = _clusters_of(v.witnesses)
    sizes = sorted(len(s) for s in by.values())
    expected = {
        VertexKind.PURE: lambda: len(by) >= 3,
        VertexKind.MIXED: lambda: len(by) == 2 and 1 in sizes,
        VertexKind.CMIXED: lambda: len(by) == 2 and max(sizes) >= 2,
        VertexKind.SKELETON: lambda: len(by) == 1 and sizes[0] >= 3,
    }[v.kind]
    if not expected():
        out.append(f"vertex {v.id}: kind {v.kind.value} does not match witnesses {sorted(v.witnesses)}")
    if deep and snap.diagram is not None:
        D = snap.diagram
        for cid in by:
            df = farthest_distance(D.clusters[cid], v.pos)
            if abs(df - r) > tol:
                out.append(f"vertex {v.id}: witness cluster {cid} farthest distance {df:.12g} differs from radius {r:.12g}")
        if v.kind != VertexKind.SKELETON:
            best = min(farthest_distance(D.clusters[c], v.pos) for c in D.nonempty())
            if best < r - tol:
                out.append(f"vertex {v.id}: some cluster is closer than its witnesses")
    return out


def _convex(snap: Snapshot, f: SFace) -> bool:
    ids = [vid for vid, _ in f.boundary if vid is not None]
    ps = [snap.vertices[i].pos for i in ids]
    n = len(ps)
    if n < 3:
        return True
    ext = max(max(abs(p[0]), abs(p[1])) for p in ps) + 1.0
    for i in range(n):
        a, b, c = ps[i], ps[(i + 1) % n], ps[(i + 2) % n]
        cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if cr < -1e-9 * ext * ext:
            if f.boundary and any(vid is None for vid, _ in f.boundary):
                # across the vertex at infinity the finite sequence wraps; skip that turn
                seq = [vid for vid, _ in f.boundary]
                k = seq.index(None)
                rot = seq[k + 1:] + seq[:k]
                if ids[i] == rot[-1] or ids[(i + 1) % n] == rot[-1] or ids[(i + 1) % n] == rot[0]:
                    continue
            return False
    return True


def euler_characteristic(snap: Snapshot) -> int:
    V = len(snap.vertices) + (1 if any(e.a is None or e.b is None for e in snap.edges) else 0)
    E = len(snap.edges)
    F = len(snap.faces)
    return V - E + F


def disconnected_skeletons(snap: Snapshot) -> list:
    """Clusters whose skeleton edges inside their region do not form one connected piece."""
    adj = {}
    for e in snap.edges:
        if e.kind != EdgeKind.FARTHEST:
            continue
        cid = e.owners[0][0]
        g = adj.setdefault(cid, {})
        g.setdefault(e.a, set()).add(e.b)
        g.setdefault(e.b, set()).add(e.a)
    bad = []
    for cid, g in adj.items():
        start = next(iter(g))
        seen, stack = {start}, [start]
        while stack:
            x = stack.pop()
            for y in g[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != len(g):
            bad.append(cid)
    return bad


def partition_violations(D: LevelDiagram, qs: np.ndarray, tol: float = 1e-7) -> int:
    """Sample points covered by no face, or strictly inside two faces."""
    inside = np.zeros(len(qs), dtype=np.int64)
    touch = np.zeros(len(qs), dtype=np.int64)
    for key, sec in D.faces():
        m = np.full(len(qs), np.inf)
        for kind, a, b, c in D.face_constraints(key, sec):
            v = a * qs[:, 0] + b * qs[:, 1] + c
            m = np.minimum(m, v)
        inside += m > tol
        touch += m > -tol
    return int(np.sum(inside > 1) + np.sum(touch == 0))


def check_snapshot(snap: Snapshot, qs: Optional[np.ndarray] = None, deep: bool = True) -> list:
    out = []
    for v in snap.vertices:
        out.extend(check_vertex(snap, v, deep))
    for f in snap.faces:
        if not _convex(snap, f):
            out.append(f"face {f.fid} of {f.owner} is not convex")
    if snap.faces:
        chi = euler_characteristic(snap)
        if chi != 2:
            out.append(f"Euler characteristic is {chi}, expected 2")
    for cid in disconnected_skeletons(snap):
        out.append(f"cluster {cid}: skeleton inside its region is disconnected")
    if qs is not None and snap.diagram is not None and snap.faces:
        n = partition_violations(snap.diagram, qs)
        if n:
            out.append(f"{n} sample points not covered by exactly one face")
    return out


def check_structure(D: LevelDiagram, qs: Optional[np.ndarray] = None, deep: bool = True) -> list:
    """All violations of the diagram's structural invariants (empty when consistent)."""
    snap = export(D)
    out = check_snapshot(snap, qs, deep)
    if D.stats.deletions > D.stats.insertions:
        out.append("more deletions than insertions")
    return out
