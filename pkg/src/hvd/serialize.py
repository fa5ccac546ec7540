"""JSON reading and writing for cluster families and diagram snapshots.

The diagram document carries two edge lists.  ``edges`` is the plain
Hausdorff diagram: boundary and skeleton edges, merged through the extra
vertices that only the convex decomposition needs.  ``star_edges`` holds
every piece of the decomposition, visibility segments included, and face
boundaries index into it.  Output depends only on the snapshot, so equal
inputs give byte-identical text.
"""
from __future__ import annotations

import json
import math
from typing import Optional

from .cluster import Cluster, Family
from .geom import Point, dist
from .structure import EdgeKind, SEdge, SFace, Snapshot, SVertex, VertexKind


class InputError(ValueError):
    pass


def read_family(text: str) -> Family:
    """Parse {"clusters": [{"id": int, "points": [[x, y], ...]}, ...]}."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("clusters"), list):
        raise InputError('expected an object with a "clusters" list')
    clusters = []
    seen = set()
    for i, c in enumerate(doc["clusters"]):
        if not isinstance(c, dict) or "points" not in c:
            raise InputError(f"cluster #{i}: expected an object with \"points\"")
        cid = c.get("id", i)
        if not isinstance(cid, int) or isinstance(cid, bool):
            raise InputError(f"cluster #{i}: id must be an integer")
        if cid in seen:
            raise InputError(f"duplicate cluster id {cid}")
        seen.add(cid)
        pts = []
        for p in c["points"]:
            if not isinstance(p, (list, tuple)) or len(p) != 2:
                raise InputError(f"cluster {cid}: points must be [x, y] pairs")
            try:
                x, y = float(p[0]), float(p[1])
            except (TypeError, ValueError) as exc:
                raise InputError(f"cluster {cid}: non-numeric coordinate {p!r}") from exc
            if not (math.isfinite(x) and math.isfinite(y)):
                raise InputError(f"cluster {cid}: non-finite coordinate {p!r}")
            pts.append((x, y))
        if not pts:
            raise InputError(f"cluster {cid}: no points")
        clusters.append(Cluster(cid, pts))
    if not clusters:
        raise InputError("no clusters")
    return Family(clusters)


def write_family(family: Family) -> str:
    doc = {"clusters": [{"id": c.id, "points": [list(p) for p in c.points]} for c in family.clusters]}
    return json.dumps(doc, indent=1)


def _pt(p) -> list:
    # adding 0.0 turns -0.0 into 0.0 so equal geometry prints the same
    return [float(p[0]) + 0.0, float(p[1]) + 0.0]


def _key(w) -> list:
    return [int(w[0]), int(w[1])]


def _reason(r) -> dict:
    tag = r[0]
    if tag == "ContainedCluster":
        return {"tag": tag, "by": [int(r[1])]}
    if tag == "KillingPair":
        return {"tag": tag, "by": sorted(int(x) for x in r[1:])}
    return {"tag": tag, "by": []}


def plain_edges(snap: Snapshot) -> list:
    """Boundary and skeleton edges with visibility-only vertices dissolved.

    Each entry is (a, b, kind, owners, origin, direction).  A finite end is a
    vertex id; an infinite one is None.  With one infinite end ``a`` is the
    finite one and ``direction`` points away from it; a full line has
    ``origin`` set to a point on it.
    """
    real = [e for e in snap.edges if e.kind != EdgeKind.VISIBILITY]
    incident = {}
    for i, e in enumerate(real):
        for v in (e.a, e.b):
            if v is not None:
                incident.setdefault(v, []).append(i)
    passable = set()
    for v, es in incident.items():
        if snap.vertices[v].kind != VertexKind.VISIBILITY or len(es) != 2:
            continue
        e1, e2 = real[es[0]], real[es[1]]
        if e1.line == e2.line and e1.kind == e2.kind:
            passable.add(v)

    def other(e: SEdge, v):
        return e.b if e.a == v else e.a

    def extend(i, v):
        # follow the chain from edge i through its endpoint v; returns (end vertex, last edge)
        while v is not None and v in passable:
            j = next(k for k in incident[v] if k != i)
            used.add(j)
            i, v = j, other(real[j], v)
        return v, i

    used = set()
    out = []
    for i, e in enumerate(real):
        if i in used:
            continue
        used.add(i)
        a, ia = extend(i, e.a)
        b, ib = extend(i, e.b)
        origin = direction = None
        if a is None and b is None:
            via = e.a if e.a is not None else e.b
            if via is not None:
                origin = snap.vertices[via].pos
                direction = real[ib].direction
            else:
                origin, direction = _line_of(e, snap)
        elif a is None or b is None:
            if a is None:
                a, b, ia, ib = b, a, ib, ia
            direction = real[ib].direction
        out.append((a, b, e.kind, e.owners, origin, direction))
    return out


def _line_of(e: SEdge, snap: Snapshot):
    # a whole bisector line with no vertex on it: the bisector of two points
    (c1, i1), (c2, i2) = e.owners
    p, q = snap.points[(c1, i1)], snap.points[(c2, i2)]
    mid = Point((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)
    d = (-(q[1] - p[1]), q[0] - p[0])
    n = math.hypot(*d)
    if e.direction is not None:
        return mid, e.direction
    return mid, (d[0] / n, d[1] / n)


def _radius(snap: Snapshot, v: SVertex) -> float:
    rs = [dist(v.pos, snap.points[w]) for w in v.witnesses if w in snap.points]
    return max(rs) if rs else 0.0


def snapshot_doc(snap: Snapshot, stats=None, extra: Optional[dict] = None) -> dict:
    edge_index = {id(e): i for i, e in enumerate(snap.edges)}
    clusters = {}
    for (cid, idx), p in sorted(snap.points.items()):
        clusters.setdefault(cid, []).append(_pt(p))
    doc = {
        "clusters": [{"id": cid, "hull": hull} for cid, hull in sorted(clusters.items())],
        "vertices": [
            {
                "id": v.id,
                "pos": _pt(v.pos),
                "kind": v.kind.value,
                "witnesses": [_key(w) for w in sorted(v.witnesses)],
                "radius": _radius(snap, v),
            }
            for v in snap.vertices
        ],
        "edges": [
            {
                "a": a,
                "b": b,
                "kind": kind.value,
                "owners": [_key(w) for w in owners],
                "unbounded": a is None or b is None,
                "origin": None if origin is None else _pt(origin),
                "direction": None if direction is None else _pt(direction),
            }
            for a, b, kind, owners, origin, direction in plain_edges(snap)
        ],
        "star_edges": [
            {
                "a": e.a,
                "b": e.b,
                "kind": e.kind.value,
                "owners": [_key(w) for w in e.owners],
                "direction": None if e.direction is None else _pt(e.direction),
            }
            for e in snap.edges
        ],
        "faces": [
            {
                "owner": _key(f.owner),
                "id": f.fid,
                "vertices": [vid for vid, _ in f.boundary],
                "edges": [None if e is None else edge_index[id(e)] for _, e in f.boundary],
                "t_chain": list(f.t_chain),
            }
            for f in snap.faces
        ],
        "empty_set": [{"cluster": int(cid), **_reason(r)} for cid, r in sorted(snap.empty.items())],
    }
    if stats is not None:
        doc["update_stats"] = {
            "insertions": stats.insertions,
            "deletions": stats.deletions,
            "per_insertion": [list(t) for t in stats.per_insertion],
        }
    if extra:
        doc.update(extra)
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def snapshot_from_doc(doc: dict) -> Snapshot:
    """Rebuild a snapshot (without the live diagram) for re-checking."""
    points = {}
    for c in doc["clusters"]:
        for i, p in enumerate(c["hull"]):
            points[(c["id"], i)] = Point(*p)
    vertices = [
        SVertex(v["id"], Point(*v["pos"]), VertexKind(v["kind"]), {tuple(w) for w in v["witnesses"]})
        for v in doc["vertices"]
    ]
    edges = []
    for e in doc["star_edges"]:
        owners = tuple(tuple(w) for w in e["owners"])
        d = None if e["direction"] is None else tuple(e["direction"])
        # the support-line key only serves subdivision, which is already done
        edges.append(SEdge(e["a"], e["b"], EdgeKind(e["kind"]), ("doc", len(edges)), owners, d))
    faces = []
    for f in doc["faces"]:
        bnd = [(v, None if i is None else edges[i]) for v, i in zip(f["vertices"], f["edges"])]
        faces.append(SFace(tuple(f["owner"]), f["id"], bnd, list(f["t_chain"])))
    empty = {}
    for r in doc["empty_set"]:
        empty[r["cluster"]] = (r["tag"], *r["by"])
    xs = [p[0] for p in points.values()] or [0.0]
    ys = [p[1] for p in points.values()] or [0.0]
    scale = math.hypot(max(xs) - min(xs), max(ys) - min(ys)) + 1.0
    return Snapshot(vertices, edges, faces, points, empty, scale, None)
