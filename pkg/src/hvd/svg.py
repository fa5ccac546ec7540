"""SVG rendering of a diagram document produced by ``serialize.snapshot_doc``.

Bounded edges become one polyline each; unbounded edges are clipped to the
viewport and drawn as lines.  Skeleton edges are dashed, Hausdorff
boundaries solid, hulls outlined.
"""
from __future__ import annotations

import math

PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def viewport(doc: dict, margin: float = 0.6) -> tuple:
    pts = [p for c in doc["clusters"] for p in c["hull"]]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    w = max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
    pad = margin * w
    return min(xs) - pad, min(ys) - pad, max(xs) + pad, max(ys) + pad


def clip_ray(origin, d, box, both_ways: bool = False):
    """Segment of the ray (or line) origin + t d inside box, or None (Liang-Barsky)."""
    x0, y0, x1, y1 = box
    t0, t1 = (-math.inf if both_ways else 0.0), math.inf
    for p, q in ((-d[0], origin[0] - x0), (d[0], x1 - origin[0]), (-d[1], origin[1] - y0), (d[1], y1 - origin[1])):
        if p == 0:
            if q < 0:
                return None
            continue
        r = q / p
        if p < 0:
            t0 = max(t0, r)
        else:
            t1 = min(t1, r)
    if t0 > t1 or not math.isfinite(t0) or not math.isfinite(t1):
        return None
    return (origin[0] + t0 * d[0], origin[1] + t0 * d[1]), (origin[0] + t1 * d[0], origin[1] + t1 * d[1])


def _f(x: float) -> str:
    return f"{x:.6g}"


def render(doc: dict, width: int = 800) -> str:
    box = viewport(doc)
    x0, y0, x1, y1 = box
    scale = width / (x1 - x0)
    height = int(round((y1 - y0) * scale))
    stroke = 1.5 / scale

    def xy(p):
        # flip y so the picture has the usual orientation
        return f"{_f(p[0])},{_f(y0 + y1 - p[1])}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{_f(x0)} {_f(y0)} {_f(x1 - x0)} {_f(y1 - y0)}">',
        f'<rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(x1 - x0)}" height="{_f(y1 - y0)}" fill="white"/>',
    ]
    verts = {v["id"]: v["pos"] for v in doc["vertices"]}
    for e in doc["edges"]:
        dash = ' stroke-dasharray="{0},{0}"'.format(_f(4 * stroke)) if e["kind"] == "FarthestBoundary" else ""
        style = f'fill="none" stroke="black" stroke-width="{_f(stroke)}"{dash}'
        if not e["unbounded"]:
            out.append(f'<polyline class="edge bounded" points="{xy(verts[e["a"]])} {xy(verts[e["b"]])}" {style}/>')
            continue
        if e["a"] is None:
            seg = clip_ray(e["origin"], e["direction"], box, both_ways=True)
        else:
            seg = clip_ray(verts[e["a"]], e["direction"], box)
        if seg is None:
            continue
        (ax, ay), (bx, by) = seg
        out.append(
            f'<line class="edge unbounded" x1="{_f(ax)}" y1="{_f(y0 + y1 - ay)}" '
            f'x2="{_f(bx)}" y2="{_f(y0 + y1 - by)}" {style}/>'
        )
    for i, c in enumerate(doc["clusters"]):
        colour = PALETTE[i % len(PALETTE)]
        hull = c["hull"]
        if len(hull) >= 2:
            pts = " ".join(xy(p) for p in hull)
            out.append(f'<polygon class="hull" points="{pts}" fill="{colour}" fill-opacity="0.15" stroke="{colour}" stroke-width="{_f(stroke)}"/>')
        for p in hull:
            cx, cy = xy(p).split(",")
            out.append(f'<circle cx="{cx}" cy="{cy}" r="{_f(2.5 * stroke)}" fill="{colour}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
