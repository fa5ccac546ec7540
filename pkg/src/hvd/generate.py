"""Random cluster families and small hand-made fixtures."""
from __future__ import annotations

import math

import numpy as np

from .cluster import Cluster, Family


def disjoint_disks(k: int, sizes, seed: int = 0, radius: float = 1.0, spread: float = None) -> Family:
    """k clusters of points sampled inside pairwise disjoint disks.

    ``sizes`` is either one point count for every cluster or a list of counts.
    Disk centres are placed by rejection sampling in a square that grows with k.
    """
    rng = np.random.default_rng(seed)
    if isinstance(sizes, int):
        sizes = [sizes] * k
    side = spread if spread is not None else 3.0 * radius * math.sqrt(k) + 2 * radius
    centres = []
    # a uniform grid of candidate cells keeps rejection sampling linear
    cell = 2.0 * radius
    occupied = {}
    while len(centres) < k:
        c = rng.uniform(0.0, side, size=2)
        gx, gy = int(c[0] // cell), int(c[1] // cell)
        ok = True
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for j in occupied.get((gx + dx, gy + dy), ()):
                    if math.hypot(*(centres[j] - c)) <= 2.0 * radius * 1.05:
                        ok = False
        if ok:
            occupied.setdefault((gx, gy), []).append(len(centres))
            centres.append(c)
    clusters = []
    for i, (c, m) in enumerate(zip(centres, sizes)):
        r = radius * np.sqrt(rng.uniform(0.0, 1.0, size=m))
        a = rng.uniform(0.0, 2 * math.pi, size=m)
        pts = np.column_stack([c[0] + r * np.cos(a), c[1] + r * np.sin(a)])
        clusters.append(Cluster(i, [tuple(p) for p in pts]))
    return Family(clusters)


def polygon_cluster(cid: int, centre, radius: float, m: int, phase: float = 0.0) -> Cluster:
    pts = [
        (centre[0] + radius * math.cos(phase + 2 * math.pi * j / m), centre[1] + radius * math.sin(phase + 2 * math.pi * j / m))
        for j in range(m)
    ]
    return Cluster(cid, pts)


def _small_cluster(cid, rng, centre, radius, m) -> Cluster:
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, size=m))
    a = rng.uniform(0.0, 2 * math.pi, size=m)
    return Cluster(cid, [(centre[0] + x * math.cos(t), centre[1] + x * math.sin(t)) for x, t in zip(r, a)])


def _decoys(rng, first_id: int, count: int, centre, ring: float) -> list:
    out = []
    for i in range(count):
        ang = 2 * math.pi * (i + rng.uniform(0.1, 0.9)) / max(count, 1)
        c = (centre[0] + ring * math.cos(ang), centre[1] + ring * math.sin(ang))
        out.append(_small_cluster(first_id + i, rng, c, 1.0, int(rng.integers(1, 6))))
    return out


def containment_fixture(seed: int = 0) -> tuple:
    """A polygon cluster P with a small cluster inside its hull, plus far decoys.

    Returns (family, ids designed to have empty regions).
    """
    rng = np.random.default_rng(seed)
    m = int(rng.integers(3, 9))
    R = rng.uniform(3.0, 6.0)
    # keep the polygon fat enough that its inscribed disk has room for the inner cluster
    angles = np.linspace(0.0, 2 * math.pi, m, endpoint=False) + rng.uniform(-0.3, 0.3, size=m) * (2 * math.pi / m)
    centre = rng.uniform(-5.0, 5.0, size=2)
    P = Cluster(0, [(centre[0] + R * math.cos(a), centre[1] + R * math.sin(a)) for a in angles])
    inner_r = 0.25 * R * math.cos(math.pi / m)
    Q = _small_cluster(1, rng, centre + rng.uniform(-0.3, 0.3, size=2), inner_r, int(rng.integers(1, 6)))
    decoys = _decoys(rng, 2, int(rng.integers(0, 5)), centre, 4 * R)
    return Family([P, Q] + decoys), {0}


def killing_pair_fixture(seed: int = 0) -> tuple:
    """A long two-point cluster P with small clusters just above and below its midpoint.

    Both small clusters sit inside the P-circle centred at the chord midpoint,
    on opposite sides of the chord, so together they dominate P everywhere.
    Returns (family, ids designed to have empty regions).
    """
    rng = np.random.default_rng(seed)
    L = rng.uniform(3.0, 6.0)
    h = rng.uniform(0.3, 1.0)
    r = rng.uniform(0.05, 0.25) * h
    theta = rng.uniform(0.0, 2 * math.pi)
    c, s = math.cos(theta), math.sin(theta)
    centre = rng.uniform(-5.0, 5.0, size=2)

    def place(x, y):
        return (centre[0] + c * x - s * y, centre[1] + s * x + c * y)

    P = Cluster(0, [place(-L, 0.0), place(L, 0.0)])
    shift = rng.uniform(-0.3, 0.3) * L
    Q = _small_cluster(1, rng, place(shift, h), r, int(rng.integers(1, 6)))
    R = _small_cluster(2, rng, place(shift + rng.uniform(-0.2, 0.2), -h), r, int(rng.integers(1, 6)))
    decoys = _decoys(rng, 3, int(rng.integers(0, 5)), centre, 4 * L)
    return Family([P, Q, R] + decoys), {0}
