import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hvd.cluster import (
    Cluster,
    Degenerate,
    Family,
    InsideHull,
    LINEAR_SCAN_LIMIT,
    convex_hull,
    farthest_point,
    supporting_segments,
    tangents,
    validate_family,
)
from hvd.generate import disjoint_disks
from hvd.geom import Sign, dist, orient

coord = st.floats(-100, 100, allow_nan=False, allow_infinity=False)
points = st.lists(st.tuples(coord, coord), min_size=1, max_size=40)


def brute_supporting(P: Cluster, Q: Cluster) -> int:
    """Pairs (p, q) whose line leaves every point of both clusters on one side."""
    allpts = list(P.points) + list(Q.points)
    count = 0
    for p in P.hull:
        for q in Q.hull:
            sides = {orient(p, q, r) for r in allpts} - {Sign.ZERO}
            if len(sides) <= 1:
                count += 1
    return count


def test_hull_examples():
    assert convex_hull([(0, 0)]) == [(0, 0)]
    assert convex_hull([(0, 0), (4, 0), (2, 3), (2, 1)]) == [(0, 0), (4, 0), (2, 3)]
    assert convex_hull([(1, 1), (0, 1), (0, 0), (1, 0)]) == [(0, 0), (1, 0), (1, 1), (0, 1)]


@given(points)
def test_hull_is_strictly_convex_and_contains_points(pts):
    hull = convex_hull(pts)
    m = len(hull)
    assert set(hull) <= set(map(tuple, pts))
    if m >= 3:
        for i in range(m):
            assert orient(hull[i], hull[(i + 1) % m], hull[(i + 2) % m]) == Sign.POSITIVE
        for p in pts:
            assert all(orient(hull[i], hull[(i + 1) % m], p) != Sign.NEGATIVE for i in range(m))


def test_farthest_point_examples():
    tri = Cluster(0, [(0, 0), (4, 0), (2, 3)])
    assert farthest_point(tri, (10, 0)) == ((0, 0), 10.0)
    assert farthest_point(Cluster(1, [(0, 0)]), (3, 4)) == ((0, 0), 5.0)
    p, d = farthest_point(Cluster(2, [(-1, 2), (1, 2)]), (0, 0))
    assert p == (-1, 2) and d == pytest.approx(math.sqrt(5))


@given(points, st.tuples(coord, coord))
def test_farthest_distance_is_max_over_all_points(pts, q):
    c = Cluster(0, pts)
    _, d = farthest_point(c, q)
    assert d == max(dist(q, p) for p in pts)


def test_farthest_point_large_hull_matches_scan():
    # above the scan limit the lookup goes through the separator decomposition
    rng = np.random.default_rng(4)
    ang = np.sort(rng.uniform(0, 2 * np.pi, size=3 * LINEAR_SCAN_LIMIT))
    c = Cluster(0, [(math.cos(a), math.sin(a) * 0.7) for a in ang])
    assert len(c.hull) > LINEAR_SCAN_LIMIT
    for q in rng.normal(size=(500, 2)) * 3:
        p, d = farthest_point(c, q)
        assert d == max(dist(q, h) for h in c.hull)


def test_tangent_examples():
    tri = [(0, 0), (4, 0), (2, 3)]
    assert tangents(tri, (2, -5)) == ((4, 0), (0, 0))
    assert tangents([(-1, 2), (1, 2)], (0, 0)) == ((1, 2), (-1, 2))
    with pytest.raises(InsideHull):
        tangents(tri, (2, 1))
    with pytest.raises(Degenerate):
        tangents([(0, 0)], (1, 1))


def test_tangents_match_brute_force():
    tri = [(0, 0), (4, 0), (2, 3)]
    q = (10, 1)
    expect = set()
    for v in tri:
        sides = {orient(q, v, w) for w in tri} - {Sign.ZERO}
        if len(sides) == 1:
            expect.add(v)
    assert set(tangents(tri, q)) == expect == {(4, 0), (2, 3)}


@given(st.lists(st.tuples(coord, coord), min_size=3, max_size=20), st.tuples(coord, coord))
def test_tangent_lines_support_the_hull(pts, q):
    hull = convex_hull(pts)
    try:
        a, b = tangents(hull, q)
    except (InsideHull, Degenerate):
        return
    assert all(orient(q, a, h) != Sign.NEGATIVE for h in hull)
    assert all(orient(q, b, h) != Sign.POSITIVE for h in hull)


def test_validate_examples():
    far = Family([Cluster(0, [(0, 0), (1, 0), (0, 1)]), Cluster(1, [(10, 10), (11, 10), (10, 11.5)])])
    assert validate_family(far).ok
    crossing = Family([Cluster(0, [(-2, 0.1), (2, -0.1)]), Cluster(1, [(0.1, -3), (-0.2, 3)])])
    rep = validate_family(crossing)
    assert not rep.ok and rep.crossing_pairs == [(0, 1)]
    assert brute_supporting(*crossing.clusters) == 4 and rep.m == 2
    nested = Family([Cluster(0, [(-5, -4), (6, -5), (0, 7)]), Cluster(1, [(0.1, 0.2), (0.7, -0.3)])])
    assert validate_family(nested).ok


def test_validate_rejects_shared_and_cocircular_points():
    shared = Family([Cluster(0, [(0, 0), (1, 0)]), Cluster(1, [(1, 0), (5, 5)])])
    assert any("shared" in d for d in validate_family(shared).degeneracies)
    square = Family([Cluster(0, [(0, 0), (1, 0)]), Cluster(1, [(1, 1.5), (0, 1.5)]), Cluster(2, [(0.5, 20)])])
    # (0,0),(1,0),(1,1.5),(0,1.5) lie on one circle
    assert any("cocircular" in d for d in validate_family(square).degeneracies)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_supporting_segments_match_brute_force(seed):
    rng = np.random.default_rng(seed)
    P = Cluster(0, [tuple(p) for p in rng.normal(size=(int(rng.integers(1, 7)), 2))])
    Q = Cluster(1, [tuple(p) for p in rng.normal(size=(int(rng.integers(1, 7)), 2)) + rng.normal(size=2)])
    if len(P.hull) + len(Q.hull) < 3:
        return
    assert supporting_segments(P, Q) == brute_supporting(P, Q)


def test_validate_agrees_with_brute_force_on_random_families():
    for seed in range(20):
        rng = np.random.default_rng(seed)
        clusters = [Cluster(i, [tuple(p) for p in rng.normal(size=(int(rng.integers(1, 6)), 2)) * 2 + rng.uniform(-6, 6, 2)])
                    for i in range(8)]
        rep = validate_family(Family(clusters))
        expect = sorted(
            (P.id, Q.id) for P, Q in itertools.combinations(clusters, 2) if brute_supporting(P, Q) > 2
        )
        assert rep.crossing_pairs == expect


def test_disjoint_disk_families_validate():
    for seed in range(5):
        assert validate_family(disjoint_disks(30, 5, seed=seed)).ok
