import math

import numpy as np
import pytest

from hvd.cluster import Cluster, Family, farthest_point
from hvd.generate import containment_fixture, disjoint_disks, killing_pair_fixture
from hvd.oracle import GridSpec, grid_for, oracle_grid, oracle_nearest, oracle_region_empty, oracle_segment_equidistant

TWO = Family([Cluster(0, [(0, 0)]), Cluster(1, [(4, 0)])])


def test_nearest_examples():
    cid, d = oracle_nearest((1, 1), TWO)
    assert cid == 0 and d == pytest.approx(math.sqrt(2))
    assert oracle_nearest((2, 7), TWO)[0] == 0  # tie goes to the smaller id


def test_nearest_distance_is_farthest_point_of_winner():
    fam = disjoint_disks(6, 4, seed=1)
    rng = np.random.default_rng(1)
    byid = fam.by_id()
    for q in rng.uniform(-5, 15, size=(200, 2)):
        cid, d = oracle_nearest(q, fam)
        assert d == farthest_point(byid[cid], q)[1]


def test_grid_spec():
    with pytest.raises(ValueError):
        GridSpec(0, 1, 0, 1, 1)
    fam = disjoint_disks(3, 3, seed=2)
    g = grid_for(fam, 16)
    pts = np.array([p for c in fam.clusters for p in c.points])
    assert g.xmin < pts[:, 0].min() and g.xmax > pts[:, 0].max()
    assert g.points().shape == (256, 2)


def test_oracle_grid_matches_pointwise():
    fam = disjoint_disks(5, 3, seed=3)
    qs = grid_for(fam, 20).points()
    owner, tie = oracle_grid(fam, qs)
    for q, o, t in zip(qs, owner, tie):
        if not t:
            assert oracle_nearest(q, fam)[0] == o


def test_region_empty_examples():
    tri = Cluster(0, [(0, 0), (4, 0), (2, 3)])
    inner = Cluster(1, [(2, 1)])
    far = Cluster(2, [(30, 30), (31, 30)])
    fam = Family([tri, inner, far])
    g = grid_for(fam, 48)
    empty, cert, owned = oracle_region_empty(tri, fam, g)
    assert empty and cert == ("ContainedCluster", 1) and owned == 0
    assert oracle_region_empty(inner, fam, g)[:2] == (False, None)
    assert oracle_region_empty(far, fam, g)[0] is False


def test_region_empty_on_fixtures():
    for seed in range(10):
        for make, tag in ((containment_fixture, "ContainedCluster"), (killing_pair_fixture, "KillingPair")):
            fam, designated = make(seed)
            g = grid_for(fam, 48)
            for C in fam.clusters:
                empty, cert, owned = oracle_region_empty(C, fam, g)
                assert empty == (C.id in designated)
                assert empty == (owned == 0)
                if empty:
                    assert cert[0] == tag


def test_segment_equidistant():
    C = Cluster(0, [(-1, 2), (1, 2)])
    P = Cluster(1, [(0, 5)])
    x = oracle_segment_equidistant((0, 0), (0, 4), C, P)
    assert x == pytest.approx((0, 10 / 3), abs=1e-9)
    assert oracle_segment_equidistant((0, 0), (0, 1), C, P) is None
