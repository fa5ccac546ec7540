import math

import numpy as np
import pytest

from hvd.cluster import Cluster, Family, farthest_distance
from hvd.generate import containment_fixture, disjoint_disks, killing_pair_fixture
from hvd.hierarchy import AlreadyNearest, Hierarchy, assign_levels, region_empty_among
from hvd.incremental import construct
from hvd.oracle import far_probe_points, grid_for, oracle_nearest


def clear_winner(q, fam, rel=1e-9):
    """Oracle nearest cluster at q, or None when the top two are within ``rel``."""
    d = sorted((max(math.dist(q, p) for p in c.points), c.id) for c in fam.clusters)
    if len(d) > 1 and d[1][0] - d[0][0] <= rel * max(1.0, d[0][0]):
        return None
    return d[0][1]


def random_family(seed, k=None):
    rng = np.random.default_rng(seed)
    k = k or int(rng.integers(2, 13))
    return disjoint_disks(k, [int(x) for x in rng.integers(1, 7, size=k)], seed=seed)


def test_assign_levels_is_geometric():
    tops = []
    for seed in range(50):
        lv = assign_levels(1000, 0.25, np.random.default_rng(seed))
        assert min(lv) == 0
        tops.append(max(lv))
        assert abs(np.mean(np.array(lv) >= 1) - 0.25) < 0.06
    assert 3 <= np.mean(tops) <= 7
    a = assign_levels(100, 0.25, np.random.default_rng(9))
    assert a == assign_levels(100, 0.25, np.random.default_rng(9))
    with pytest.raises(ValueError):
        assign_levels(3, 1.0, np.random.default_rng(0))


def test_walk_step_on_two_singletons():
    fam = Family([Cluster(0, [(0, 0)]), Cluster(1, [(4, 0)])])
    h, _, _ = construct(fam, seed=0)
    with pytest.raises(AlreadyNearest):
        h.walk_step(0, 0, (1, 1))
    assert h.walk_step(0, 1, (1, 1)) == 0
    assert h.walk(0, 1, (1, 1)) == (0, 1)


def test_walks_end_at_the_oracle_answer():
    for seed in range(20):
        fam = random_family(seed)
        h, _, _ = construct(fam, seed=seed)
        rng = np.random.default_rng(seed)
        for l, D in enumerate(h.levels):
            sub = Family([D.clusters[c] for c in D.present()])
            starts = D.nonempty()
            for q in rng.normal(size=(20, 2)) * 8:
                want = clear_winner(q, sub)
                if want is None:
                    continue
                got, _ = h.walk(l, starts[int(rng.integers(len(starts)))], q)
                assert got == want


def test_locate_matches_oracle():
    for seed in range(100):
        fam = random_family(seed)
        h, _, _ = construct(fam, seed=seed)
        qs = np.vstack([grid_for(fam, 6).points(), far_probe_points(fam, 8)])
        for q in qs:
            want = clear_winner(q, fam)
            if want is None:
                continue
            cid, d = h.locate(q)
            assert cid == want
            assert d == pytest.approx(oracle_nearest(q, fam)[1], rel=1e-12)


def test_parametric_locate_closed_form():
    C = Cluster(0, [(-1, 2), (1, 2)])
    h = Hierarchy()
    h.insert_cluster(Cluster(1, [(0, 5)]), 0)
    t, P = h.parametric_locate((0, 0), (0, 4), C)
    assert P == 1 and t == pytest.approx((0, 10 / 3), abs=1e-9)
    # C never wins on this stretch
    assert h.parametric_locate((0, 6), (0, 9), C) is None


def test_parametric_locate_on_empty_hierarchy():
    assert Hierarchy().parametric_locate((0, 0), (0, 4), Cluster(0, [(-1, 2), (1, 2)])) is None


def test_levels_are_nested():
    for seed in range(20):
        h, _, _ = construct(random_family(seed, 30), seed=seed, beta=0.4)
        for lo, hi in zip(h.levels, h.levels[1:]):
            assert set(hi.clusters) <= set(lo.clusters)
        for cid, top in h.max_level.items():
            assert all((cid in D.clusters) == (l <= top) for l, D in enumerate(h.levels))


def linked_hierarchies():
    """Hierarchies with at least one link, from fixtures where regions vanish."""
    for seed in range(40):
        for make in (containment_fixture, killing_pair_fixture):
            fam, _ = make(seed)
            h, _, _ = construct(fam, seed=seed, beta=0.7)
            if h.links:
                yield fam, h


def test_links_are_sound():
    n = 0
    for fam, h in linked_hierarchies():
        for (P, l), link in h.links.items():
            lower = h.levels[l - 1]
            Pc = lower.clusters[P]
            K = [lower.clusters[x] for x in link.killers]
            assert region_empty_among(Pc, K)
            assert not lower.has_region(P)
            rng = np.random.default_rng(n)
            qs = np.vstack([grid_for(fam, 30).points(), far_probe_points(fam, 100)])
            qs = np.vstack([qs, rng.normal(size=(100, 2)) * 3 + np.mean(Pc.hull, axis=0)])
            assert len(qs) >= 1000
            for q in qs:
                dp = farthest_distance(Pc, q)
                assert min(farthest_distance(c, q) for c in K) <= dp * (1 + 1e-12)
            n += 1
    assert n >= 10


def test_walks_are_short():
    steps = []
    for seed in range(5):
        rng = np.random.default_rng(seed)
        fam = disjoint_disks(256, [int(x) for x in rng.integers(1, 3, size=256)], seed=seed)
        h, _, _ = construct(fam, seed=seed)
        h.walk_steps.clear()
        for q in grid_for(fam, 12).points():
            h.locate(q)
        steps.extend(h.walk_steps)
    assert np.mean(steps) <= 8
