import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hvd.cluster import Cluster, supporting_segments
from hvd.fvd import build_fvd
from hvd.geom import dist, lerp
from hvd.oracle import oracle_segment_equidistant
from hvd.sepdec import PreconditionViolated, SdLeaf, SdNode, build_sd, centroid, locate, locate_index, segment_query, visit_count

from test_fvd import random_hull


def argmax_index(hull, q) -> int:
    d = [dist(q, p) for p in hull]
    return d.index(max(d))


def test_centroid_examples():
    path = {0: [1], 1: [0, 2], 2: [1]}
    assert centroid(path, {0, 1, 2}) == 1
    assert centroid({5: []}, {5}) == 5


def test_centroid_of_random_tree_halves_it():
    rng = np.random.default_rng(0)
    for _ in range(20):
        adj = {0: []}
        for v in range(1, 50):
            u = int(rng.integers(0, v))
            adj[v] = [u]
            adj[u].append(v)
        c = centroid(adj, set(adj))
        seen = {c}
        for s in adj[c]:
            comp, stack = {s}, [s]
            while stack:
                for w in adj[stack.pop()]:
                    if w not in seen and w not in comp:
                        comp.add(w)
                        stack.append(w)
            seen |= comp
            assert len(comp) <= 25


def test_small_trees():
    sd = build_sd(build_fvd(Cluster(0, [(0, 0), (4, 0), (2, 3)])))
    assert isinstance(sd.root, SdNode) and all(isinstance(c, SdLeaf) for c in sd.root.children)
    sd2 = build_sd(build_fvd(Cluster(1, [(-1, 2), (1, 2)])))
    assert isinstance(sd2.root, SdLeaf)
    assert locate(sd2, (5, 0)) == (-1, 2)


def test_locate_examples():
    sd = build_sd(build_fvd(Cluster(0, [(0, 0), (4, 0), (2, 3)])))
    assert locate(sd, (2, 10)) == (0, 0)  # tie with (4, 0), smaller index wins
    # step off the vertex directly away from (0,0), into that point's region
    q = (2 + 2e-3, 5 / 6 + 5e-3 / 6)
    assert argmax_index(sd.hull, q) == 0
    assert locate(sd, q) == (0, 0)


@pytest.mark.parametrize("h", [3, 5, 8, 13, 40, 100, 300])
def test_depth_bound(h):
    for seed in range(5):
        c = random_hull(seed, h)
        sd = build_sd(build_fvd(c))
        assert sd.depth <= math.log2(len(c.hull)) + 2


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.integers(3, 40))
def test_locate_matches_argmax(seed, h):
    c = random_hull(seed, h)
    sd = build_sd(build_fvd(c))
    rng = np.random.default_rng(seed)
    for q in rng.normal(size=(200, 2)) * 3:
        assert locate_index(sd, q) == argmax_index(c.hull, q)
        assert visit_count(sd, q) <= sd.depth + 1 <= math.log2(len(c.hull)) + 3


def test_segment_query_closed_form():
    C = Cluster(0, [(-1, 2), (1, 2)])
    P = Cluster(1, [(0, 5)])
    x = segment_query(build_sd(build_fvd(P)), (0, 0), (0, 4), C)
    assert x == pytest.approx((0, 10 / 3), abs=1e-12)


def test_segment_query_rejects_wrong_signs():
    C = Cluster(0, [(-1, 2), (1, 2)])
    P = Cluster(1, [(0, -3)])
    with pytest.raises(PreconditionViolated):
        segment_query(build_sd(build_fvd(P)), (0, 4), (0, 0), C)


def valid_instances(count: int, seed: int = 0):
    """(C, P, u, v) with u, v on a skeleton edge of C and the required sign change."""
    rng = np.random.default_rng(seed)
    made = 0
    while made < count:
        C = Cluster(0, [tuple(p) for p in rng.normal(size=(int(rng.integers(2, 8)), 2))])
        off = rng.normal(size=2) * 4
        P = Cluster(1, [tuple(p) for p in rng.normal(size=(int(rng.integers(1, 9)), 2)) * 0.8 + off])
        if any(C.contains(p) for p in P.hull) or any(P.contains(p) for p in C.hull):
            continue
        if supporting_segments(C, P) > 2:
            continue
        t = build_fvd(C)
        e = t.edges[int(rng.integers(len(t.edges)))]
        a, b = t.edge_points(e, far=30.0)
        s0, s1 = sorted(rng.uniform(0, 1, size=2))
        u, v = lerp(a, b, s0), lerp(a, b, s1)

        def g(x):
            return max(dist(x, p) for p in C.hull) - max(dist(x, p) for p in P.hull)

        if g(u) > 0 > g(v):
            u, v = v, u
        if not (g(u) < 0 < g(v)):
            continue
        made += 1
        yield C, P, u, v


def test_segment_query_matches_bisection():
    n = 0
    for C, P, u, v in valid_instances(300):
        x = segment_query(build_sd(build_fvd(P)), u, v, C)
        ref = oracle_segment_equidistant(u, v, C, P)
        assert dist(x, ref) <= 1e-9 * max(1.0, dist(u, v))
        n += 1
    assert n == 300


def test_build_cost_is_h_log_h():
    for h in (8, 32, 128, 512):
        c = random_hull(h, h)
        sd = build_sd(build_fvd(c))
        hh = len(c.hull)
        assert sd.comparisons <= 4 * hh * math.log2(hh)
