"""Scaling measurements: update operations, walk lengths and level counts."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .generate import disjoint_disks
from .incremental import construct

CSV_HEADER = "n,k,seed,time_ms,ops,walk_mean,levels"
DEFAULT_SIZES = tuple(2 ** e for e in range(8, 15))


@dataclass
class BenchRow:
    n: int
    k: int
    seed: int
    time_ms: float
    ops: int
    walk_mean: float
    levels: int

    def csv(self) -> str:
        return f"{self.n},{self.k},{self.seed},{self.time_ms:.1f},{self.ops},{self.walk_mean:.4f},{self.levels}"


def family_of_size(n: int, seed: int, max_points: int = 7):
    """Disjoint-disk clusters with 1..max_points points each, n points in total."""
    rng = np.random.default_rng([n, seed])
    sizes = []
    while sum(sizes) < n:
        sizes.append(int(rng.integers(1, max_points + 1)))
    sizes[-1] -= sum(sizes) - n
    return disjoint_disks(len(sizes), sizes, seed=int(rng.integers(2 ** 31)))


def run_one(n: int, seed: int, beta: float = 0.25) -> BenchRow:
    fam = family_of_size(n, seed)
    t0 = time.perf_counter()
    hier, D, stats = construct(fam, seed=seed, beta=beta)
    ms = 1e3 * (time.perf_counter() - t0)
    walks = hier.walk_steps
    return BenchRow(n, len(fam.clusters), seed, ms, stats.ops, float(np.mean(walks)) if walks else 0.0, len(hier.levels))


def run(sizes=DEFAULT_SIZES, seeds: int = 10, beta: float = 0.25, progress=None) -> list:
    rows = []
    for n in sizes:
        for s in range(seeds):
            row = run_one(n, s, beta)
            rows.append(row)
            if progress is not None:
                progress(row)
    return rows


def mean_ops(rows) -> dict:
    by = {}
    for r in rows:
        by.setdefault(r.n, []).append(r.ops)
    return {n: float(np.mean(v)) for n, v in sorted(by.items())}


def loglog_slope(rows) -> float:
    m = mean_ops(rows)
    x = np.log([n for n in m])
    y = np.log([m[n] for n in m])
    return float(np.polyfit(x, y, 1)[0])


def doubling_ratios(rows) -> list:
    """ops(2n)/ops(n) for consecutive sizes that differ by a factor of two."""
    m = mean_ops(rows)
    ns = sorted(m)
    return [(a, m[b] / m[a]) for a, b in zip(ns, ns[1:]) if b == 2 * a]


def summary(rows) -> str:
    lines = [f"log-log slope of ops vs n: {loglog_slope(rows):.3f}"]
    for n, r in doubling_ratios(rows):
        lines.append(f"ops({2 * n})/ops({n}) = {r:.3f}")
    return "\n".join(lines)


def level_and_walk(k: int, seed: int, beta: float = 0.25, queries: int = 1000, max_points: int = 2) -> tuple:
    """(level count, mean walk length per level over random locates) for one k-cluster family."""
    rng = np.random.default_rng([k, seed, 7])
    sizes = [int(x) for x in rng.integers(1, max_points + 1, size=k)]
    fam = disjoint_disks(k, sizes, seed=int(rng.integers(2 ** 31)))
    hier, _, _ = construct(fam, seed=seed, beta=beta)
    pts = np.array([p for c in fam.clusters for p in c.points])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    qs = rng.uniform(lo, hi, size=(queries, 2))
    hier.walk_steps = []
    for q in qs:
        hier.locate((float(q[0]), float(q[1])))
    return len(hier.levels), float(np.mean(hier.walk_steps)), math.log(k, 4)
