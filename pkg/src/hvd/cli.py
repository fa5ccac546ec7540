"""Command-line entry point: build, query, check and bench.

Exit codes: 0 ok, 1 check failure, 2 parse error, 3 validation failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import bench as bench_mod
from .cluster import Cluster, Family, validate_family
from .geom import dist
from .incremental import construct
from .oracle import grid_for, oracle_grid
from .serialize import InputError, dumps, read_family, snapshot_doc, snapshot_from_doc
from .structure import check_snapshot, check_structure, export
from .svg import render

EXIT_OK, EXIT_CHECK, EXIT_PARSE, EXIT_INVALID = 0, 1, 2, 3


@dataclass
class RunConfig:
    input: Optional[str] = None
    mode: str = "build"
    seed: int = 0
    beta: float = 0.25
    epsilon: float = 1e-9
    grid: int = 64
    svg: Optional[str] = None
    out: Optional[str] = None
    queries: tuple = ()
    sizes: tuple = bench_mod.DEFAULT_SIZES
    seeds: int = 10

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must lie in (0, 1)")
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be positive")
        if self.grid < 2:
            raise ValueError("grid must be at least 2")


def _emit(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _load(cfg: RunConfig):
    """The parsed input document, or an exit code."""
    try:
        text = sys.stdin.read() if cfg.input in (None, "-") else open(cfg.input).read()
    except OSError as exc:
        print(f"error: cannot read input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        print(f"error: not valid JSON: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return doc


def _family(doc) -> object:
    try:
        return read_family(json.dumps(doc))
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


def _validated(cfg: RunConfig):
    doc = _load(cfg)
    if isinstance(doc, int):
        return doc
    fam = _family(doc)
    if isinstance(fam, int):
        return fam
    report = validate_family(fam, seed=cfg.seed)
    if not report.ok:
        print("validation failed", file=sys.stderr)
        print(json.dumps({"crossing_pairs": [list(p) for p in report.crossing_pairs], "m": report.m,
                          "degeneracies": report.degeneracies}, indent=1))
        return EXIT_INVALID
    return fam


def build_doc(fam: Family, cfg: RunConfig):
    hier, D, stats = construct(fam, seed=cfg.seed, beta=cfg.beta)
    extra = {"config": {"seed": cfg.seed, "beta": cfg.beta, "epsilon": cfg.epsilon}, "levels": len(hier.levels)}
    return hier, D, snapshot_doc(export(D), stats, extra)


def run_build(cfg: RunConfig) -> int:
    fam = _validated(cfg)
    if isinstance(fam, int):
        return fam
    _, _, doc = build_doc(fam, cfg)
    _emit(dumps(doc), cfg.out)
    if cfg.svg:
        with open(cfg.svg, "w") as fh:
            fh.write(render(doc))
    return EXIT_OK


def run_query(cfg: RunConfig) -> int:
    fam = _validated(cfg)
    if isinstance(fam, int):
        return fam
    hier, D, _ = build_doc(fam, cfg)
    qs = list(cfg.queries)
    if not qs:
        for line in sys.stdin:
            parts = line.replace(",", " ").split()
            if len(parts) == 2:
                qs.append((float(parts[0]), float(parts[1])))
    lines = []
    for q in qs:
        cid, idx, d = D.nearest_cluster(q)
        lines.append(json.dumps({"q": list(q), "cluster": cid, "point": idx, "distance": d}))
    _emit("\n".join(lines) + ("\n" if lines else ""), cfg.out)
    return EXIT_OK


def grid_mismatches(fam: Family, D, res: int, eps: float) -> tuple:
    """(mismatch count, compared count) of face ownership against brute force."""
    qs = grid_for(fam, res).points()
    want, tie = oracle_grid(fam, qs, eps)
    got = D.owner_grid(qs)
    keep = ~tie
    return int(np.sum(got[keep] != want[keep])), int(np.sum(keep))


def doc_mismatches(doc: dict, eps: float) -> tuple:
    """Ownership errors of a stored diagram, checked without rebuilding it.

    Every face must be owned by the nearest cluster at an interior point,
    and every boundary vertex must sit at the nearest-cluster distance.
    """
    fam = Family([Cluster(c["id"], [tuple(p) for p in c["hull"]]) for c in doc["clusters"]])

    def nearest(q):
        ds = sorted((max(dist(q, p) for p in c.hull), c.id) for c in fam.clusters)
        return ds

    pos = {v["id"]: v["pos"] for v in doc["vertices"]}
    bad = checked = 0
    for f in doc["faces"]:
        fin = [pos[v] for v in f["vertices"] if v is not None]
        if len(fin) < 3:
            continue
        q = (sum(p[0] for p in fin) / len(fin), sum(p[1] for p in fin) / len(fin))
        ds = nearest(q)
        if len(ds) > 1 and ds[1][0] - ds[0][0] < eps * (1.0 + ds[0][0]):
            continue
        checked += 1
        bad += ds[0][1] != f["owner"][0]
    for v in doc["vertices"]:
        if v["kind"] in ("Visibility", "Skeleton"):
            continue
        checked += 1
        d0 = nearest(tuple(v["pos"]))[0][0]
        bad += abs(d0 - v["radius"]) > 1e-7 * (1.0 + d0)
    return bad, checked


def run_check(cfg: RunConfig) -> int:
    doc = _load(cfg)
    if isinstance(doc, int):
        return doc
    if isinstance(doc, dict) and "faces" in doc:
        try:
            snap = snapshot_from_doc(doc)
        except (KeyError, TypeError, ValueError) as exc:
            print(f"error: malformed diagram document: {exc}", file=sys.stderr)
            return EXIT_PARSE
        violations = check_snapshot(snap, deep=False)
        mism, n = doc_mismatches(doc, cfg.epsilon)
    else:
        fam = _family(doc)
        if isinstance(fam, int):
            return fam
        report = validate_family(fam, seed=cfg.seed)
        if not report.ok:
            print(json.dumps({"crossing_pairs": [list(p) for p in report.crossing_pairs], "m": report.m,
                              "degeneracies": report.degeneracies}, indent=1))
            return EXIT_INVALID
        _, D, _ = construct(fam, seed=cfg.seed, beta=cfg.beta)
        mism, n = grid_mismatches(fam, D, cfg.grid, cfg.epsilon)
        violations = check_structure(D, grid_for(fam, cfg.grid).points()[::7])
    print(f"mismatches: {mism} of {n}")
    print(f"structure violations: {len(violations)}")
    for v in violations[:20]:
        print(f"  {v}")
    return EXIT_OK if mism == 0 and not violations else EXIT_CHECK


def run_bench(cfg: RunConfig) -> int:
    out = sys.stdout if cfg.out in (None, "-") else open(cfg.out, "w")
    try:
        out.write(bench_mod.CSV_HEADER + "\n")

        def progress(row):
            out.write(row.csv() + "\n")
            out.flush()

        rows = bench_mod.run(cfg.sizes, cfg.seeds, cfg.beta, progress)
    finally:
        if out is not sys.stdout:
            out.close()
    print(bench_mod.summary(rows), file=sys.stderr if cfg.out in (None, "-") else sys.stdout)
    return EXIT_OK


def parse_args(argv=None) -> RunConfig:
    ap = argparse.ArgumentParser(prog="hvd", description="Hausdorff Voronoi diagrams of non-crossing point clusters.")
    ap.add_argument("--input", help='JSON file {"clusters": [{"id", "points"}]} (or a diagram for --mode check); "-" reads stdin')
    ap.add_argument("--mode", choices=["build", "query", "check", "bench"], default="build")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--beta", type=float, default=0.25, help="hierarchy sampling probability")
    ap.add_argument("--epsilon", type=float, default=1e-9, help="tie tolerance for ownership checks")
    ap.add_argument("--grid", type=int, default=64, help="grid resolution for --mode check")
    ap.add_argument("--svg", help="also write an SVG drawing (build mode)")
    ap.add_argument("--out", help="output path (default stdout)")
    ap.add_argument("--query", nargs=2, type=float, action="append", metavar=("X", "Y"),
                    help="query point (query mode; repeatable, else read from stdin)")
    ap.add_argument("--sizes", type=int, nargs="+", help="bench sizes (default 256 ... 16384)")
    ap.add_argument("--seeds", type=int, default=10, help="bench seeds per size")
    a = ap.parse_args(argv)
    try:
        return RunConfig(
            input=a.input, mode=a.mode, seed=a.seed, beta=a.beta, epsilon=a.epsilon, grid=a.grid,
            svg=a.svg, out=a.out, queries=tuple(tuple(q) for q in (a.query or ())),
            sizes=tuple(a.sizes) if a.sizes else bench_mod.DEFAULT_SIZES, seeds=a.seeds,
        )
    except ValueError as exc:
        ap.error(str(exc))


def main(argv=None) -> int:
    cfg = parse_args(argv)
    handler = {"build": run_build, "query": run_query, "check": run_check, "bench": run_bench}[cfg.mode]
    return handler(cfg)


if __name__ == "__main__":
    sys.exit(main())
