"""Build the diagram of a random family and write it as JSON and SVG.

    python3 scripts/demo.py --clusters 12 --seed 3 --prefix /tmp/demo
"""
import argparse

import numpy as np

from hvd import construct
from hvd.generate import disjoint_disks
from hvd.serialize import dumps, snapshot_doc, write_family
from hvd.structure import check_structure, export
from hvd.svg import render


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--clusters", type=int, default=12)
    ap.add_argument("--max-points", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--prefix", default="demo")
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    sizes = [int(x) for x in rng.integers(1, args.max_points + 1, size=args.clusters)]
    fam = disjoint_disks(args.clusters, sizes, seed=args.seed)
    hier, D, stats = construct(fam, seed=args.seed)
    doc = snapshot_doc(export(D), stats)
    for suffix, text in (("-input.json", write_family(fam)), (".json", dumps(doc)), (".svg", render(doc))):
        with open(args.prefix + suffix, "w") as fh:
            fh.write(text)
    print(f"{len(fam.clusters)} clusters, {sum(sizes)} points, {len(hier.levels)} levels")
    print(f"{len(doc['vertices'])} vertices, {len(doc['edges'])} edges, {len(doc['faces'])} faces")
    print(f"update ops {stats.ops}, empty regions {sorted(D.empty)}")
    print(f"structure violations: {len(check_structure(D))}")
    print(f"wrote {args.prefix}.json and {args.prefix}.svg")


if __name__ == "__main__":
    main()
