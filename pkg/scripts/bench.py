"""Update-count scaling bench: CSV rows, then the log-log slope and doubling ratios.

    python3 scripts/bench.py --sizes 256 512 1024 --seeds 3 --out bench.csv
"""
import argparse
import sys

from hvd import bench


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=list(bench.DEFAULT_SIZES))
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--beta", type=float, default=0.25)
    ap.add_argument("--out", help="CSV path (default stdout)")
    args = ap.parse_args(argv)
    out = open(args.out, "w") if args.out else sys.stdout
    out.write(bench.CSV_HEADER + "\n")

    def progress(row):
        out.write(row.csv() + "\n")
        out.flush()

    rows = bench.run(args.sizes, args.seeds, args.beta, progress)
    if args.out:
        out.close()
    print(bench.summary(rows), file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
