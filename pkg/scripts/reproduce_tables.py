"""Recompute tables 1-4 and write them under an output directory.

    python3 scripts/reproduce_tables.py --out results/ --format csv
"""
import argparse
import pathlib
import sys
import time

from sharpcodes.cli import RunConfig, cmd_tables


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--format", choices=["json", "csv", "text"], default="json")
    ap.add_argument("--restarts", type=int)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--no-search", action="store_true")
    args = ap.parse_args()

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    worst = 0
    for which in (1, 2, 3, 4):
        cfg = RunConfig("tables", restarts=args.restarts, seed=args.seed, search=not args.no_search,
                        format=args.format)
        t0 = time.perf_counter()
        code, text = cmd_tables(which, cfg)
        path = out / f"table{which}.{args.format if args.format != 'text' else 'txt'}"
        path.write_text(text)
        print(f"table {which}: exit {code}, {time.perf_counter() - t0:.1f}s -> {path}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
