"""Try to undercut the certified bound with a multistart search on every small catalog code."""
import argparse

from sharpcodes.codes import build_code, catalog_names
from sharpcodes.potentials import parse_potential
from sharpcodes.verify import certified_bound, global_min_search


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h", default="riesz:1")
    ap.add_argument("--max-n-points", type=int, default=600)
    ap.add_argument("--restarts", type=int, default=200)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    h = parse_potential(args.h)
    print(f"{'code':<20}{'N':>6}{'certified':>22}{'search floor':>22}{'rel. undercut':>16}")
    for name in catalog_names(include_leech=False):
        C = build_code(name)
        if C.N > args.max_n_points:
            continue
        bound = certified_bound(C, h)
        floor, _ = global_min_search(C, h, restarts=args.restarts, seed=args.seed)
        under = (bound - floor) / max(1.0, abs(bound))
        print(f"{name:<20}{C.N:>6}{bound:>22.15g}{floor:>22.15g}{under:>16.2e}")


if __name__ == "__main__":
    main()
