#!/usr/bin/env python3
"""Run every catalog entry over random precondition-satisfying contexts.

Writes the suite report, a CSV summary and (if any) counterexample JSON
files, and exits 2 when some entry is violated.
"""
import argparse
import json
import os
import sys
import time

from pompeiu_lab.bounds import list_bounds
from pompeiu_lab.cli import dumps, summary_csv
from pompeiu_lab.verify import SuiteConfig, run_suite, write_counterexamples


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--only", nargs="*", help="restrict to these bound ids")
    ap.add_argument("--errata", action="store_true", help="also run the as-printed variants")
    ap.add_argument("--out", default="sweep")
    args = ap.parse_args()

    ids = args.only or [b["id"] for b in list_bounds(include_errata=args.errata)]
    t0 = time.perf_counter()
    rep = run_suite(SuiteConfig(ids, samples=args.samples, seed=args.seed), args.workers)
    dt = time.perf_counter() - t0

    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "report.json"), "w") as fh:
        fh.write(dumps(rep.to_dict()) + "\n")
    table = summary_csv(rep)
    with open(os.path.join(args.out, "summary.csv"), "w") as fh:
        fh.write(table)
    if rep.counterexamples:
        write_counterexamples(rep, os.path.join(args.out, "counterexamples"))
    print(table, end="")
    print(f"{len(ids)} entries, {args.samples} cases each, {rep.violated} violated, "
          f"{dt:.0f} s", file=sys.stderr)
    return 2 if rep.violated else 0


if __name__ == "__main__":
    sys.exit(main())
