#!/usr/bin/env python3
"""Equality cases: the linear family for the sup-norm bound and f = g for both
pre-Gruss inequalities, plus an exploratory search on the range product bound."""
import json

from pompeiu_lab.quad import Interval
from pompeiu_lab.verify import FunctionFamily, sharpness_search

I12 = Interval(1, 2)
CUBIC = FunctionFamily("c0 + c1*x + c2*x^2 + c3*x^3", {k: (-2, 2) for k in
                                                      ("c0", "c1", "c2", "c3")})
RUNS = [
    ("dragomir_linf", FunctionFamily("c*x - 1", {"c": (0.1, 5)}), {}),
    ("pre_gruss", CUBIC, {}),
    ("gen_pre_gruss", CUBIC, {"h": "x^2 + 1"}),
    ("range_product", FunctionFamily("c0 + c1*x", {"c0": (0.1, 2), "c1": (0.1, 2)}), {}),
    ("sec3_inf", CUBIC, {}),
]


def main():
    rows = []
    for bid, fam, kw in RUNS:
        res = sharpness_search(bid, fam, I12, budget=48, **kw)
        rows.append({"bound_id": bid, "best_ratio": res.best_ratio,
                     "best_params": res.best_params, "evaluations": res.evaluations})
        print(f"{bid:<16} best ratio {res.best_ratio:.12f}  ({res.evaluations} evaluations)")
    with open("sharpness.json", "w") as fh:
        json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
