"""Pipeline vs closed form for e^{-sT}(s - a)/(s - b) as a2 moves away from a1.

    python3 scripts/reproduce_zero_uncertainty.py --a1 3 --out zero_uncertainty.csv
"""

import argparse
import csv
import sys
import time

import numpy as np

from nugap.errors import InconclusiveError
from nugap.numetric import closed_form_zero_uncertainty, lemma_positivity_check, nu_metric
from nugap.plantcore import DelayRationalPlant


def plant(T, b, a):
    return DelayRationalPlant.from_coefficients(T, [-a, 1], [-b, 1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", type=float, default=1.0)
    ap.add_argument("--b", type=float, default=1.0)
    ap.add_argument("--a1", type=float, default=3.0)
    ap.add_argument("--max-step", type=float, default=0.5)
    ap.add_argument("--points", type=int, default=11)
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)

    rows = []
    for a2 in args.a1 + np.linspace(-args.max_step, args.max_step, args.points):
        oracle, case = closed_form_zero_uncertainty(args.T, args.b, args.a1, a2)
        holds, m = lemma_positivity_check(args.T, args.b, args.a1, a2)
        t0 = time.perf_counter()
        try:
            res = nu_metric(plant(args.T, args.b, args.a1), plant(args.T, args.b, a2))
            value, branch = res.value, res.branch.value
        except InconclusiveError as exc:
            value, branch = float("nan"), f"inconclusive: {exc}"
        rows.append((a2, case.case.value, oracle, value, abs(value - oracle), holds, m, branch,
                     time.perf_counter() - t0))

    header = ["a2", "case", "closed_form", "pipeline", "abs_diff", "lemma_holds", "lemma_min", "branch", "seconds"]
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(out)
    w.writerow(header)
    w.writerows(rows)
    if args.out:
        out.close()


if __name__ == "__main__":
    main()
