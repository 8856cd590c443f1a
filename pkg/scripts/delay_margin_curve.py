"""Boundary margin of det(G1* G2) for plants that differ only in their delay.

Prints r, 1 - r, min |f| on the circle and the local log-log slope, then a
least-squares fit of log(margin) against log(1 - r) over the tail.
"""

import argparse

import numpy as np

from nugap.ncf import normalized_coprime_factorization
from nugap.numetric import cross_gram
from nugap.plantcore import DelayRationalPlant
from nugap.windex import RadiusSchedule, scan_schedule


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T1", type=float, default=1.0)
    ap.add_argument("--T2", type=float, default=1.5)
    ap.add_argument("--a", type=float, default=1.0, help="pole of s/(s - a)")
    ap.add_argument("--depth", type=int, default=32)
    args = ap.parse_args(argv)

    pairs = [
        normalized_coprime_factorization(DelayRationalPlant.from_coefficients(T, [0, 1], [-args.a, 1]))
        for T in (args.T1, args.T2)
    ]
    sched = RadiusSchedule.geometric(1 - 2.0 ** -(args.depth + 1))
    scans = scan_schedule(cross_gram(*pairs), sched.radii)
    eps = np.array([1 - s.radius for s in scans])
    m = np.array([s.min_modulus for s in scans])
    print(f"{'r':>20} {'1-r':>10} {'margin':>10} {'samples':>8} {'slope':>7}")
    for k, s in enumerate(scans):
        slope = np.log(m[k] / m[k - 1]) / np.log(eps[k] / eps[k - 1]) if k else float("nan")
        print(f"{s.radius:20.15f} {eps[k]:10.3e} {m[k]:10.3e} {s.samples_used:8d} {slope:7.3f}")
    tail = slice(len(scans) // 2, None)
    p, c = np.polyfit(np.log(eps[tail]), np.log(m[tail]), 1)
    print(f"tail fit: margin ~ {np.exp(c):.4g} * (1 - r)^{p:.4f}")


if __name__ == "__main__":
    main()
