"""Max of |F| on |z| = r versus the boundary norm for random stable rational F.

Shows the distance to the norm shrinking in proportion to 1 - r, and that a
first-order extrapolation from the two outermost circles recovers the norm.
"""

import argparse

import numpy as np

from nugap.boundary import DISK, BoundaryFunction
from nugap.hnorm import circle_sup, hinf_norm
from nugap.plantcore import DelayRational, Polynomial


def random_stable(rng):
    n = int(rng.integers(1, 5))
    poles = []
    while len(poles) < n:
        if n - len(poles) >= 2 and rng.random() < 0.5:
            p = complex(-rng.uniform(0.05, 2), rng.uniform(0.1, 5))
            poles += [p, p.conjugate()]
        else:
            poles.append(-rng.uniform(0.1, 3))
    num = Polynomial(rng.normal(size=int(rng.integers(1, n + 2))))
    return DelayRational.single(0.0, num, Polynomial.from_roots(poles))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--seed", type=int, default=9)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    radii = (0.9, 0.99, 0.999, 0.9999)
    print("norm        " + " ".join(f"gap@{r:<7}" for r in radii) + " extrapolated_err")
    for _ in range(args.count):
        expr = random_stable(rng)
        norm = hinf_norm(BoundaryFunction.from_expr(expr)).value
        f = BoundaryFunction(lambda z, e=expr: e((1 + z) / (1 - z)), DISK)
        sups = [circle_sup(f, r) for r in radii]
        extrapolated = sups[-1] + (sups[-1] - sups[-2]) / 9
        gaps = " ".join(f"{norm - s:11.3e}" for s in sups)
        print(f"{norm:11.6g} {gaps} {abs(extrapolated - norm):11.1e}")


if __name__ == "__main__":
    main()
