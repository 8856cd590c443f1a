"""Acceptance criteria, each at its stated tolerance.

Every criterion prints one ``PASS``/``FAIL`` line (collected into the pytest
terminal summary, or printed directly when run as a script).
"""

from __future__ import annotations

import functools
import math
import sys
import time

import numpy as np
import pytest

from nugap.boundary import DISK, BoundaryFunction
from nugap.hnorm import circle_sup, hinf_norm
from nugap.ncf import normalized_coprime_factorization, validate_normalization
from nugap.numetric import (
    Branch,
    closed_form_pole_uncertainty,
    closed_form_zero_uncertainty,
    lemma_grid,
    lemma_positivity_check,
    nu_metric,
    nu_metric_fixed_rho,
)
from nugap.plantcore import DelayRational, DelayRationalPlant, Polynomial
from nugap.windex import decay_slope, winding_on_circle

REPORT: list[str] = []


def zero_plant(T, b, a):
    return DelayRationalPlant.from_coefficients(T, [-a, 1], [-b, 1])


def pole_plant(T, a):
    return DelayRationalPlant.from_coefficients(T, [0, 1], [-a, 1])


def criterion_1():
    t0 = time.perf_counter()
    res = nu_metric(zero_plant(1, 1, 3), zero_plant(1, 1, 3.2))
    elapsed = time.perf_counter() - t0
    want, case = closed_form_zero_uncertainty(1, 1, 3, 3.2)
    err = abs(res.value - want)
    ok = err <= 1e-3 and elapsed <= 60 and case.case.value == "case1"
    return ok, f"value={res.value:.10f} closed_form={want:.10f} |err|={err:.2e} runtime={elapsed:.2f}s"


def criterion_2():
    res = nu_metric(zero_plant(1, 1, 0.5), zero_plant(1, 1, 0.6))
    want, case = closed_form_zero_uncertainty(1, 1, 0.5, 0.6)
    err = abs(res.value - want)
    arg = res.norm_search.argmax_omega
    ok = err <= 1e-3 and abs(arg) <= 1e-3 and case.case.value == "case2"
    return ok, f"value={res.value:.10f} closed_form={want:.10f} |err|={err:.2e} argmax_omega={arg:.3g}"


def criterion_3():
    res = nu_metric(pole_plant(1, 1), pole_plant(1, 1.05))
    want = closed_form_pole_uncertainty(1, 1.05)
    err = abs(res.value - want)
    return err <= 1e-3, f"value={res.value:.10f} closed_form={want:.10f} |err|={err:.2e}"


def criterion_4():
    res = nu_metric(pole_plant(1, 1), pole_plant(1.5, 1))
    delta = res.options.delta
    tail = [(r, m) for r, m in res.margin_curve if r >= 0.99]
    slope = decay_slope(*zip(*tail))
    final = tail[-1][1]
    ok = res.value == 1.0 and res.branch is Branch.UNITY and final < delta and slope > 0
    return ok, (
        f"value={res.value} branch={res.branch.value} final_margin={final:.3g} "
        f"delta={delta:g} log-log decay slope={slope:.3f}"
    )


def random_admissible_plant(rng):
    while True:
        n = int(rng.integers(0, 7))
        m = int(rng.integers(0, n + 1))
        den = Polynomial(rng.normal(size=n + 1))
        num = Polynomial(rng.normal(size=m + 1))
        delay = float(rng.uniform(0, 3))
        if den.degree == n and not DelayRationalPlant.problems(delay, num, den):
            return DelayRationalPlant(delay, num, den)


def criterion_5():
    rng = np.random.default_rng(5)
    pos = np.geomspace(1e-3, 1e4, 500)
    omega = np.concatenate([-pos[::-1], pos])
    worst = 0.0
    for _ in range(100):
        pair = normalized_coprime_factorization(random_admissible_plant(rng))
        worst = max(worst, validate_normalization(pair, omega))
    return worst <= 1e-10, f"100 plants, {omega.size} frequencies, worst residual={worst:.2e}"


def criterion_6():
    rng = np.random.default_rng(6)
    failures = 0
    for _ in range(200):
        r = float(rng.uniform(0.2, 0.97))

        def draw(k):
            pts = []
            while len(pts) < k:
                z = rng.uniform(0, 1.5) * np.exp(1j * rng.uniform(0, 2 * np.pi))
                if abs(abs(z) - r) >= 0.01:
                    pts.append(z)
            return np.array(pts, dtype=complex)

        zeros, poles = draw(int(rng.integers(0, 7))), draw(int(rng.integers(0, 7)))
        c = complex(rng.normal(), rng.normal())

        def f(z, zeros=zeros, poles=poles, c=c):
            z = np.asarray(z)[..., None]
            return c * np.prod(z - zeros, axis=-1) / np.prod(z - poles, axis=-1)

        expected = int(np.sum(np.abs(zeros) < r)) - int(np.sum(np.abs(poles) < r))
        if winding_on_circle(BoundaryFunction(f, DISK), r).winding != expected:
            failures += 1
    return failures == 0, f"200 rational functions, failures={failures}"


@functools.lru_cache(maxsize=None)
def family_triples():
    """Triples from the zero-uncertainty family whose three pairs all pass the lemma check."""
    rng = np.random.default_rng(7)
    out = []
    while len(out) < 50:
        T = float(rng.uniform(0.5, 1.5))
        b = float(rng.uniform(0.5, 1.5))
        ratio = float(rng.uniform(2.5, 4.0)) if rng.random() < 0.5 else float(rng.uniform(0.2, 0.8))
        a = [b * ratio + float(rng.uniform(-0.05, 0.05)) * b for _ in range(3)]
        grid = lemma_grid(n_axis=20_001, n_circle=1024)
        pairs = [(0, 1), (1, 2), (0, 2)]
        if all(lemma_positivity_check(T, b, a[i], a[j], grid)[0] for i, j in pairs):
            out.append((T, b, tuple(a)))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def limit_metric(T, b, a1, a2):
    return nu_metric(zero_plant(T, b, a1), zero_plant(T, b, a2))


def criterion_7():
    worst_self, worst_sym, worst_tri = 0.0, 0.0, -math.inf
    for T, b, (a1, a2, a3) in family_triples():
        d_self = nu_metric(zero_plant(T, b, a1), zero_plant(T, b, a1)).value
        d12, d23, d13 = (limit_metric(T, b, x, y).value for x, y in ((a1, a2), (a2, a3), (a1, a3)))
        d21 = limit_metric(T, b, a2, a1).value
        worst_self = max(worst_self, abs(d_self))
        worst_sym = max(worst_sym, abs(d12 - d21))
        worst_tri = max(worst_tri, d13 - d12 - d23)
    ok = worst_self == 0 and worst_sym <= 1e-9 and worst_tri <= 1e-6
    return ok, (
        f"50 triples: max d(P,P)={worst_self:g} max asymmetry={worst_sym:.2e} "
        f"max triangle excess={worst_tri:.2e}"
    )


def criterion_8():
    worst, mismatched = 0.0, 0
    for T, b, (a1, a2, _) in family_triples():
        lim = limit_metric(T, b, a1, a2)
        for rho in (0.9, 0.99):
            fr = nu_metric_fixed_rho(zero_plant(T, b, a1), zero_plant(T, b, a2), rho)
            mismatched += fr.branch is not lim.branch
            worst = max(worst, abs(fr.value - lim.value))
    ok = mismatched == 0 and worst <= 1e-6
    return ok, f"50 pairs x rho in (0.9, 0.99): branch mismatches={mismatched} max |diff|={worst:.2e}"


def criterion_9():
    rng = np.random.default_rng(9)
    radii = (0.9, 0.99, 0.999, 0.9999)
    worst_final, monotone = 0.0, True
    ratios = []
    for _ in range(20):
        n = int(rng.integers(1, 5))
        poles = []
        while len(poles) < n:
            if n - len(poles) >= 2 and rng.random() < 0.5:
                p = complex(-rng.uniform(0.05, 2), rng.uniform(0.1, 5))
                poles += [p, p.conjugate()]
            else:
                poles.append(-rng.uniform(0.1, 3))
        den = Polynomial.from_roots(poles)
        num = Polynomial(rng.normal(size=int(rng.integers(1, n + 2))))
        expr = DelayRational.single(0.0, num, den)
        norm = hinf_norm(BoundaryFunction.from_expr(expr)).value

        def on_disk(z, expr=expr):
            return expr((1 + z) / (1 - z))

        sups = [circle_sup(BoundaryFunction(on_disk, DISK), r) for r in radii]
        monotone &= all(y >= x * (1 - 1e-12) for x, y in zip(sups, sups[1:]))
        gaps = [norm - s for s in sups]
        worst_final = max(worst_final, abs(gaps[-1]))
        ratios.append(gaps[-1] / max(gaps[-2], 1e-300))
    ok = monotone and worst_final <= 1e-6
    return ok, (
        f"20 functions: monotone={monotone} max |sup(T_0.9999) - norm|={worst_final:.2e} "
        f"(tolerance 1e-06); median gap ratio per decade={np.median(ratios):.3f}"
    )


def criterion_10():
    grid = lemma_grid()
    details, ok = [], len(grid) >= 100_000
    for a1, a2 in ((3.0, 3.2), (0.5, 0.6)):
        holds, m = lemma_positivity_check(1, 1, a1, a2, grid)
        ok &= holds and m > 0
        details.append(f"({a1}, {a2}): m_observed={m:.3e}")
    return ok, f"{len(grid)} points; " + "; ".join(details)


CRITERIA = {
    1: ("case-1 reproduction", criterion_1),
    2: ("case-2 reproduction", criterion_2),
    3: ("pole-uncertainty reproduction", criterion_3),
    4: ("delay mismatch", criterion_4),
    5: ("normalization", criterion_5),
    6: ("winding oracle", criterion_6),
    7: ("metric axioms", criterion_7),
    8: ("route equivalence", criterion_8),
    9: ("annulus sup convergence", criterion_9),
    10: ("lemma positivity", criterion_10),
}


def run(number):
    name, fn = CRITERIA[number]
    ok, detail = fn()
    line = f"{'PASS' if ok else 'FAIL'} criterion {number} ({name}): {detail}"
    REPORT.append(line)
    print(line)
    return ok, line


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    ok, line = run(number)
    assert ok, line


if __name__ == "__main__":
    results = [run(k)[0] for k in sorted(CRITERIA)]
    sys.exit(0 if all(results) else 1)
