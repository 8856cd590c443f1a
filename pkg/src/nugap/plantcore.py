"""Polynomials, delay-rational plants and the disk/half-plane transport.

Coefficients are stored in ascending degree order throughout, so
``Polynomial((-3.0, 1.0))`` is ``s - 3``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import PlantSpecError, PoleEvaluationError, SingularPointError

TRIM_REL = 1e-14
PAIR_REL = 1e-8
POLE_FLOOR = 1e-300


def _check_finite(x):
    arr = np.asarray(x)
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite evaluation point")
    return arr


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial in ``s`` with ascending coefficients."""

    coefficients: tuple

    def __init__(self, coefficients: Sequence[float] = (0.0,)):
        c = [float(x) for x in coefficients] or [0.0]
        if not all(math.isfinite(x) for x in c):
            raise ValueError(f"non-finite coefficient in {coefficients!r}")
        scale = max(abs(x) for x in c)
        while len(c) > 1 and abs(c[-1]) <= TRIM_REL * scale:
            c.pop()
        if scale == 0.0:
            c = [0.0]
        object.__setattr__(self, "coefficients", tuple(c))

    @classmethod
    def from_roots(cls, roots, lead: float = 1.0) -> "Polynomial":
        c = npoly.polyfromroots(np.asarray(roots, dtype=complex)) * lead
        if np.max(np.abs(c.imag), initial=0.0) > 1e-9 * max(1.0, np.max(np.abs(c))):
            raise ValueError("roots do not close under conjugation")
        return cls(c.real)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def lead(self) -> float:
        return self.coefficients[-1]

    def is_zero(self) -> bool:
        return self.coefficients == (0.0,)

    def __call__(self, s):
        # Horner; a real point with real coefficients stays exactly real
        s = np.asarray(s)
        acc = np.zeros_like(s, dtype=np.result_type(s, float)) + self.coefficients[-1]
        for c in reversed(self.coefficients[:-1]):
            acc = acc * s + c
        return acc

    def reversed_eval(self, w, degree: int):
        """Evaluate ``w**degree * p(1/w)`` (the reversal padded to ``degree``)."""
        w = np.asarray(w)
        c = list(self.coefficients) + [0.0] * (degree - self.degree)
        acc = np.zeros_like(w, dtype=np.result_type(w, float)) + c[0]
        for coef in c[1:]:
            acc = acc * w + coef
        return acc

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(npoly.polyadd(self.coefficients, other.coefficients))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(npoly.polysub(self.coefficients, other.coefficients))

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return Polynomial(npoly.polymul(self.coefficients, other.coefficients))
        return Polynomial(np.asarray(self.coefficients) * float(other))

    __rmul__ = __mul__

    def __neg__(self) -> "Polynomial":
        return self * -1.0

    def reflect(self) -> "Polynomial":
        """Return ``p(-s)``."""
        c = np.asarray(self.coefficients)
        return Polynomial(c * (-1.0) ** np.arange(len(c)))

    def derivative(self) -> "Polynomial":
        return Polynomial(npoly.polyder(self.coefficients) if self.degree else [0.0])

    def roots(self) -> np.ndarray:
        """Companion-matrix eigenvalues, each polished by one Newton step."""
        if self.degree < 1:
            return np.zeros(0, dtype=complex)
        if self.degree == 1:
            return np.array([-self.coefficients[0] / self.coefficients[1]], dtype=complex)
        comp = npoly.polycompanion(self.coefficients)
        z = np.linalg.eigvals(comp).astype(complex)
        dp = self.derivative()
        val, slope = self(z), dp(z)
        ok = np.abs(slope) > 1e-300
        z[ok] = z[ok] - val[ok] / slope[ok]
        return z


def poly_eval(p: Polynomial, s):
    return p(_check_finite(s))


def find_common_root(q: Polynomial, p: Polynomial, rel: float = PAIR_REL):
    """Return a root shared by ``q`` and ``p`` (within tolerance) or None."""
    if q.is_zero() or p.is_zero():
        return None
    rq, rp = q.roots(), p.roots()
    for a in rq:
        for b in rp:
            if abs(a - b) < rel * (1.0 + abs(a)):
                return 0.5 * (a + b)
    return None


def format_root(z: complex) -> str:
    z = complex(z)
    if abs(z.imag) <= 1e-9 * (1.0 + abs(z.real)):
        return f"{z.real:.10g}"
    return f"{z.real:.10g}{z.imag:+.10g}j"


@dataclass(frozen=True)
class DelayRationalPlant:
    """``P(s) = exp(-s*delay) * num(s) / den(s)``."""

    delay: float
    num: Polynomial
    den: Polynomial

    def __post_init__(self):
        problems = self.problems(self.delay, self.num, self.den)
        if problems:
            raise PlantSpecError(problems)
        object.__setattr__(self, "delay", float(self.delay))

    @staticmethod
    def problems(delay, num: Polynomial, den: Polynomial) -> list:
        out = []
        try:
            d = float(delay)
            if not math.isfinite(d) or d < 0:
                out.append(f"delay must be a finite nonnegative number, got {delay!r}")
        except (TypeError, ValueError):
            out.append(f"delay must be a number, got {delay!r}")
        if den.is_zero():
            out.append("denominator identically zero")
        else:
            if not num.is_zero() and num.degree > den.degree:
                out.append(
                    f"improper plant: numerator degree {num.degree} exceeds "
                    f"denominator degree {den.degree}"
                )
            root = find_common_root(num, den)
            if root is not None:
                out.append(f"common root at {format_root(root)}")
        return out

    @classmethod
    def from_coefficients(cls, delay, num, den) -> "DelayRationalPlant":
        return cls(delay, Polynomial(num), Polynomial(den))

    def __call__(self, s):
        return plant_eval(self, s)


def plant_eval(plant: DelayRationalPlant, s):
    s = _check_finite(s)
    den = plant.den(s)
    if np.any(np.abs(den) < POLE_FLOOR):
        raise PoleEvaluationError("plant evaluated at a pole")
    val = plant.num(s) / den
    if plant.delay:
        val = np.exp(-s * plant.delay) * val
    return val


def mobius_to_halfplane(z):
    """``(1 + z) / (1 - z)``: the unit disk onto the open right half-plane."""
    z = _check_finite(z)
    if np.any(z == 1):
        raise SingularPointError("z = 1 has no finite image")
    return (1 + z) / (1 - z)


def halfplane_to_disk(s):
    s = np.asarray(s)
    if np.any(s == -1):
        raise SingularPointError("s = -1 has no image in the disk")
    return (s - 1) / (s + 1)


def circle_samples(r: float, n: int) -> np.ndarray:
    if not 0 < r < 1:
        raise ValueError(f"radius must lie in (0, 1), got {r}")
    if n < 1:
        raise ValueError("need at least one sample")
    theta = 2 * np.pi * np.arange(n) / n
    return r * np.exp(1j * theta)


@dataclass(frozen=True)
class RationalTerm:
    num: Polynomial
    den: Polynomial

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        out = np.empty_like(s)
        small = np.abs(s) <= 1.0
        if np.any(small):
            out[small] = self.num(s[small]) / self.den(s[small])
        big = ~small
        if np.any(big):
            # evaluate in 1/s to avoid overflow of high powers
            w = 1.0 / s[big]
            n, d = self.num.degree, self.den.degree
            k = max(n, d)
            out[big] = self.num.reversed_eval(w, k) / self.den.reversed_eval(w, k)
        return out

    def limit_at_infinity(self) -> complex:
        if self.num.is_zero():
            return 0.0
        if self.num.degree < self.den.degree:
            return 0.0
        if self.num.degree == self.den.degree:
            return self.num.lead / self.den.lead
        return math.inf


@dataclass(frozen=True)
class DelayRational:
    """Finite sum of terms ``exp(-s*tau) * num(s)/den(s)``.

    Closed under addition and multiplication; this is the exact symbolic
    form of every SISO factor and residual built from delay-rational plants.
    """

    terms: tuple = field(default=())

    @classmethod
    def single(cls, delay: float, num: Polynomial, den: Polynomial) -> "DelayRational":
        if num.is_zero():
            return cls(())
        return cls(((float(delay), RationalTerm(num, den)),))

    @classmethod
    def _collect(cls, pairs) -> "DelayRational":
        acc: dict = {}
        for tau, term in pairs:
            if tau in acc:
                prev = acc[tau]
                if prev.den == term.den:
                    acc[tau] = RationalTerm(prev.num + term.num, prev.den)
                else:
                    acc[tau] = RationalTerm(
                        prev.num * term.den + term.num * prev.den, prev.den * term.den
                    )
            else:
                acc[tau] = term
        kept = tuple((tau, t) for tau, t in sorted(acc.items()) if not t.num.is_zero())
        return cls(kept)

    def __add__(self, other: "DelayRational") -> "DelayRational":
        return self._collect(self.terms + other.terms)

    def __neg__(self) -> "DelayRational":
        return DelayRational(tuple((tau, RationalTerm(-t.num, t.den)) for tau, t in self.terms))

    def __sub__(self, other: "DelayRational") -> "DelayRational":
        return self + (-other)

    def __mul__(self, other: "DelayRational") -> "DelayRational":
        pairs = []
        for ta, a in self.terms:
            for tb, b in other.terms:
                pairs.append((ta + tb, RationalTerm(a.num * b.num, a.den * b.den)))
        return self._collect(pairs)

    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        out = np.zeros_like(s)
        for tau, term in self.terms:
            val = term(s)
            if tau:
                val = np.exp(-s * tau) * val
            out = out + val
        return out

    def tail_sup(self, probe_points: int = 200_000) -> float:
        """Limit superior of ``|F(i w)|`` as ``|w| -> inf``.

        The delay factors have unit modulus on the imaginary axis, so the tail
        is the almost-periodic sum of the leading-coefficient limits.
        """
        limits = [(tau, term.limit_at_infinity()) for tau, term in self.terms]
        limits = [(tau, c) for tau, c in limits if c != 0]
        if any(c == math.inf for _, c in limits):
            return math.inf
        if len(limits) <= 2:
            return float(sum(abs(c) for _, c in limits))
        # three or more delays: sample the trigonometric sum over a long window
        w = np.linspace(0.0, 2e4, probe_points)
        total = sum(c * np.exp(-1j * w * tau) for tau, c in limits)
        return float(np.max(np.abs(total)))
