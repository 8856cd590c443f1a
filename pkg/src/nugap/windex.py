"""Winding numbers on circles ``|z| = r``, their limit as ``r -> 1``, and
the invertibility probe.

Circles for half-plane evaluators are traversed on their Moebius image,
parametrized by the angle seen from the image circle's centre (``t = 0`` is
the point nearest the imaginary axis). The base grid is multi-scale so that
frequencies from ``|w| ~ 1`` up to the circle's radius are all resolved;
intervals are then bisected until every phase step is below ``pi/2`` and
consecutive values agree to a chordal tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .boundary import DISK, BoundaryFunction
from .errors import NonFiniteError, NonStabilizedError, ZeroOnContourError
from .hnorm import golden_max

DEFAULT_INITIAL_N = 1024
DEFAULT_BUDGET = 1 << 22
DEFAULT_DELTA = 1e-4
DEFAULT_DEPTH = 32
CHORD = 0.5
ZERO_FLOOR = 1e-13
TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class RadiusSchedule:
    radii: tuple
    stabilization_count: int = 4

    def __post_init__(self):
        r = tuple(float(x) for x in self.radii)
        object.__setattr__(self, "radii", r)
        if not r:
            raise ValueError("schedule is empty")
        if any(not 0 < x < 1 for x in r):
            raise ValueError("radii must lie in (0, 1)")
        if any(b <= a for a, b in zip(r, r[1:])):
            raise ValueError("radii must be strictly increasing")
        if r[-1] < 0.99:
            raise ValueError("last radius must be at least 0.99")
        if not 1 <= self.stabilization_count <= len(r):
            raise ValueError("stabilization_count must be between 1 and the number of radii")

    @classmethod
    def geometric(cls, r_max: float | None = None, stabilization_count: int = 4) -> "RadiusSchedule":
        """Radii ``1 - 2**-(k+1)``, ``k = 1, 2, ...`` up to ``r_max``.

        The default depth ends at ``1 - 2**-33``.
        """
        if r_max is None:
            r_max = 1.0 - 2.0 ** -(DEFAULT_DEPTH + 1)
        if not 0.75 <= r_max < 1:
            raise ValueError("r_max must lie in [0.75, 1)")
        radii = []
        k = 1
        while 1.0 - 2.0 ** -(k + 1) <= r_max:
            radii.append(1.0 - 2.0 ** -(k + 1))
            k += 1
        if radii[-1] < r_max:
            radii.append(r_max)
        return cls(tuple(radii), stabilization_count)

    @property
    def tail(self) -> tuple:
        return self.radii[-self.stabilization_count:]


@dataclass(frozen=True)
class WindingResult:
    winding: Optional[int]
    min_modulus: float
    samples_used: int
    converged: bool
    radius: float = math.nan
    argument: float = math.nan


def _image_circle(eps: float):
    """Leftmost point and radius of the image of ``|z| = 1 - eps``."""
    return eps / (2.0 - eps), 2.0 * (1.0 - eps) / (eps * (2.0 - eps))


def circle_points(coordinate: str, eps: float, t: np.ndarray) -> np.ndarray:
    """Points of the circle ``|z| = 1 - eps`` in ``coordinate``, counterclockwise in ``t``."""
    t = np.asarray(t, dtype=float)
    if coordinate == DISK:
        return (1.0 - eps) * np.exp(1j * t)
    left, R = _image_circle(eps)
    # c + R e^{i(pi + t)} written without cancellation near t = 0
    return left + R * (2.0 * np.sin(t / 2) ** 2 - 1j * np.sin(t))


def _base_grid(coordinate: str, eps: float, n: int) -> np.ndarray:
    u = -math.pi + TWO_PI * (np.arange(n) + 0.5) / n
    if coordinate == DISK:
        return u
    _, R = _image_circle(eps)
    grids = [u]
    kappa = 0.25
    while R * kappa >= 0.25:
        grids.append(2.0 * np.arctan(kappa * np.tan(u / 2)))
        kappa *= 0.25
    return np.unique(np.concatenate(grids))


def _steps(t, v):
    gap = np.diff(t, append=t[0] + TWO_PI)
    vn = np.roll(v, -1)
    dphi = np.angle(vn * np.conj(v))
    chord = np.abs(vn - v) > CHORD * np.minimum(np.abs(v), np.abs(vn))
    return gap, dphi, chord


def _polish_min(f: BoundaryFunction, eps: float, t: np.ndarray, mods: np.ndarray) -> float:
    k = int(np.argmin(mods))
    n = len(t)
    lo = t[k - 1] if k > 0 else t[-1] - TWO_PI
    hi = t[k + 1] if k < n - 1 else t[0] + TWO_PI

    def neg_mod(x):
        return -float(np.abs(f(circle_points(f.coordinate, eps, [x]))[0]))

    _, fx, _ = golden_max(neg_mod, lo, hi, 1e-14 * max(1.0, abs(t[k])), maxiter=120)
    return min(float(mods[k]), -fx)


def scan_circle(
    f: BoundaryFunction,
    r: float,
    initial_n: int = DEFAULT_INITIAL_N,
    budget: int = DEFAULT_BUDGET,
) -> WindingResult:
    """Winding number and minimum modulus of scalar ``f`` on ``|z| = r``.

    Raises ZeroOnContourError when ``f`` (numerically) vanishes on the circle.
    """
    if not f.is_scalar:
        raise ValueError("winding numbers need a scalar boundary function")
    if not 0 < r < 1:
        raise ValueError(f"radius must lie in (0, 1), got {r}")
    eps = 1.0 - r
    t = _base_grid(f.coordinate, eps, initial_n)
    v = f(circle_points(f.coordinate, eps, t))
    converged = False
    while True:
        if not np.all(np.isfinite(v)):
            raise NonFiniteError(f"non-finite value on the circle r = {r}")
        mods = np.abs(v)
        peak = float(np.max(mods))
        if float(np.min(mods)) <= ZERO_FLOOR * max(peak, 1e-300):
            raise ZeroOnContourError(f"function vanishes on the circle r = {r}")
        gap, dphi, chord = _steps(t, v)
        bad = (np.abs(dphi) >= math.pi / 2) | chord
        if not np.any(bad):
            converged = True
            break
        # intervals already at float resolution cannot be split further
        splittable = bad & (gap > 8 * np.finfo(float).eps * (1.0 + np.abs(t)))
        if not np.any(splittable) or len(t) + int(np.count_nonzero(splittable)) > budget:
            break
        mids = t[splittable] + 0.5 * gap[splittable]
        mids = np.where(mids >= math.pi, mids - TWO_PI, mids)
        vm = f(circle_points(f.coordinate, eps, mids))
        t = np.concatenate([t, mids])
        v = np.concatenate([v, vm])
        order = np.argsort(t, kind="stable")
        t, v = t[order], v[order]

    mods = np.abs(v)
    _, dphi, _ = _steps(t, v)
    arg = float(np.sum(dphi))
    winding = int(round(arg / TWO_PI))
    if abs(arg - TWO_PI * winding) > 0.1:
        converged = False
    min_mod = _polish_min(f, eps, t, mods)
    if min_mod <= ZERO_FLOOR * max(float(np.max(mods)), 1e-300):
        raise ZeroOnContourError(f"function vanishes on the circle r = {r}")
    return WindingResult(winding, min_mod, len(t), converged, r, arg)


def winding_on_circle(f: BoundaryFunction, r: float, initial_n: int = DEFAULT_INITIAL_N, budget: int = DEFAULT_BUDGET) -> WindingResult:
    return scan_circle(f, r, initial_n, budget)


def scan_schedule(f: BoundaryFunction, radii, initial_n: int = DEFAULT_INITIAL_N, budget: int = DEFAULT_BUDGET) -> list:
    """Scan every radius; a zero on a circle is recorded as ``winding=None``."""
    out = []
    for r in radii:
        try:
            out.append(scan_circle(f, r, initial_n, budget))
        except ZeroOnContourError:
            out.append(WindingResult(None, 0.0, 0, False, r))
    return out


@dataclass(frozen=True)
class IndexResult:
    W: int
    radii: tuple
    windings: tuple
    scans: tuple


def stabilized_winding(scans, count: int) -> int:
    tail = scans[-count:]
    bad = [s.radius for s in tail if s.winding is None or not s.converged]
    if bad:
        raise NonStabilizedError(f"winding unresolved on radii {bad}")
    values = {s.winding for s in tail}
    if len(values) != 1:
        seq = [(s.radius, s.winding) for s in tail]
        raise NonStabilizedError(f"tail windings disagree: {seq}")
    return values.pop()


def limit_index_W(
    f: BoundaryFunction,
    schedule: RadiusSchedule | None = None,
    initial_n: int = DEFAULT_INITIAL_N,
    budget: int = DEFAULT_BUDGET,
) -> IndexResult:
    """Stabilized winding number as ``r -> 1`` along the schedule."""
    schedule = schedule or RadiusSchedule.geometric()
    scans = scan_schedule(f, schedule.radii, initial_n, budget)
    W = stabilized_winding(scans, schedule.stabilization_count)
    return IndexResult(W, schedule.radii, tuple(s.winding for s in scans), tuple(scans))


@dataclass(frozen=True)
class ProbeReport:
    invertible: bool
    margin: float
    margin_curve: tuple
    decay_slope: float


def decay_slope(radii, margins) -> float:
    """Slope of ``log(margin)`` against ``log(1 - r)``; positive means decaying to 0."""
    x = np.log1p(-np.asarray(radii, dtype=float))
    y = np.log(np.maximum(np.asarray(margins, dtype=float), 1e-300))
    if len(x) < 2:
        return 0.0
    return float(np.polyfit(x, y, 1)[0])


def probe_from_scans(scans, count: int, delta: float) -> ProbeReport:
    curve = tuple((s.radius, s.min_modulus) for s in scans)
    tail = scans[-count:]
    margin = min(s.min_modulus for s in tail)
    slope = decay_slope([s.radius for s in tail], [s.min_modulus for s in tail])
    return ProbeReport(margin >= delta, margin, curve, slope)


def invertibility_probe(
    f: BoundaryFunction,
    schedule: RadiusSchedule | None = None,
    delta: float = DEFAULT_DELTA,
    initial_n: int = DEFAULT_INITIAL_N,
    budget: int = DEFAULT_BUDGET,
) -> ProbeReport:
    """Whether ``|f|`` stays at least ``delta`` on the tail circles."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    schedule = schedule or RadiusSchedule.geometric()
    scans = scan_schedule(f, schedule.radii, initial_n, budget)
    return probe_from_scans(scans, schedule.stabilization_count, delta)


def det_boundary(f: BoundaryFunction) -> BoundaryFunction:
    """Pointwise determinant (LU with partial pivoting)."""
    if f.is_scalar:
        return f
    p, m = f.shape
    if p != m:
        raise ValueError(f"determinant needs square values, got {f.shape}")
    if p == 1:
        return BoundaryFunction(lambda x: f(x)[:, 0, 0], f.coordinate, (), None, f.real_symmetric, f.holomorphic)
    return BoundaryFunction(
        lambda x: np.linalg.det(f(x)), f.coordinate, (), None, f.real_symmetric, f.holomorphic
    )
