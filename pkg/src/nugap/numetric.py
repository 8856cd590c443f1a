"""The extended nu-gap metric between stabilizable plants over H-infinity.

``d(P1, P2) = ||Gtilde2 G1||_inf`` when ``det(G1* G2)`` is invertible near the
boundary with zero limiting winding number, and 1 otherwise.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Optional, Union

import numpy as np

from . import __version__
from .boundary import HALFPLANE, BoundaryFunction
from .errors import DomainError, InconclusiveError, NormalizationError, NuGapError, ShapeMismatchError
from .hnorm import NormSearchResult, hinf_norm
from .ncf import CoprimePair, normalized_coprime_factorization, validate_normalization
from .plantcore import DelayRationalPlant
from .windex import (
    DEFAULT_BUDGET,
    DEFAULT_DELTA,
    DEFAULT_INITIAL_N,
    RadiusSchedule,
    WindingResult,
    circle_points,
    decay_slope,
    det_boundary,
    scan_schedule,
)

PlantLike = Union[DelayRationalPlant, CoprimePair]


class Branch(str, Enum):
    NORM = "norm_branch"
    UNITY = "unity_branch"


class Route(str, Enum):
    LIMIT = "limit_route"
    FIXED_RHO = "fixed_rho_route"


@dataclass(frozen=True)
class NuOptions:
    """Numerical knobs of the metric computation.

    ``hover`` sets the inconclusive band ``[delta/hover, delta*hover]`` for
    the boundary margin; ``max_decay_slope`` rejects margins that are still
    falling like a power of ``1 - r`` at the end of the schedule.
    """

    delta: float = DEFAULT_DELTA
    schedule: RadiusSchedule = field(default_factory=RadiusSchedule.geometric)
    initial_n: int = DEFAULT_INITIAL_N
    sample_budget: int = DEFAULT_BUDGET
    omega_max: float = 1e6
    coarse_n: int = 4096
    hover: float = 2.0
    max_decay_slope: float = 0.25
    normalization_tol: float = 1e-6

    def __post_init__(self):
        for name in ("delta", "omega_max", "normalization_tol", "max_decay_slope"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.hover < 1:
            raise ValueError("hover must be at least 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schedule"] = {
            "radii": list(self.schedule.radii),
            "stabilization_count": self.schedule.stabilization_count,
        }
        return d


@dataclass(frozen=True)
class NuResult:
    value: float
    branch: Branch
    invertible: bool
    winding: Optional[int]
    margin_curve: tuple
    norm_search: Optional[NormSearchResult]
    route: Route
    rho: Optional[float]
    winding_sequence: tuple = ()
    options: Optional[NuOptions] = None

    def to_dict(self) -> dict:
        ns = self.norm_search
        return {
            "tool": "nugap",
            "version": __version__,
            "value": self.value,
            "branch": self.branch.value,
            "invertible": self.invertible,
            "winding": self.winding,
            "route": self.route.value,
            "rho": self.rho,
            "margin_curve": [list(p) for p in self.margin_curve],
            "winding_sequence": [
                {
                    "r": s.radius,
                    "winding": s.winding,
                    "min_modulus": s.min_modulus,
                    "samples_used": s.samples_used,
                    "converged": s.converged,
                }
                for s in self.winding_sequence
            ],
            "norm_search": None
            if ns is None
            else {
                "value": ns.value,
                "argmax_omega": _json_float(ns.argmax_omega),
                "refined": ns.refined,
                "tail": ns.tail,
                "trace": [list(p) for p in ns.trace],
            },
            "options": None if self.options is None else self.options.to_dict(),
        }


def _json_float(x):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def as_pair(P: PlantLike, options: NuOptions | None = None) -> CoprimePair:
    options = options or NuOptions()
    if isinstance(P, DelayRationalPlant):
        return normalized_coprime_factorization(P)
    if isinstance(P, CoprimePair):
        if P.spectral is None:
            res = validate_normalization(P)
            if res > options.normalization_tol:
                raise NormalizationError(
                    f"factor pair violates normalization by {res:.3g} "
                    f"(tolerance {options.normalization_tol:g})"
                )
        return P
    raise TypeError(f"expected a DelayRationalPlant or CoprimePair, got {type(P).__name__}")


def _check_shapes(pair1: CoprimePair, pair2: CoprimePair):
    if (pair1.p, pair1.m) != (pair2.p, pair2.m):
        raise ShapeMismatchError(
            f"plant sizes differ: {pair1.p}x{pair1.m} vs {pair2.p}x{pair2.m}"
        )


def cross_gram(pair1: CoprimePair, pair2: CoprimePair) -> BoundaryFunction:
    """``s -> G1(s)* G2(s)`` with pointwise conjugate transposition."""
    _check_shapes(pair1, pair2)
    real = all(f.real_symmetric for f in (pair1.N, pair1.D, pair2.N, pair2.D))
    if pair1.is_siso and pair2.is_siso:
        def ev(s):
            return np.conj(pair1.N.on_halfplane(s)) * pair2.N.on_halfplane(s) + np.conj(
                pair1.D.on_halfplane(s)
            ) * pair2.D.on_halfplane(s)

        return BoundaryFunction(ev, HALFPLANE, (), None, real, holomorphic=False)

    def ev_mat(s):
        G1 = pair1.G(s)
        return np.conj(np.swapaxes(G1, -1, -2)) @ pair2.G(s)

    return BoundaryFunction(ev_mat, HALFPLANE, (pair1.m, pair1.m), None, real, holomorphic=False)


def parallel_residual(pair1: CoprimePair, pair2: CoprimePair) -> BoundaryFunction:
    """``Gtilde2 G1 = -Dtilde2 N1 + Ntilde2 D1``."""
    _check_shapes(pair1, pair2)
    exprs = (pair1.N.expr, pair1.D.expr, pair2.Ntilde.expr, pair2.Dtilde.expr)
    if pair1.is_siso and pair2.is_siso and all(e is not None for e in exprs):
        n1, d1, nt2, dt2 = exprs
        return BoundaryFunction.from_expr(nt2 * d1 - dt2 * n1)
    real = all(f.real_symmetric for f in (pair1.N, pair1.D, pair2.Ntilde, pair2.Dtilde))
    if pair1.is_siso and pair2.is_siso:
        def ev(s):
            return -pair2.Dtilde.on_halfplane(s) * pair1.N.on_halfplane(s) + pair2.Ntilde.on_halfplane(
                s
            ) * pair1.D.on_halfplane(s)

        return BoundaryFunction(ev, HALFPLANE, (), None, real)
    return BoundaryFunction(
        lambda s: pair2.Gtilde(s) @ pair1.G(s), HALFPLANE, (pair1.p, pair1.m), None, real
    )


def _decide(pair1, pair2, options: NuOptions, rho: Optional[float]) -> NuResult:
    schedule = options.schedule
    if rho is None:
        radii = schedule.radii
        decision = schedule.stabilization_count
        route = Route.LIMIT
    else:
        if not 0 < rho < schedule.radii[-1]:
            raise ValueError(f"rho must lie in (0, {schedule.radii[-1]}), got {rho}")
        radii = tuple(r for r in schedule.radii if r > rho)
        decision = len(radii)
        route = Route.FIXED_RHO

    f = det_boundary(cross_gram(pair1, pair2))
    scans = scan_schedule(f, radii, options.initial_n, options.sample_budget)
    used = scans[-decision:]
    curve = tuple((s.radius, s.min_modulus) for s in scans)
    margin = min(s.min_modulus for s in used)
    windings = {s.winding for s in used}
    winding = windings.pop() if len(windings) == 1 and None not in windings else None

    def result(value, branch, invertible, norm=None):
        return NuResult(value, branch, invertible, winding, curve, norm, route, rho, tuple(scans), options)

    diagnostics = {"margin": margin, "margin_curve": curve, "route": route.value, "rho": rho}
    # a sampled minimum bounds the true minimum from above
    if margin < options.delta / options.hover:
        return result(1.0, Branch.UNITY, False)
    if margin < options.delta * options.hover:
        raise InconclusiveError(
            f"boundary margin {margin:.3g} is within a factor {options.hover:g} of delta", diagnostics
        )
    unresolved = [s.radius for s in used if not s.converged]
    if unresolved:
        raise InconclusiveError(f"sampling budget exhausted on radii {unresolved}", diagnostics)
    tail = used[-schedule.stabilization_count:]
    slope = decay_slope([s.radius for s in tail], [s.min_modulus for s in tail])
    if slope > options.max_decay_slope:
        raise InconclusiveError(
            f"boundary margin still decaying (log-log slope {slope:.2f}); extend the schedule",
            diagnostics,
        )
    if winding is None:
        seq = [(s.radius, s.winding) for s in used]
        raise InconclusiveError(f"winding numbers did not stabilize: {seq}", diagnostics)
    if winding != 0:
        return result(1.0, Branch.UNITY, True)

    norm = hinf_norm(parallel_residual(pair1, pair2), options.omega_max, options.coarse_n)
    value = norm.value
    if value > 1.0 + 1e-9:
        raise NuGapError(f"residual norm {value:.6g} exceeds 1; factors are not normalized")
    return result(min(value, 1.0), Branch.NORM, True, norm)


def nu_metric(P1: PlantLike, P2: PlantLike, options: NuOptions | None = None) -> NuResult:
    """Metric via the limit ``r -> 1`` of winding numbers on the schedule's tail."""
    options = options or NuOptions()
    return _decide(as_pair(P1, options), as_pair(P2, options), options, None)


def nu_metric_fixed_rho(
    P1: PlantLike, P2: PlantLike, rho: float, options: NuOptions | None = None
) -> NuResult:
    """Metric with invertibility and winding checked on every circle ``r > rho``."""
    options = options or NuOptions()
    return _decide(as_pair(P1, options), as_pair(P2, options), options, rho)


class Case(str, Enum):
    CASE1 = "case1"
    CASE2 = "case2"


@dataclass(frozen=True)
class ClosedFormCase:
    discriminant: float
    case: Case
    lemma_holds: Optional[bool] = None


def zero_uncertainty_discriminant(b: float, a1: float, a2: float) -> float:
    return (a1 * a1 - b * b) * (a2 * a2 - b * b) - 4.0 * b**4


def closed_form_zero_uncertainty(T: float, b: float, a1: float, a2: float, check_lemma: bool = False):
    """Distance between ``exp(-sT)(s-a1)/(s-b)`` and ``exp(-sT)(s-a2)/(s-b)``.

    Valid only for ``|a1 - a2|`` small enough; with ``check_lemma`` the
    returned case records whether the positivity lemma held on a grid.
    """
    if not (T > 0 and b > 0):
        raise DomainError("T and b must be positive")
    if a1 == b or a2 == b:
        raise DomainError("zero coincides with the pole (a_i = b)")
    disc = zero_uncertainty_discriminant(b, a1, a2)
    gap = abs(a1 - a2)
    if disc >= 0:
        value = gap / (math.sqrt(2.0) * (math.sqrt(a1 * a1 - b * b) + math.sqrt(a2 * a2 - b * b)))
        case = Case.CASE1
    else:
        value = b * gap / (math.sqrt(a1 * a1 + b * b) * math.sqrt(a2 * a2 + b * b))
        case = Case.CASE2
    holds = lemma_positivity_check(T, b, a1, a2)[0] if check_lemma else None
    return value, ClosedFormCase(disc, case, holds)


def closed_form_pole_uncertainty(a1: float, a2: float) -> float:
    """Distance between ``exp(-sT) s/(s-a1)`` and ``exp(-sT) s/(s-a2)`` for small ``|a1-a2|``."""
    if a1 <= 0 or a2 <= 0:
        raise DomainError("pole locations must be positive")
    return abs(a1 - a2) / (math.sqrt(2.0) * (a1 + a2))


def zero_uncertainty_gram(s, T: float, b: float, a1: float, a2: float):
    """``G1* G2`` for the zero-uncertainty pair, written out in closed form."""
    s = np.asarray(s, dtype=complex)
    sb = np.conj(s)
    num = (sb - b) * (s - b) * np.exp(-2.0 * s.real * T) + (sb - a1) * (s - a2)
    den = (math.sqrt(2.0) * sb + math.sqrt(a1 * a1 + b * b)) * (math.sqrt(2.0) * s + math.sqrt(a2 * a2 + b * b))
    return num / den


def lemma_grid(n_axis: int = 60_001, radii=None, n_circle: int = 4096) -> np.ndarray:
    """Boundary-adjacent sample points: the imaginary axis plus circle images."""
    pos = np.geomspace(1e-6, 1e8, n_axis // 2)
    pts = [1j * np.concatenate([-pos[::-1], [0.0], pos])]
    if radii is None:
        radii = [1.0 - 2.0 ** -k for k in range(1, 34, 2)]
    u = -np.pi + 2 * np.pi * (np.arange(n_circle) + 0.5) / n_circle
    for r in radii:
        eps = 1.0 - r
        for kappa in (1.0, 1e-2, 1e-4, 1e-6):
            t = 2.0 * np.arctan(kappa * np.tan(u / 2))
            pts.append(circle_points(HALFPLANE, eps, t))
    return np.concatenate(pts)


def lemma_positivity_check(T: float, b: float, a1: float, a2: float, grid=None):
    """Minimum of ``Re f`` over boundary-adjacent points; holds when it is positive."""
    grid = lemma_grid() if grid is None else np.asarray(grid, dtype=complex)
    m = float(np.min(zero_uncertainty_gram(grid, T, b, a1, a2).real))
    return m > 0, m


def scan_summary(scans) -> list:
    return [
        {
            "r": s.radius,
            "winding": s.winding,
            "min_modulus": s.min_modulus,
            "samples_used": s.samples_used,
        }
        for s in scans
        if isinstance(s, WindingResult)
    ]
