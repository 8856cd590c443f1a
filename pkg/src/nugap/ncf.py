"""Normalized coprime factorization of delay-rational SISO plants."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .boundary import HALFPLANE, BoundaryFunction
from .errors import (
    BoundaryRootError,
    DegreeLimitError,
    IndefiniteError,
    ShapeMismatchError,
    SpectralFactorError,
)
from .plantcore import PAIR_REL, DelayRational, DelayRationalPlant, Polynomial

MAX_DEGREE = 8
RESIDUAL_TOL = 1e-8


def default_validation_grid(n: int = 401) -> np.ndarray:
    return np.concatenate([[0.0], np.geomspace(1e-3, 1e3, n - 1)])


@dataclass(frozen=True)
class SpectralFactorizationResult:
    d: Polynomial
    residual: float


@dataclass(frozen=True)
class CoprimePair:
    """Right factors ``N, D`` and left factors ``Ntilde, Dtilde`` of a plant.

    ``N`` is ``p x m``, ``D`` is ``m x m``, ``Ntilde`` is ``p x m`` and
    ``Dtilde`` is ``p x p``. SISO pairs hold scalar functions.
    """

    N: BoundaryFunction
    D: BoundaryFunction
    Ntilde: BoundaryFunction
    Dtilde: BoundaryFunction
    p: int = 1
    m: int = 1
    plant: Optional[DelayRationalPlant] = None
    spectral: Optional[SpectralFactorizationResult] = None

    def __post_init__(self):
        p, m = self.p, self.m
        want = {"N": (p, m), "D": (m, m), "Ntilde": (p, m), "Dtilde": (p, p)}
        for name, shape in want.items():
            fn = getattr(self, name)
            if not (fn.shape == shape or (fn.shape == () and shape == (1, 1))):
                raise ShapeMismatchError(f"{name} has shape {fn.shape}, expected {shape}")

    @classmethod
    def from_callables(cls, N, D, Ntilde, Dtilde, p: int, m: int) -> "CoprimePair":
        """Wrap user-supplied vectorized matrix callables (half-plane coordinate)."""
        return cls(
            BoundaryFunction(N, HALFPLANE, (p, m)),
            BoundaryFunction(D, HALFPLANE, (m, m)),
            BoundaryFunction(Ntilde, HALFPLANE, (p, m)),
            BoundaryFunction(Dtilde, HALFPLANE, (p, p)),
            p,
            m,
        )

    @property
    def is_siso(self) -> bool:
        return self.N.is_scalar and self.D.is_scalar

    def G(self, s) -> np.ndarray:
        """Stacked ``[N; D]`` at each point, shape ``(n, p+m, m)``."""
        n = self.N.as_matrix(self.N.on_halfplane(s))
        d = self.D.as_matrix(self.D.on_halfplane(s))
        return np.concatenate([n, d], axis=1)

    def Gtilde(self, s) -> np.ndarray:
        """Row ``[-Dtilde, Ntilde]`` at each point, shape ``(n, p, p+m)``."""
        dt = self.Dtilde.as_matrix(self.Dtilde.on_halfplane(s))
        nt = self.Ntilde.as_matrix(self.Ntilde.on_halfplane(s))
        return np.concatenate([-dt, nt], axis=2)

    def scaled(self, c: complex) -> "CoprimePair":
        """Every factor multiplied by ``c`` (breaks normalization unless |c| = 1)."""

        def scale(fn):
            return BoundaryFunction(lambda x, f=fn: c * f(x), fn.coordinate, fn.shape)

        return CoprimePair(
            scale(self.N), scale(self.D), scale(self.Ntilde), scale(self.Dtilde), self.p, self.m
        )


def para_hermitian_sum(p: Polynomial, q: Polynomial) -> Polynomial:
    """``p(s)p(-s) + q(s)q(-s)``, which equals ``|p|^2 + |q|^2`` on ``s = i w``."""
    if p.is_zero() and q.is_zero():
        raise ValueError("p and q are both zero")
    return p * p.reflect() + q * q.reflect()


def _spectral_residual(d: Polynomial, r: Polynomial, grid: np.ndarray) -> float:
    s = 1j * grid
    rv = r(s)
    dd = d(s) * d(-s)
    return float(np.max(np.abs(dd - rv) / (1.0 + np.abs(rv))))


def spectral_factor(r: Polynomial, grid: Optional[np.ndarray] = None) -> SpectralFactorizationResult:
    """Stable ``d`` with ``d(s) d(-s) = r(s)`` and positive leading coefficient."""
    c = np.asarray(r.coefficients)
    scale = np.max(np.abs(c))
    if scale == 0:
        raise IndefiniteError("r is identically zero")
    if np.any(np.abs(c[1::2]) > 1e-12 * scale):
        raise SpectralFactorError("r(-s) != r(s): odd coefficients present")
    if r.degree % 2:
        raise SpectralFactorError("para-Hermitian polynomial must have even degree")
    if r.degree > 2 * MAX_DEGREE:
        raise DegreeLimitError(f"degree {r.degree} exceeds the supported {2 * MAX_DEGREE}")
    grid = default_validation_grid() if grid is None else np.asarray(grid, dtype=float)
    on_axis = r(1j * grid).real
    if np.any(on_axis <= 0):
        w = grid[np.argmin(on_axis)]
        raise IndefiniteError(f"r(i w) <= 0 at w = {w:.6g}")

    n = r.degree // 2
    lead = r.lead * (-1.0) ** n
    if lead <= 0:
        raise IndefiniteError("leading coefficient incompatible with positivity on the axis")
    if n == 0:
        d = Polynomial([np.sqrt(r.coefficients[0])])
        return SpectralFactorizationResult(d, _spectral_residual(d, r, grid))

    roots = r.roots()
    axis = np.abs(roots.real) < PAIR_REL * (1.0 + np.abs(roots))
    if np.any(axis):
        raise BoundaryRootError(f"r has a root on the imaginary axis near {roots[axis][0]:.6g}")
    stable = roots[roots.real < 0]
    if len(stable) != n:
        raise SpectralFactorError(f"expected {n} left half-plane roots, found {len(stable)}")
    d = Polynomial.from_roots(stable, lead=np.sqrt(lead))
    residual = _spectral_residual(d, r, grid)
    if residual > RESIDUAL_TOL:
        raise SpectralFactorError(f"spectral factor residual {residual:.3g} exceeds {RESIDUAL_TOL}")
    return SpectralFactorizationResult(d, residual)


def normalized_coprime_factorization(plant: DelayRationalPlant) -> CoprimePair:
    """``N = exp(-sT) q/d``, ``D = p/d`` with ``d`` the spectral factor of ``pp* + qq*``.

    The numerator goes with ``N`` so that ``N/D`` is the plant itself.
    """
    q, p = plant.num, plant.den
    if p.degree > MAX_DEGREE:
        raise DegreeLimitError(f"denominator degree {p.degree} exceeds {MAX_DEGREE}")
    sf = spectral_factor(para_hermitian_sum(p, q))
    N = BoundaryFunction.from_expr(DelayRational.single(plant.delay, q, sf.d))
    D = BoundaryFunction.from_expr(DelayRational.single(0.0, p, sf.d))
    return CoprimePair(N, D, N, D, 1, 1, plant=plant, spectral=sf)


def normalization_residuals(G: np.ndarray, Gt: np.ndarray) -> tuple:
    """Max spectral norms of ``G*G - I`` and ``Gt Gt* - I`` over a stack."""
    m = G.shape[-1]
    p = Gt.shape[-2]
    right = np.conj(np.swapaxes(G, -1, -2)) @ G - np.eye(m)
    left = Gt @ np.conj(np.swapaxes(Gt, -1, -2)) - np.eye(p)
    r = np.linalg.norm(right, ord=2, axis=(-2, -1))
    l = np.linalg.norm(left, ord=2, axis=(-2, -1))
    return float(np.max(r)), float(np.max(l))


def validate_normalization(pair: CoprimePair, grid=None) -> float:
    """Worst violation of right and left normalization on ``s = i w``."""
    grid = default_validation_grid() if grid is None else np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("validation grid is empty")
    s = 1j * grid
    return max(normalization_residuals(pair.G(s), pair.Gtilde(s)))
