"""Exactly evaluable functions on the closed disk or right half-plane."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .plantcore import DelayRational, halfplane_to_disk, mobius_to_halfplane

HALFPLANE = "halfplane"
DISK = "disk"


@dataclass(frozen=True)
class BoundaryFunction:
    """A vectorized map from points to complex scalars or ``p x m`` matrices.

    ``evaluator`` takes a 1-d complex array in the native ``coordinate`` and
    returns an array of shape ``(n,)`` (scalar) or ``(n, p, m)``.

    ``expr`` optionally carries the exact delay-rational form (SISO only);
    it lets the norm search compute the ``|w| -> inf`` tail analytically.
    ``real_symmetric`` records ``F(conj s) = conj F(s)``.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    coordinate: str = HALFPLANE
    shape: tuple = ()
    expr: Optional[DelayRational] = None
    real_symmetric: bool = False
    holomorphic: bool = True

    def __post_init__(self):
        if self.coordinate not in (HALFPLANE, DISK):
            raise ValueError(f"unknown coordinate {self.coordinate!r}")

    @classmethod
    def from_expr(cls, expr: DelayRational) -> "BoundaryFunction":
        return cls(expr, HALFPLANE, (), expr=expr, real_symmetric=True)

    @classmethod
    def constant(cls, value, coordinate: str = HALFPLANE) -> "BoundaryFunction":
        value = np.asarray(value, dtype=complex)

        def ev(x):
            x = np.asarray(x)
            return np.broadcast_to(value, x.shape + value.shape).copy()

        return cls(ev, coordinate, value.shape, real_symmetric=bool(np.all(value.imag == 0)))

    @property
    def is_scalar(self) -> bool:
        return self.shape == ()

    def __call__(self, points) -> np.ndarray:
        pts = np.atleast_1d(np.asarray(points, dtype=complex))
        out = np.asarray(self.evaluator(pts), dtype=complex)
        expected = pts.shape + self.shape
        if out.shape != expected:
            raise ValueError(f"evaluator returned shape {out.shape}, expected {expected}")
        return out

    def on_halfplane(self, s) -> np.ndarray:
        if self.coordinate == HALFPLANE:
            return self(s)
        return self(halfplane_to_disk(s))

    def on_disk(self, z) -> np.ndarray:
        if self.coordinate == DISK:
            return self(z)
        return self(mobius_to_halfplane(z))

    def as_matrix(self, values: np.ndarray) -> np.ndarray:
        """View evaluated values as a stack of matrices."""
        return values[:, None, None] if self.is_scalar else values

    def tail_sup(self) -> Optional[float]:
        """``limsup |F(i w)|`` as ``|w| -> inf`` when it is known exactly."""
        if self.expr is not None:
            return self.expr.tail_sup()
        if self.coordinate == DISK:
            from .hnorm import sigma_max

            val = self.as_matrix(self(np.array([1.0 + 0j])))
            return float(sigma_max(val)[0])
        return None
