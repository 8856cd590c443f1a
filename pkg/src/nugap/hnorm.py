"""Boundary sup-norms: coarse frequency scan plus golden-section refinement."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .boundary import BoundaryFunction
from .errors import NonFiniteError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
MAX_BRACKETS = 8


def sigma_max(M):
    """Largest singular value of a matrix or of each matrix in a stack."""
    M = np.asarray(M, dtype=complex)
    if M.ndim < 2:
        raise ValueError("sigma_max needs a matrix or a stack of matrices")
    if M.shape[-2:] == (1, 1):
        out = np.abs(M[..., 0, 0])
    else:
        gram = np.conj(np.swapaxes(M, -1, -2)) @ M
        out = np.sqrt(np.clip(np.linalg.eigvalsh(gram)[..., -1], 0.0, None))
    return float(out) if out.ndim == 0 else out


def golden_max(fun, lo: float, hi: float, xtol: float, maxiter: int = 300):
    """Golden-section search for a maximum of ``fun`` on ``[lo, hi]``.

    Returns ``(x, fx, trace)`` where ``trace`` lists every ``(x, fx)``
    evaluated, endpoints included.
    """
    trace = [(lo, fun(lo)), (hi, fun(hi))]
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = fun(x1), fun(x2)
    trace += [(x1, f1), (x2, f2)]
    for _ in range(maxiter):
        if b - a <= xtol:
            break
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = fun(x1)
            trace.append((x1, f1))
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = fun(x2)
            trace.append((x2, f2))
    x, fx = max(trace, key=lambda p: p[1])
    return x, fx, trace


@dataclass(frozen=True)
class NormSearchResult:
    value: float
    argmax_omega: float
    trace: list = field(default_factory=list)
    refined: bool = False
    tail: float | None = None


def boundary_gain(F: BoundaryFunction, omega) -> np.ndarray:
    """``sigma_max(F(i w))`` for each frequency."""
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    vals = F.as_matrix(F.on_halfplane(1j * omega))
    if not np.all(np.isfinite(vals)):
        bad = omega[~np.isfinite(vals).reshape(len(omega), -1).all(axis=1)][0]
        raise NonFiniteError(f"non-finite value at w = {bad:.6g}")
    return np.atleast_1d(sigma_max(vals))


def coarse_grid(omega_max: float, coarse_n: int) -> np.ndarray:
    half = max(coarse_n // 2, 1)
    pos = np.geomspace(1e-4, omega_max, half)
    return np.concatenate([-pos[::-1], [0.0], pos])


def _local_maxima(g: np.ndarray) -> np.ndarray:
    left = np.concatenate([[-np.inf], g[:-1]])
    right = np.concatenate([g[1:], [-np.inf]])
    idx = np.flatnonzero((g >= left) & (g >= right))
    return idx[np.argsort(-g[idx], kind="stable")]


def hinf_norm(F: BoundaryFunction, omega_max: float = 1e6, coarse_n: int = 4096) -> NormSearchResult:
    """Supremum of ``sigma_max(F(i w))`` over the imaginary axis.

    Coarse log-spaced scan, golden-section refinement of up to eight local
    maxima, and the analytic ``|w| -> inf`` limit when the exact form of
    ``F`` is known.
    """
    if not F.holomorphic:
        raise ValueError("hinf_norm is only defined for holomorphic boundary functions")
    if coarse_n < 64:
        raise ValueError("coarse_n must be at least 64")
    omega = coarse_grid(omega_max, coarse_n)
    if F.real_symmetric:
        mid = len(omega) // 2
        g_pos = boundary_gain(F, omega[mid:])
        g = np.concatenate([g_pos[:0:-1], g_pos])
    else:
        g = boundary_gain(F, omega)
    trace = list(zip(omega.tolist(), g.tolist()))

    def gain(w):
        return float(boundary_gain(F, w)[0])

    refined = False
    done = 0
    for i in _local_maxima(g):
        if done == MAX_BRACKETS:
            break
        if F.real_symmetric and omega[i] < 0:
            continue
        lo = omega[max(i - 1, 0)]
        hi = omega[min(i + 1, len(omega) - 1)]
        if hi > lo:
            xtol = 1e-10 * max(abs(lo), abs(hi))
            _, _, t = golden_max(gain, lo, hi, xtol)
            trace.extend(t)
            refined = True
        done += 1

    best_w, best = max(trace, key=lambda p: p[1])
    tail = F.tail_sup()
    if tail is not None and tail > best:
        best_w, best = math.inf, tail
    return NormSearchResult(float(best), float(best_w), trace, refined, tail)


def circle_sup(F: BoundaryFunction, r: float, n: int = 1 << 16) -> float:
    """Max of ``sigma_max(F)`` over the circle ``|z| = r`` (disk transport)."""
    theta = 2 * np.pi * np.arange(n) / n

    def gain_at(t):
        z = r * np.exp(1j * np.atleast_1d(t))
        return np.atleast_1d(sigma_max(F.as_matrix(F.on_disk(z))))

    g = gain_at(theta)
    best = float(np.max(g))
    step = 2 * np.pi / n
    for i in _local_maxima(g)[:MAX_BRACKETS]:
        t0 = theta[i]
        _, fx, _ = golden_max(lambda t: float(gain_at(t)[0]), t0 - step, t0 + step, 1e-13)
        best = max(best, fx)
    return best
