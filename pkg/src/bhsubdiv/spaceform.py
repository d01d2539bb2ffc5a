"""Closed-form solutions of ``kappa'' = K kappa`` and biharmonic insertion angles.

Solutions are written in the normalised basis

    C(s) = cosh(sqrt(K) s)              S(s) = sinh(sqrt(K) s) / sqrt(K)

(continued analytically to ``cos``/``sin`` for ``K < 0`` and to ``1``/``s``
at ``K = 0``), so ``kappa(s) = c1 C(s) + c2 S(s)``. For ``K = +1`` and
``K = -1`` this is exactly the cosh/sinh and cos/sin form with the usual
boundary constants, and general ``K`` amounts to rescaling arc length by
``sqrt|K|``. When ``|K| s^2`` is small the basis is evaluated by its Taylor
series, which removes the 0/0 cancellation for short edges and keeps the
flat limit continuous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from bhsubdiv.errors import InputError, ResonanceError

__all__ = [
    "SpaceFormContext",
    "boundary_constants",
    "curvature_solution",
    "extrapolated_proximity_constant",
    "insertion_angle",
    "leading_proximity_coefficient",
    "loglog_slope",
    "proximity_deviation",
]

RESONANCE_TOL = 1e-12
_SERIES_LIMIT = 0.1  # use the series when |K| s^2 is below this
_SERIES_TERMS = 12


def _series(x: float, offset: int) -> float:
    # sum_n x^n / (2n + offset)!
    total, term = 0.0, 1.0 / math.factorial(offset)
    for n in range(_SERIES_TERMS):
        total += term
        term *= x / ((2 * n + offset + 1) * (2 * n + offset + 2))
    return total


def _cos_like(K: float, s: float) -> float:
    x = K * s * s
    if abs(x) < _SERIES_LIMIT:
        return _series(x, 0)
    r = math.sqrt(abs(K))
    return math.cosh(r * s) if K > 0 else math.cos(r * s)


def _sin_like(K: float, s: float) -> float:
    x = K * s * s
    if abs(x) < _SERIES_LIMIT:
        return s * _series(x, 1)
    r = math.sqrt(abs(K))
    return (math.sinh(r * s) if K > 0 else math.sin(r * s)) / r


def _vers_like(K: float, s: float) -> float:
    """Integral of ``S`` over ``[0, s]``, i.e. ``(C(s) - 1) / K``."""
    x = K * s * s
    if abs(x) < _SERIES_LIMIT:
        return s * s * _series(x, 2)
    return (_cos_like(K, s) - 1.0) / K


def _check_edge(e: float, K: float) -> None:
    if not e > 0:
        raise InputError(f"edge length must be positive, got {e}")
    if K < 0 and abs(math.sin(math.sqrt(-K) * e)) < RESONANCE_TOL:
        raise ResonanceError(f"edge length {e} is a resonance length for K={K} (sin(sqrt|K| e) = 0)")


def boundary_constants(kappa_j: float, kappa_j1: float, e: float, K: float) -> tuple[float, float]:
    _check_edge(e, K)
    c1 = float(kappa_j)
    c2 = (kappa_j1 - kappa_j * _cos_like(K, e)) / _sin_like(K, e)
    return c1, c2


@dataclass(frozen=True)
class SpaceFormContext:
    K: float
    edge: float
    kappa_j: float
    kappa_j1: float

    def __post_init__(self):
        _check_edge(self.edge, self.K)

    @property
    def constants(self) -> tuple[float, float]:
        return boundary_constants(self.kappa_j, self.kappa_j1, self.edge, self.K)

    @property
    def c1(self) -> float:
        return self.constants[0]

    @property
    def c2(self) -> float:
        return self.constants[1]

    @property
    def half_edge(self) -> float:
        return 0.5 * self.edge


def curvature_solution(ctx: SpaceFormContext, s: float) -> float:
    if not -1e-12 <= s <= ctx.edge * (1 + 1e-12):
        raise InputError(f"arc length {s} outside [0, {ctx.edge}]")
    if s == ctx.edge:
        return float(ctx.kappa_j1)
    c1, c2 = ctx.constants
    return c1 * _cos_like(ctx.K, s) + c2 * _sin_like(ctx.K, s)


def insertion_angle(kappa_j: float, kappa_j1: float, e: float, K: float) -> float:
    """Integral of the curvature solution from 0 to ``e / 2``."""
    c1, c2 = boundary_constants(kappa_j, kappa_j1, e, K)
    ell = 0.5 * e
    return c1 * _sin_like(K, ell) + c2 * _vers_like(K, ell)


def proximity_deviation(kappa_j: float, kappa_j1: float, h: float, K: float) -> float:
    if K == 0:
        return 0.0
    return abs(insertion_angle(kappa_j, kappa_j1, h, K) - insertion_angle(kappa_j, kappa_j1, h, 0.0))


def leading_proximity_coefficient(kappa_j: float, kappa_j1: float, K: float = 1.0) -> float:
    """``lim (alpha^K - alpha^0) / h^3`` as ``h -> 0``.

    Expanding both closed forms to third order gives
    ``-K (9 kappa_j + 7 kappa_j1) / 384``; the ``kappa_j1 - kappa_j`` part
    comes from ``c2 ~ (kappa_j1 - kappa_j) / h`` multiplying fourth-order
    terms of the basis.
    """
    return -K * (9.0 * kappa_j + 7.0 * kappa_j1) / 384.0


def extrapolated_proximity_constant(kappa_j: float, kappa_j1: float, K: float, h: float = 1e-2) -> float:
    """Richardson estimate of ``|alpha^K - alpha^0| / h^3`` at ``h -> 0``."""
    f = lambda t: proximity_deviation(kappa_j, kappa_j1, t, K) / t**3  # noqa: E731
    return 2.0 * f(h / 2) - f(h)


def loglog_slope(hs, values) -> float:
    hs, values = np.asarray(hs, dtype=float), np.asarray(values, dtype=float)
    return float(np.polyfit(np.log(hs), np.log(values), 1)[0])
