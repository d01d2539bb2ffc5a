"""Six-point variational characterisation of the 6-point stencil.

A window of six reference values at integer positions -2..3 is refined to
eleven values at spacing 1/2. The four half-integer neighbours of the new
vertex come from degree-5 Lagrange interpolation; the new vertex ``q`` at
1/2 minimises the sum of squared differences of adjacent discrete
curvatures ``4 (x[k+1] - 2 x[k] + x[k-1])`` over ``k = 3..7``.

Exact when the window holds :class:`~fractions.Fraction` values, float
otherwise; vector windows (one point per entry) are handled component-wise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from bhsubdiv.errors import InputError

__all__ = [
    "NODES",
    "REFERENCE_VECTORS",
    "AppendixReport",
    "RefinedSegment",
    "SixPointWindow",
    "appendix_verification",
    "curvature_difference_terms",
    "discrete_energy",
    "lagrange_half_insertions",
    "lagrange_row",
    "oracle_minimiser",
    "oracle_sweep",
    "variational_minimiser",
]

NODES = (-2, -1, 0, 1, 2, 3)
HALF_POSITIONS = {"q_A": Fraction(-3, 2), "q_B": Fraction(-1, 2), "q_C": Fraction(3, 2), "q_D": Fraction(5, 2)}

# Reference integer numerators over 256, compared verbatim.
REFERENCE_VECTORS = {
    "q_A": [63, 315, -210, 126, -45, 7],
    "q_B": [-7, 105, 210, -70, 21, -3],
    "q_C": [-3, 21, -70, 210, 105, -7],
    "q_D": [7, -45, 126, -210, 315, 63],
    "b43": [-336, 0, 288, -1344, 432, -64],
    "b54": [28, -420, 2232, 1304, -84, 12],
    "b65": [-12, 84, -1304, -2232, 420, -28],
    "b76": [36, -252, 840, 552, -236, 84],
    "numerator": [-1920, 6400, -38400, -38400, 6400, -1920],
    "minimiser": [3, -25, 150, 150, -25, 3],
}
REFERENCE_SLOPES = (4, -12, 12, -4)


def lagrange_row(t: Fraction) -> list[Fraction]:
    """Degree-5 Lagrange basis through :data:`NODES`, evaluated at ``t``."""
    t = Fraction(t)
    row = []
    for i in NODES:
        w = Fraction(1)
        for j in NODES:
            if j != i:
                w *= (t - j) / Fraction(i - j)
        row.append(w)
    return row


_ROWS = {name: lagrange_row(t) for name, t in HALF_POSITIONS.items()}


@dataclass(frozen=True)
class SixPointWindow:
    values: tuple

    def __post_init__(self):
        vals = tuple(self.values)
        if len(vals) != 6:
            raise InputError(f"window needs exactly six values, got {len(vals)}")
        vals = tuple(np.asarray(v, dtype=float) if isinstance(v, (list, tuple, np.ndarray)) else v for v in vals)
        object.__setattr__(self, "values", vals)

    @classmethod
    def of(cls, *values) -> "SixPointWindow":
        if len(values) == 1:
            values = values[0]
        return cls(tuple(values))

    def combine(self, row: Sequence[Fraction]) -> Any:
        exact = all(isinstance(v, (int, Fraction)) for v in self.values)
        total = 0
        for c, v in zip(row, self.values):
            total = total + (c if exact else float(c)) * v
        return total


@dataclass(frozen=True)
class RefinedSegment:
    x: tuple  # x[0..10] at positions -2, -3/2, ..., 3

    @classmethod
    def build(cls, q, w: SixPointWindow) -> "RefinedSegment":
        qa, qb, qc, qd = lagrange_half_insertions(w)
        p = w.values
        return cls((p[0], qa, p[1], qb, p[2], q, p[3], qc, p[4], qd, p[5]))

    def curvature(self, k: int):
        x = self.x
        return 4 * (x[k + 1] - 2 * x[k] + x[k - 1])

    def curvature_differences(self) -> list:
        kappa = {k: self.curvature(k) for k in range(3, 8)}
        return [kappa[k + 1] - kappa[k] for k in range(3, 7)]


def lagrange_half_insertions(w: SixPointWindow) -> tuple:
    return tuple(w.combine(_ROWS[name]) for name in ("q_A", "q_B", "q_C", "q_D"))


def _sq(v):
    return float(np.dot(v, v)) if isinstance(v, np.ndarray) else v * v


def discrete_energy(q, w: SixPointWindow):
    return sum(_sq(d) for d in RefinedSegment.build(q, w).curvature_differences())


def curvature_difference_terms(w: SixPointWindow) -> tuple[list, list]:
    """Split each curvature difference as ``a_k q + b_k``; returns ``(a, b)``."""
    d0 = RefinedSegment.build(0, w).curvature_differences()
    d1 = RefinedSegment.build(1, w).curvature_differences()
    a = [x1 - x0 for x0, x1 in zip(d0, d1)]
    if isinstance(a[0], np.ndarray):
        # slopes do not depend on the data; any component will do
        a = [float(v[0]) for v in a]
    return a, d0


def variational_minimiser(w: SixPointWindow):
    a, b = curvature_difference_terms(w)
    num = sum((ak * bk for ak, bk in zip(a, b)), 0)
    den = sum(ak * ak for ak in a)
    return -num / den


def _basis_windows():
    for i in range(6):
        yield SixPointWindow(tuple(Fraction(int(i == j)) for j in range(6)))


@dataclass
class AppendixCheck:
    name: str
    computed: list
    expected: list
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


@dataclass
class AppendixReport:
    checks: list[AppendixCheck]
    slopes: tuple
    slope_square_sum: Fraction

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks) and self.slopes == REFERENCE_SLOPES and self.slope_square_sum == 320

    def check(self, name: str) -> AppendixCheck:
        return next(c for c in self.checks if c.name == name)

    def failures(self) -> list[str]:
        lines = []
        for c in self.checks:
            for idx, got, want in c.mismatches:
                lines.append(f"{c.name}[{idx}] (coefficient of p_{NODES[idx]}): computed {got}/256, expected {want}/256")
        if self.slopes != REFERENCE_SLOPES:
            lines.append(f"q-slopes: computed {self.slopes}, expected {REFERENCE_SLOPES}")
        return lines


def appendix_verification() -> AppendixReport:
    """Recompute the Lagrange rows, curvature-difference vectors, first-order
    numerator and minimiser over the six basis windows, exactly, and compare
    each against :data:`REFERENCE_VECTORS` coefficient by coefficient."""
    per_basis = []
    for w in _basis_windows():
        a, b = curvature_difference_terms(w)
        per_basis.append(
            {
                **dict(zip(("q_A", "q_B", "q_C", "q_D"), lagrange_half_insertions(w))),
                **dict(zip(("b43", "b54", "b65", "b76"), b)),
                "numerator": sum((ak * bk for ak, bk in zip(a, b)), Fraction(0)),
                "minimiser": variational_minimiser(w),
            }
        )
    slopes = tuple(int(v) for v in a)
    checks = []
    for name, expected in REFERENCE_VECTORS.items():
        computed = [Fraction(row[name]) * 256 for row in per_basis]
        computed = [int(c) if c.denominator == 1 else c for c in computed]
        bad = [(i, c, e) for i, (c, e) in enumerate(zip(computed, expected)) if c != e]
        checks.append(AppendixCheck(name, computed, list(expected), bad))
    return AppendixReport(checks, slopes, sum(Fraction(s) ** 2 for s in slopes))


def _component_argmin(w: SixPointWindow, grid_points: int = 401) -> float:
    vals = np.array([float(v) for v in w.values])
    span = vals.max() - vals.min() + 1.0
    lo, hi = vals.min() - 2 * span, vals.max() + 2 * span
    grid = np.linspace(lo, hi, grid_points)
    energies = np.array([discrete_energy(float(q), w) for q in grid])
    i = int(np.clip(np.argmin(energies), 1, grid_points - 2))
    left, right = grid[i - 1], grid[i + 1]
    # E is a convex quadratic, so the sign of E(q+d) - E(q-d) tells which
    # side of q the minimum lies on; bisect on it.
    for _ in range(200):
        mid = 0.5 * (left + right)
        if mid in (left, right):
            break
        if discrete_energy(mid + 0.5, w) > discrete_energy(mid - 0.5, w):
            right = mid
        else:
            left = mid
    return 0.5 * (left + right)


def oracle_minimiser(w: SixPointWindow):
    """Minimise :func:`discrete_energy` numerically (grid scan + bisection)."""
    first = w.values[0]
    if isinstance(first, np.ndarray):
        comps = [SixPointWindow(tuple(float(v[c]) for v in w.values)) for c in range(first.shape[0])]
        return np.array([_component_argmin(c) for c in comps])
    return _component_argmin(SixPointWindow(tuple(float(v) for v in w.values)))


def oracle_sweep(trials: int = 200, seed: int = 0, dimension: int = 2) -> dict:
    """Distance between the oracle argmin and the closed form on random windows
    drawn uniformly from the unit cube."""
    if trials < 1:
        raise InputError(f"trials must be positive, got {trials}")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        pts = rng.uniform(0.0, 1.0, size=(6, dimension))
        w = SixPointWindow(tuple(pts))
        dist = float(np.linalg.norm(oracle_minimiser(w) - variational_minimiser(w)))
        worst = max(worst, dist)
    return {"trials": trials, "seed": seed, "max_oracle_distance": worst}
