"""Binary interpolatory refinement of polygons in R^d."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from bhsubdiv.errors import InputError
from bhsubdiv.stencils import RationalMask

__all__ = [
    "FiniteDifferenceRow",
    "Polygon",
    "finite_difference_norms",
    "polynomial_reproduction_error",
    "subdivide",
    "subdivide_step",
]


@dataclass(frozen=True)
class Polygon:
    vertices: np.ndarray
    closed: bool = True

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[1] < 1:
            raise InputError(f"vertices must be an (n, d) array, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InputError("vertices contain non-finite coordinates")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def dimension(self) -> int:
        return self.vertices.shape[1]

    def __len__(self):
        return len(self.vertices)

    def reversed(self) -> "Polygon":
        return Polygon(self.vertices[::-1].copy(), self.closed)

    def transformed(self, A, t) -> "Polygon":
        return Polygon(self.vertices @ np.asarray(A, dtype=float).T + np.asarray(t, dtype=float), self.closed)


def _min_vertices(poly: Polygon, mask: RationalMask) -> int:
    return 2 * mask.half_width if poly.closed else 2


def subdivide_step(poly: Polygon, mask: RationalMask) -> Polygon:
    """One refinement level.

    Closed polygons use cyclic indexing and double the vertex count. Open
    polygons clamp neighbour indices to ``[0, n-1]`` and insert only between
    existing vertices, giving ``2n - 1`` vertices.
    """
    n = len(poly)
    need = _min_vertices(poly, mask)
    if n < need:
        kind = "closed" if poly.closed else "open"
        raise InputError(f"{kind} polygon has {n} vertices; mask {mask.scheme_name} needs at least {need}")
    p = poly.vertices
    n_new = n if poly.closed else n - 1
    j = np.arange(n_new)
    odd = np.zeros((n_new, poly.dimension))
    for k, a in mask.items():
        idx = (j + k) % n if poly.closed else np.clip(j + k, 0, n - 1)
        odd += float(a) * p[idx]
    out = np.empty((n + n_new, poly.dimension))
    out[0::2] = p
    out[1::2] = odd
    return Polygon(out, poly.closed)


def subdivide(poly: Polygon, mask: RationalMask, iters: int) -> Polygon:
    if iters < 0:
        raise InputError(f"iteration count must be non-negative, got {iters}")
    for _ in range(iters):
        poly = subdivide_step(poly, mask)
    return poly


def polynomial_reproduction_error(mask: RationalMask, degree: int) -> float:
    """Max insertion error on integer samples of ``t**degree``.

    Samples sit at ``t = -m .. m+1`` and the interior insertions (those whose
    stencil never leaves the samples) are at ``t = -1/2, 1/2, 3/2``.
    """
    if degree < 0:
        raise InputError(f"degree must be non-negative, got {degree}")
    m = mask.half_width
    ts = np.arange(-m, m + 2)
    poly = Polygon(ts.astype(float) ** degree, closed=False)
    refined = subdivide_step(poly, mask).vertices[:, 0]
    err = 0.0
    for j in (-1, 0, 1):
        i = j + m  # sample index of t = j
        exact = Fraction(2 * j + 1, 2) ** degree
        err = max(err, float(abs(refined[2 * i + 1] - float(exact))))
    return err


@dataclass(frozen=True)
class FiniteDifferenceRow:
    level: int
    k: int
    norm: float  # sup-norm of k-th forward differences
    scaled: float  # 2^(level*k) * norm, the divided-difference estimate

    @property
    def log2_scaled(self) -> float:
        return float(np.log2(self.scaled)) if self.scaled > 0 else float("-inf")


def finite_difference_norms(mask: RationalMask, max_level: int, max_k: int) -> list[FiniteDifferenceRow]:
    """Difference norms of the refined delta sequence, levels ``1..max_level``.

    The delta is padded with enough zeros that the basic limit function's
    support never reaches the clamped ends.
    """
    if max_level < 3:
        raise InputError(f"max_level must be >= 3, got {max_level}")
    if max_k < 1:
        raise InputError(f"max_k must be >= 1, got {max_k}")
    pad = 2 * mask.half_width + max_k
    data = np.zeros(2 * pad + 1)
    data[pad] = 1.0
    poly = Polygon(data, closed=False)
    rows = []
    for level in range(1, max_level + 1):
        poly = subdivide_step(poly, mask)
        values = poly.vertices[:, 0]
        for k in range(1, max_k + 1):
            norm = float(np.abs(np.diff(values, k)).max())
            rows.append(FiniteDifferenceRow(level, k, norm, norm * 2.0 ** (level * k)))
    return rows
