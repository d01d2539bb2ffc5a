"""Discrete curvature, biharmonic energy and curvature variance of polygons."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from bhsubdiv.errors import InputError
from bhsubdiv.euclid import Polygon, subdivide_step
from bhsubdiv.stencils import RationalMask

__all__ = [
    "CurvatureProfile",
    "FairnessReport",
    "benchmark_polygons",
    "biharmonic_energy",
    "curvature_variance",
    "discrete_curvature",
    "edge_length_ratio",
    "energy_decay_report",
]


@dataclass(frozen=True)
class CurvatureProfile:
    """Per-vertex exterior angle, half-edge length and curvature.

    ``indices`` are the polygon vertices the entries refer to; open
    polylines drop both endpoints.
    """

    indices: np.ndarray
    angles: np.ndarray
    half_edges: np.ndarray
    closed: bool

    @property
    def kappa(self) -> np.ndarray:
        return self.angles / self.half_edges

    @property
    def total_turning(self) -> float:
        return float(self.angles.sum())


def _signed_angles(incoming: np.ndarray, outgoing: np.ndarray) -> np.ndarray:
    if incoming.shape[1] == 2:
        cross = incoming[:, 0] * outgoing[:, 1] - incoming[:, 1] * outgoing[:, 0]
    else:
        cross = np.linalg.norm(np.cross(incoming, outgoing), axis=1)
    dot = np.einsum("ij,ij->i", incoming, outgoing)
    return np.arctan2(cross, dot)


def discrete_curvature(poly: Polygon) -> CurvatureProfile:
    """Exterior-angle curvature estimate ``delta_j / e_j``.

    ``e_j`` is the mean of the two incident edge lengths. Angles are signed
    (left turn positive) for planar polygons and unsigned in higher
    dimensions.
    """
    if poly.dimension < 2:
        raise InputError("curvature needs polygons of dimension >= 2")
    p = poly.vertices
    n = len(p)
    if poly.closed:
        if n < 3:
            raise InputError(f"closed polygon needs at least 3 vertices, got {n}")
        edges = np.roll(p, -1, axis=0) - p  # edges[j] = p[j+1] - p[j]
    else:
        if n < 3:
            return CurvatureProfile(np.arange(0), np.zeros(0), np.zeros(0), False)
        edges = np.diff(p, axis=0)
    lengths = np.linalg.norm(edges, axis=1)
    zero = np.flatnonzero(lengths == 0.0)
    if zero.size:
        j = int(zero[0])
        raise InputError(f"duplicate adjacent vertices at index {j} and {(j + 1) % n}")
    if poly.closed:
        idx = np.arange(n)
        inc, out = np.roll(edges, 1, axis=0), edges
        half = 0.5 * (np.roll(lengths, 1) + lengths)
    else:
        idx = np.arange(1, n - 1)
        inc, out = edges[:-1], edges[1:]
        half = 0.5 * (lengths[:-1] + lengths[1:])
    return CurvatureProfile(idx, _signed_angles(inc, out), half, poly.closed)


def _profile(poly_or_profile) -> CurvatureProfile:
    if isinstance(poly_or_profile, CurvatureProfile):
        return poly_or_profile
    return discrete_curvature(poly_or_profile)


def biharmonic_energy(poly) -> float:
    """``sum_j (kappa_{j+1} - kappa_j)^2 e_j`` (cyclic for closed polygons)."""
    prof = _profile(poly)
    kappa, e = prof.kappa, prof.half_edges
    if prof.closed:
        diff = np.roll(kappa, -1) - kappa
        return float(np.sum(diff**2 * e))
    if kappa.size < 2:
        return 0.0
    return float(np.sum(np.diff(kappa) ** 2 * e[:-1]))


def curvature_variance(poly) -> float:
    prof = _profile(poly)
    e = prof.half_edges
    total = e.sum()
    if not total > 0:
        raise InputError("curvature variance undefined for a polygon of zero length")
    kappa = prof.kappa
    mean = np.sum(kappa * e) / total
    return float(np.sum((kappa - mean) ** 2 * e) / total)


@dataclass(frozen=True)
class FairnessReport:
    level: int
    energy: float
    variance: float
    vertex_count: int


def _report(level: int, poly: Polygon) -> FairnessReport:
    prof = discrete_curvature(poly)
    var = curvature_variance(prof) if prof.half_edges.size else 0.0
    return FairnessReport(level, biharmonic_energy(prof), var, len(poly))


def energy_decay_report(poly: Polygon, mask: RationalMask, levels: int) -> list[FairnessReport]:
    """Reports for refinement levels ``0..levels``; level 0 is the input."""
    if levels < 1:
        raise InputError(f"levels must be >= 1, got {levels}")
    out = [_report(0, poly)]
    for level in range(1, levels + 1):
        poly = subdivide_step(poly, mask)
        out.append(_report(level, poly))
    return out


def _radial(n, radius, phase=0.0):
    theta = phase + 2 * np.pi * np.arange(n) / n
    r = radius(theta)
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def benchmark_polygons() -> dict[str, Polygon]:
    """Fixed closed test polygons used by the fairness benchmarks.

    ``smooth_convex``  convex loop with mild radial variation
    ``concave``        loop with one pronounced inward dent
    ``nonuniform``     ellipse sampled so max/min edge length is about 4.5
    ``star``           five-pointed star with re-entrant vertices
    ``test9``          irregular 9-point polygon
    """
    polys = {
        "smooth_convex": _radial(10, lambda t: 1.0 + 0.12 * np.cos(2 * t) + 0.05 * np.sin(3 * t)),
        "concave": _radial(12, lambda t: 1.0 - 0.3 * np.exp(-4.0 * (1.0 - np.cos(t - np.pi / 2)))),
        "star": _radial(10, lambda t: np.where(np.arange(10) % 2 == 0, 1.0, 0.5)),
    }
    # Monotone angular warp: edges bunch up near theta = pi, stretch near 0.
    # The warp amplitude gives a max/min edge-length ratio of 4.5.
    u = np.arange(12) / 12
    theta = 2 * np.pi * u + 0.6325276084966808 * np.sin(2 * np.pi * u)
    polys["nonuniform"] = np.column_stack([1.3 * np.cos(theta), np.sin(theta)])
    polys["test9"] = np.array(
        [[0.0, 0.0], [1.0, -0.3], [2.1, 0.1], [2.8, 1.0], [2.6, 2.1], [1.7, 2.7], [0.6, 2.6], [-0.3, 1.9], [-0.5, 0.9]]
    )
    return {name: Polygon(v, closed=True) for name, v in polys.items()}


def edge_length_ratio(poly: Polygon) -> float:
    p = poly.vertices
    edges = (np.roll(p, -1, axis=0) - p) if poly.closed else np.diff(p, axis=0)
    lengths = np.linalg.norm(edges, axis=1)
    return float(lengths.max() / lengths.min())
