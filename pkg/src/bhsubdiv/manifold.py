"""Biharmonic subdivision on the unit sphere and the Poincare disk.

Sphere points are unit 3-vectors; tangent vectors at ``p`` are 3-vectors
orthogonal to ``p``. Disk points are 2-vectors of norm < 1; tangent vectors
at ``a`` are plain 2-vectors whose Riemannian length is
``2 |v| / (1 - |a|^2)``. Both models are conformal, so angles between
tangent vectors are ordinary Euclidean angles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from bhsubdiv.errors import (
    AntipodalError,
    DegenerateGeometryError,
    DiameterConditionError,
    InputError,
)
from bhsubdiv.fairness import CurvatureProfile
from bhsubdiv.spaceform import insertion_angle

__all__ = [
    "DISK",
    "SPHERE",
    "ManifoldPolygon",
    "PERTURBATION_RULES",
    "angle_proximity_grid",
    "chart_deviation",
    "chart_proximity",
    "disk_distance",
    "disk_exp",
    "disk_log",
    "geodesic_midpoint",
    "geometry",
    "manifold_curvature_estimate",
    "manifold_subdivide",
    "manifold_subdivide_step",
    "mobius_add",
    "mobius_scale",
    "sphere_distance",
    "sphere_exp",
    "sphere_log",
]

TANGENT_TOL = 1e-10
ANTIPODAL_TOL = 1e-12
MOBIUS_DEN_TOL = 1e-15
UNIT_INPUT_TOL = 1e-9
DIAMETER_BOUND = 0.25


# -- sphere ----------------------------------------------------------------


def sphere_exp(p, v) -> np.ndarray:
    p, v = np.asarray(p, dtype=float), np.asarray(v, dtype=float)
    if abs(float(p @ v)) > TANGENT_TOL:
        raise InputError(f"vector is not tangent at p (<p, v> = {float(p @ v):.3g})")
    nv = float(np.linalg.norm(v))
    if nv < 1e-15:
        return p.copy()
    x = math.cos(nv) * p + math.sin(nv) * (v / nv)
    return x / np.linalg.norm(x)


def sphere_log(p, q) -> np.ndarray:
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    c = float(p @ q)
    if c < -1.0 + ANTIPODAL_TOL:
        raise AntipodalError("logarithm undefined for antipodal points")
    w = q - c * p
    nw = float(np.linalg.norm(w))
    if nw == 0.0:
        return np.zeros_like(p)
    theta = math.atan2(float(np.linalg.norm(np.cross(p, q))), c)
    return theta * (w / nw)


def sphere_distance(p, q) -> float:
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    return math.atan2(float(np.linalg.norm(np.cross(p, q))), float(p @ q))


# -- Poincare disk -----------------------------------------------------------


def mobius_add(a, b) -> np.ndarray:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    ab, aa, bb = float(a @ b), float(a @ a), float(b @ b)
    den = 1.0 + 2.0 * ab + aa * bb
    if abs(den) < MOBIUS_DEN_TOL:
        raise AntipodalError("Mobius addition denominator vanishes")
    return ((1.0 + 2.0 * ab + bb) * a + (1.0 - aa) * b) / den


def mobius_scale(r: float, w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    nw = float(np.linalg.norm(w))
    if nw == 0.0:
        return np.zeros_like(w)
    return math.tanh(r * math.atanh(nw)) * (w / nw)


def disk_distance(a, b) -> float:
    return 2.0 * math.atanh(min(float(np.linalg.norm(mobius_add(-np.asarray(a, dtype=float), b))), 1.0 - 1e-16))


def disk_log(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    u = mobius_add(-a, b)
    nu = float(np.linalg.norm(u))
    if nu == 0.0:
        return np.zeros_like(a)
    return (1.0 - float(a @ a)) * math.atanh(nu) * (u / nu)


def disk_exp(a, v) -> np.ndarray:
    a, v = np.asarray(a, dtype=float), np.asarray(v, dtype=float)
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        return a.copy()
    lam = 2.0 / (1.0 - float(a @ a))
    return mobius_add(a, math.tanh(0.5 * lam * nv) * (v / nv))


# -- geometry adapters ---------------------------------------------------------


class _Sphere:
    name = "sphere"
    K = 1.0
    dim = 3

    exp = staticmethod(sphere_exp)
    log = staticmethod(sphere_log)
    distance = staticmethod(sphere_distance)

    def midpoint(self, p, q):
        return sphere_exp(p, 0.5 * sphere_log(p, q))

    def direction(self, p, q):
        v = sphere_log(p, q)
        return v / np.linalg.norm(v)

    def left_normal(self, p, t):
        return np.cross(p, t)

    def turn(self, p, u_in, u_out):
        return math.atan2(float(p @ np.cross(u_in, u_out)), float(u_in @ u_out))

    def step(self, p, u, dist):
        return sphere_exp(p, dist * u)

    def validate(self, v):
        if v.shape[1] != 3:
            raise InputError(f"sphere vertices must be 3-vectors, got dimension {v.shape[1]}")
        norms = np.linalg.norm(v, axis=1)
        bad = np.flatnonzero(np.abs(norms - 1.0) > UNIT_INPUT_TOL)
        if bad.size:
            raise InputError(f"sphere vertex {int(bad[0])} has norm {norms[bad[0]]!r}, expected 1")
        return v / norms[:, None]


class _Disk:
    name = "disk"
    K = -1.0
    dim = 2

    exp = staticmethod(disk_exp)
    log = staticmethod(disk_log)
    distance = staticmethod(disk_distance)

    def midpoint(self, a, b):
        return mobius_add(a, mobius_scale(0.5, mobius_add(-np.asarray(a, dtype=float), b)))

    def direction(self, a, b):
        u = mobius_add(-np.asarray(a, dtype=float), b)
        return u / np.linalg.norm(u)

    def left_normal(self, a, t):
        return np.array([-t[1], t[0]])

    def turn(self, a, u_in, u_out):
        return math.atan2(u_in[0] * u_out[1] - u_in[1] * u_out[0], float(u_in @ u_out))

    def step(self, a, u, dist):
        # geodesic of length |dist| leaving a along the Euclidean unit vector u
        return mobius_add(a, math.tanh(0.5 * dist) * u)

    def validate(self, v):
        if v.shape[1] != 2:
            raise InputError(f"disk vertices must be 2-vectors, got dimension {v.shape[1]}")
        norms = np.linalg.norm(v, axis=1)
        bad = np.flatnonzero(norms >= 1.0)
        if bad.size:
            raise InputError(f"disk vertex {int(bad[0])} has norm {norms[bad[0]]!r}, must be < 1")
        return v


class _Plane:
    """Flat 2-D geometry; used for tangent-plane charts."""

    name = "plane"
    K = 0.0
    dim = 2

    def exp(self, p, v):
        return np.asarray(p, dtype=float) + v

    def log(self, p, q):
        return np.asarray(q, dtype=float) - p

    def distance(self, p, q):
        return float(np.linalg.norm(np.asarray(q, dtype=float) - p))

    def midpoint(self, p, q):
        return 0.5 * (np.asarray(p, dtype=float) + q)

    def direction(self, p, q):
        v = np.asarray(q, dtype=float) - p
        return v / np.linalg.norm(v)

    left_normal = _Disk.left_normal
    turn = _Disk.turn

    def step(self, p, u, dist):
        return p + dist * u


SPHERE = _Sphere()
DISK = _Disk()
PLANE = _Plane()
_GEOMETRIES = {"sphere": SPHERE, "disk": DISK}


def geometry(name: str):
    try:
        return _GEOMETRIES[name]
    except KeyError:
        raise InputError(f"unknown geometry {name!r}; expected 'sphere' or 'disk'") from None


def geodesic_midpoint(p, q, geometry_name: str) -> np.ndarray:
    return geometry(geometry_name).midpoint(np.asarray(p, dtype=float), np.asarray(q, dtype=float))


# -- polygons -------------------------------------------------------------


@dataclass(frozen=True)
class ManifoldPolygon:
    vertices: np.ndarray
    closed: bool
    geometry: str

    def __post_init__(self):
        geom = geometry(self.geometry)
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2:
            raise InputError(f"vertices must be an (n, d) array, got shape {v.shape}")
        v = geom.validate(v)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def K(self) -> float:
        return geometry(self.geometry).K

    def __len__(self):
        return len(self.vertices)

    def edge_lengths(self) -> np.ndarray:
        geom, p = geometry(self.geometry), self.vertices
        count = len(p) if self.closed else len(p) - 1
        return np.array([geom.distance(p[j], p[(j + 1) % len(p)]) for j in range(count)])

    def diameter_margin(self) -> float:
        """``|K| h0^2`` with ``h0`` the longest edge; must stay below 1/4."""
        e = self.edge_lengths()
        return abs(self.K) * float(e.max()) ** 2 if e.size else 0.0


def manifold_curvature_estimate(poly: ManifoldPolygon) -> CurvatureProfile:
    """Geodesic exterior angle over mean incident geodesic edge length."""
    geom, p, n = geometry(poly.geometry), poly.vertices, len(poly)
    edges = poly.edge_lengths()
    tiny = np.flatnonzero(edges < 1e-15)
    if tiny.size:
        j = int(tiny[0])
        raise DegenerateGeometryError(f"degenerate edge between vertices {j} and {(j + 1) % n}")
    idx = np.arange(n) if poly.closed else np.arange(1, n - 1)
    angles, half = [], []
    for j in idx:
        prev, nxt = p[(j - 1) % n], p[(j + 1) % n]
        u_in = -geom.direction(p[j], prev)
        u_out = geom.direction(p[j], nxt)
        angles.append(geom.turn(p[j], u_in, u_out))
        half.append(0.5 * (edges[(j - 1) % len(edges)] + edges[j % len(edges)]))
    return CurvatureProfile(idx, np.array(angles), np.array(half), poly.closed)


def _vertex_curvatures(poly: ManifoldPolygon) -> np.ndarray:
    kappa = np.zeros(len(poly))
    if len(poly) >= 3:
        prof = manifold_curvature_estimate(poly)
        kappa[prof.indices] = prof.kappa
    return kappa


PERTURBATION_RULES = ("arc", "literal")


def _insert(geom, K: float, a, b, e: float, kappa_a: float, kappa_b: float, rule: str = "arc"):
    """New vertex for the edge ``(a, b)`` of geodesic length ``e``."""
    mid = geom.midpoint(a, b)
    alpha = insertion_angle(kappa_a, kappa_b, e, K)
    if alpha == 0.0:
        return mid
    ell = 0.5 * e
    if rule == "arc":
        offset = -ell * math.tan(0.5 * alpha)
    elif rule == "literal":
        offset = ell * math.tan(alpha)
    else:
        raise InputError(f"unknown perturbation rule {rule!r}; expected one of {PERTURBATION_RULES}")
    normal = geom.left_normal(mid, geom.direction(mid, b))
    return geom.step(mid, normal, offset)


def manifold_subdivide_step(poly: ManifoldPolygon, rule: str = "arc") -> ManifoldPolygon:
    """Insert one vertex per edge: the geodesic midpoint, pushed sideways.

    The insertion angle ``alpha`` comes from the endpoint curvature estimates
    and the edge length. With ``ell = e / 2``, the default ``"arc"`` rule
    moves the midpoint a geodesic distance ``ell * tan(alpha / 2)`` to the
    right of the edge. That is where a circular arc through both endpoints
    passes when it turns left by ``alpha`` between an endpoint and its apex,
    so points sampled from a circle stay on it. ``"literal"`` moves by
    ``ell * tan(alpha)`` to the left instead; it is kept for comparison.
    Open endpoints get curvature 0.
    """
    n = len(poly)
    min_n = 3 if poly.closed else 2
    if n < min_n:
        raise InputError(f"manifold polygon needs at least {min_n} vertices, got {n}")
    if rule not in PERTURBATION_RULES:
        raise InputError(f"unknown perturbation rule {rule!r}; expected one of {PERTURBATION_RULES}")
    margin = poly.diameter_margin()
    if not margin < DIAMETER_BOUND:
        raise DiameterConditionError(f"|K| h0^2 = {margin:.6g} violates the diameter condition |K| h0^2 < 1/4")
    geom, p = geometry(poly.geometry), poly.vertices
    edges = poly.edge_lengths()
    tiny = np.flatnonzero(edges < 1e-15)
    if tiny.size:
        j = int(tiny[0])
        raise DegenerateGeometryError(f"degenerate edge between vertices {j} and {(j + 1) % n}")
    kappa = _vertex_curvatures(poly)
    out = np.empty((n + len(edges), p.shape[1]))
    out[0::2] = p
    for j, e in enumerate(edges):
        k = (j + 1) % n
        out[2 * j + 1] = _insert(geom, poly.K, p[j], p[k], float(e), kappa[j], kappa[k], rule)
    return ManifoldPolygon(out, poly.closed, poly.geometry)


def manifold_subdivide(poly: ManifoldPolygon, iters: int, rule: str = "arc") -> ManifoldPolygon:
    if iters < 0:
        raise InputError(f"iteration count must be non-negative, got {iters}")
    for _ in range(iters):
        poly = manifold_subdivide_step(poly, rule)
    return poly




# -- chart comparison ------------------------------------------------------------


def _turns(geom, pts) -> np.ndarray:
    """Curvature estimates at the interior vertices of an open point list."""
    out = []
    for j in range(1, len(pts) - 1):
        u_in = -geom.direction(pts[j], pts[j - 1])
        u_out = geom.direction(pts[j], pts[j + 1])
        half = 0.5 * (geom.distance(pts[j - 1], pts[j]) + geom.distance(pts[j], pts[j + 1]))
        out.append(geom.turn(pts[j], u_in, u_out) / half)
    return np.array(out)


def _test_curve(t: np.ndarray) -> np.ndarray:
    # a closed planar curve with curvature ranging over roughly [0.5, 8]
    return 0.5 * np.column_stack([np.cos(t), 0.6 * np.sin(t) + 0.15 * np.sin(2 * t)])


def _chart_frame(geometry_name: str, base: np.ndarray, toward: np.ndarray):
    """Orthonormal tangent frame at ``base`` plus the Riemannian scale of
    chart vectors (1 on the sphere, ``2 / (1 - |a|^2)`` in the disk)."""
    geom = geometry(geometry_name)
    e1 = geom.direction(base, toward)
    if geometry_name == "sphere":
        return e1, np.cross(base, e1), 1.0
    return e1, np.array([-e1[1], e1[0]]), 2.0 / (1.0 - float(base @ base))


def chart_deviation(geometry_name: str, h: float, reference: str = "flat", t0: float = 0.4) -> tuple[float, float]:
    """Distance between a manifold insertion and a tangent-chart reference.

    Six consecutive points with parameter spacing ``h`` are taken on a fixed
    smooth curve (a planar curve pushed onto the surface by the exponential
    map at a base point) and the middle edge ``(p_0, p_1)`` is refined by the
    manifold rule. The reference works in the normal-coordinate chart at
    ``p_0`` and is mapped back by exp. With ``reference="flat"`` it is the
    same biharmonic rule with ``K = 0``. With ``"bh6"`` it is the linear
    6-point mask, which inserts near the parameter midpoint rather than the
    arc-length midpoint, so the tangential gap is only O(h^2).

    Returns ``(edge length, geodesic distance)``.
    """
    from bhsubdiv.stencils import builtin_mask

    if reference not in ("flat", "bh6"):
        raise InputError(f"unknown chart reference {reference!r}; expected 'flat' or 'bh6'")
    geom = geometry(geometry_name)
    plane = _test_curve(t0 + h * np.arange(-2, 4))
    if geometry_name == "sphere":
        base = np.array([0.0, 0.0, 1.0])
        pts = np.array([sphere_exp(base, np.array([x, y, 0.0])) for x, y in plane])
    else:
        pts = np.array([disk_exp(np.zeros(2), v) for v in plane])
    a, b = pts[2], pts[3]
    e = geom.distance(a, b)
    ka, kb = _turns(geom, pts[1:5])
    manifold_point = _insert(geom, geom.K, a, b, e, ka, kb)

    e1, e2, lam = _chart_frame(geometry_name, a, b)
    chart = np.array([[lam * (v @ e1), lam * (v @ e2)] for v in (geom.log(a, q) for q in pts)])
    if reference == "flat":
        fa, fb = _turns(PLANE, chart[1:5])
        x = _insert(PLANE, 0.0, chart[2], chart[3], PLANE.distance(chart[2], chart[3]), fa, fb)
    else:
        x = sum(float(c) * chart[2 + k] for k, c in builtin_mask("bh6").items())
    flat_point = geom.exp(a, (x[0] * e1 + x[1] * e2) / lam)
    return e, geom.distance(manifold_point, flat_point)


def chart_proximity(geometry_name: str, hs, reference: str = "flat") -> list[tuple[float, float]]:
    """:func:`chart_deviation` over a grid of parameter spacings."""
    return [chart_deviation(geometry_name, float(h), reference) for h in hs]


def angle_proximity_grid(K: float, pairs, hs) -> list[dict]:
    """Rows ``(K, kappa_j, kappa_j1, h, alpha_K, alpha_0, deviation)``."""
    rows = []
    for kj, kj1 in pairs:
        for h in hs:
            aK = insertion_angle(kj, kj1, h, K)
            a0 = insertion_angle(kj, kj1, h, 0.0)
            rows.append({"K": K, "kappa_j": kj, "kappa_j1": kj1, "h": h, "alpha_K": aK, "alpha_0": a0, "deviation": abs(aK - a0)})
    return rows
