import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bhsubdiv.errors import InputError
from bhsubdiv.euclid import Polygon, subdivide
from bhsubdiv.fairness import (
    benchmark_polygons,
    biharmonic_energy,
    curvature_variance,
    discrete_curvature,
    edge_length_ratio,
    energy_decay_report,
)
from bhsubdiv.stencils import builtin_mask


def regular(n, r=1.0):
    t = 2 * np.pi * np.arange(n) / n
    return Polygon(r * np.column_stack([np.cos(t), np.sin(t)]))


def test_regular_polygon_curvature():
    # exterior angle 2 pi / n over edge 2 r sin(pi / n)
    prof = discrete_curvature(regular(12, 2.0))
    expected = (2 * np.pi / 12) / (4.0 * np.sin(np.pi / 12))
    np.testing.assert_allclose(prof.kappa, expected, rtol=1e-12)
    assert biharmonic_energy(prof) == pytest.approx(0.0, abs=1e-24)
    assert curvature_variance(prof) == pytest.approx(0.0, abs=1e-24)


def test_clockwise_is_negative():
    prof = discrete_curvature(regular(8).reversed())
    assert np.all(prof.kappa < 0)
    assert prof.total_turning == pytest.approx(-2 * np.pi)


def test_open_polyline_drops_endpoints():
    prof = discrete_curvature(Polygon([[0, 0], [1, 0], [2, 1], [3, 1]], closed=False))
    assert list(prof.indices) == [1, 2]
    assert prof.angles[0] == pytest.approx(np.pi / 4)
    assert discrete_curvature(Polygon([[0, 0], [1, 0]], closed=False)).kappa.size == 0


def test_duplicate_vertex_reported():
    with pytest.raises(InputError, match="index 1"):
        discrete_curvature(Polygon([[0, 0], [1, 0], [1, 0], [0, 1]]))


def test_needs_planar_or_higher():
    with pytest.raises(InputError):
        discrete_curvature(Polygon([0.0, 1.0, 2.0]))


def test_energy_formula_by_hand():
    poly = Polygon([[0, 0], [2, 0], [2, 1], [0, 1]])
    prof = discrete_curvature(poly)
    k, e = prof.kappa, prof.half_edges
    expected = sum((k[(j + 1) % 4] - k[j]) ** 2 * e[j] for j in range(4))
    assert biharmonic_energy(poly) == pytest.approx(expected)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(0.1, 10), st.floats(-5, 5), st.floats(-5, 5))
def test_rigid_motion_and_scale(theta, s, tx, ty):
    poly = benchmark_polygons()["test9"]
    R = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    moved = poly.transformed(R, [tx, ty])
    assert biharmonic_energy(moved) == pytest.approx(biharmonic_energy(poly), rel=1e-9)
    assert curvature_variance(moved) == pytest.approx(curvature_variance(poly), rel=1e-9)
    # curvature scales as 1/s and edges as s, so E scales as 1/s
    scaled = poly.transformed(s * np.eye(2), [0, 0])
    assert biharmonic_energy(scaled) == pytest.approx(biharmonic_energy(poly) / s, rel=1e-9)


def test_benchmark_set():
    polys = benchmark_polygons()
    assert set(polys) == {"smooth_convex", "concave", "star", "nonuniform", "test9"}
    assert edge_length_ratio(polys["nonuniform"]) == pytest.approx(4.5, rel=1e-9)
    assert (discrete_curvature(polys["concave"]).kappa < 0).any()
    for poly in polys.values():
        assert discrete_curvature(poly).total_turning == pytest.approx(2 * np.pi, abs=1e-9)


def test_energy_decays_for_bh6():
    reports = energy_decay_report(benchmark_polygons()["smooth_convex"], builtin_mask("bh6"), 7)
    assert [r.level for r in reports] == list(range(8))
    assert [r.vertex_count for r in reports] == [10 * 2**n for n in range(8)]
    energies = [r.energy for r in reports[1:]]
    assert all(b < a for a, b in zip(energies, energies[1:]))


def test_report_validation():
    with pytest.raises(InputError):
        energy_decay_report(regular(6), builtin_mask("bh6"), 0)


@pytest.mark.parametrize("name", ["smooth_convex", "concave", "star", "nonuniform", "test9"])
def test_turning_number_preserved(name):
    poly = benchmark_polygons()[name]
    for level in range(1, 8):
        poly = subdivide(poly, builtin_mask("bh6"), 1)
        assert discrete_curvature(poly).total_turning == pytest.approx(2 * np.pi, abs=1e-6)
