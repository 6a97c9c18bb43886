"""
Tests for planar geometry: Heron, planarity residuals, kites and embedding
"""
import math

import numpy as np
import pytest

from core.geometry import (
    PlanarEmbedding,
    determinant_areas,
    embed,
    embedding_error,
    heron_area_array,
    heron_areas,
    heron_signed_area,
    kite_pythagoras_residual,
    pairwise_distances,
    plane_sum_residual,
    planarity_decomposition,
    quad_planarity_residual,
    quad_planarity_scale,
)
from core.model import (
    DistanceSet,
    Hull,
    ImpossibleTriangleError,
    InconsistentDistancesError,
    NotKiteError,
    SignedAreas,
    WeightedAreas,
)


# ===== FIXTURES =====

@pytest.fixture
def quad_points():
    return np.array([[0.0, 0.0], [4.0, 0.0], [1.0, 3.0], [1.5, 1.0]])


@pytest.fixture
def masses():
    return (1.0, 2.0, 3.0, 4.0)


# ===== HERON =====

def test_heron_is_doubled_area():
    assert heron_signed_area(3.0, 4.0, 5.0) == pytest.approx(12.0, rel=1e-15)
    assert heron_signed_area(1.0, 1.0, 1.0) == pytest.approx(math.sqrt(3.0) / 2.0, rel=1e-15)


def test_heron_sign_and_order():
    assert heron_signed_area(5.0, 3.0, 4.0, sign=-1) == -heron_signed_area(3.0, 4.0, 5.0)


def test_heron_collinear_is_zero():
    assert heron_signed_area(1.0, 2.0, 3.0) == 0.0


def test_heron_impossible_triangle():
    with pytest.raises(ImpossibleTriangleError):
        heron_signed_area(1.0, 1.0, 3.0)


def test_heron_array_marks_impossible():
    out = heron_area_array(np.array([3.0, 1.0]), np.array([4.0, 1.0]), np.array([5.0, 3.0]))
    assert out[0] == pytest.approx(12.0)
    assert math.isnan(out[1])


def test_heron_needle_triangle_is_stable():
    # area of a very thin isosceles triangle: base 1e-8, legs 1
    area = heron_signed_area(1.0, 1.0, 1e-8)
    assert area == pytest.approx(1e-8 * math.sqrt(1.0 - 0.25e-16), rel=1e-12)


def test_heron_areas_match_determinants(quad_points, masses):
    d = pairwise_distances(quad_points)
    s = determinant_areas(quad_points)
    a = WeightedAreas(*(s.get(j) / masses[j - 1] for j in range(1, 5)))
    heron = heron_areas(d, a)
    for x, y in zip(heron.as_tuple(), s.as_tuple()):
        assert x == pytest.approx(y, rel=1e-12)


# ===== PLANARITY =====

def test_unit_square_areas():
    s = determinant_areas(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))
    assert s.as_tuple() == (1.0, -1.0, 1.0, -1.0)
    assert plane_sum_residual(s) == 0.0


def test_planar_points_satisfy_quad_constraint(quad_points):
    d = pairwise_distances(quad_points)
    s = determinant_areas(quad_points)
    assert abs(quad_planarity_residual(d, s)) <= 1e-13 * quad_planarity_scale(d, s)
    assert abs(plane_sum_residual(s)) <= 1e-14 * sum(abs(v) for v in s.as_tuple())


def test_quad_residual_decomposition_any_weights(quad_points):
    d = pairwise_distances(quad_points)
    weights = SignedAreas(0.3, -1.7, 2.2, 0.9)
    expected = planarity_decomposition(quad_points, weights)
    assert quad_planarity_residual(d, weights) == pytest.approx(expected, rel=1e-12)
    shifted = planarity_decomposition(quad_points + np.array([5.0, -2.0]), weights)
    assert shifted == pytest.approx(expected, rel=1e-10)


def test_inflated_distance_breaks_planarity(quad_points):
    d = pairwise_distances(quad_points)
    s = determinant_areas(quad_points)
    bad = DistanceSet(*(d.as_tuple()[:5]), d.r34 * 1.05)
    assert abs(quad_planarity_residual(bad, s)) > 1e-3 * quad_planarity_scale(bad, s)


# ===== KITE =====

def test_kite_pythagoras_concave():
    points = np.array([[-1.0, 0.0], [0.0, 3.0], [1.0, 0.0], [0.0, 1.0]])
    d = pairwise_distances(points)
    assert abs(kite_pythagoras_residual(d, Hull.CONCAVE)) < 1e-14


def test_kite_pythagoras_convex():
    points = np.array([[-1.0, 0.0], [0.0, 3.0], [1.0, 0.0], [0.0, -1.0]])
    d = pairwise_distances(points)
    assert abs(kite_pythagoras_residual(d, Hull.CONVEX)) < 1e-14
    assert abs(kite_pythagoras_residual(d, Hull.CONCAVE)) > 1.0


def test_kite_pythagoras_requires_kite(quad_points):
    with pytest.raises(NotKiteError):
        kite_pythagoras_residual(pairwise_distances(quad_points), Hull.CONVEX)


# ===== EMBEDDING =====

def test_embed_reproduces_distances_and_orientation(quad_points, masses):
    d = pairwise_distances(quad_points)
    s = determinant_areas(quad_points)
    e = embed(d, s, masses)

    assert isinstance(e, PlanarEmbedding)
    assert embedding_error(d, e) < 1e-12
    for x, y in zip(e.signed_areas().as_tuple(), s.as_tuple()):
        assert x == pytest.approx(y, rel=1e-12)
    assert np.allclose(e.center_of_mass(masses), 0.0, atol=1e-14)
    assert np.allclose(e.area_moment(s), 0.0, atol=1e-12)


def test_embed_mirror_orientation(quad_points, masses):
    mirrored = quad_points * np.array([1.0, -1.0])
    d = pairwise_distances(mirrored)
    s = determinant_areas(mirrored)
    e = embed(d, s, masses)
    assert np.sign(e.signed_areas().as_tuple()).tolist() == np.sign(s.as_tuple()).tolist()


def test_embed_rejects_non_planar(quad_points, masses):
    d = pairwise_distances(quad_points)
    s = determinant_areas(quad_points)
    bad = DistanceSet(*(d.as_tuple()[:5]), d.r34 * 1.2)
    with pytest.raises(InconsistentDistancesError):
        embed(bad, s, masses)
