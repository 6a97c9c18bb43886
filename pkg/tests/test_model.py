"""
Tests for the Tetrad domain model
"""
import math

import pytest

from core.model import (
    AllSameSignError,
    AreaError,
    DistanceSet,
    GeometryError,
    Hull,
    ImpossibleTriangleError,
    NoRootError,
    NonFiniteError,
    ResidualReport,
    Symmetry,
    WeightedAreas,
    ZeroAreaError,
    nearly_equal,
    symmetry_tags,
    validate_areas,
)


# ===== FIXTURES =====

@pytest.fixture
def distances():
    return DistanceSet(r12=1.0, r13=2.0, r14=3.0, r23=4.0, r24=5.0, r34=6.0)


# ===== WEIGHTED AREAS =====

def test_rejects_non_finite():
    with pytest.raises(NonFiniteError):
        WeightedAreas(1.0, math.nan, 1.0, -1.0)
    with pytest.raises(NonFiniteError):
        WeightedAreas(1.0, math.inf, 1.0, -1.0)


def test_rejects_zero():
    with pytest.raises(ZeroAreaError):
        WeightedAreas(1.0, 0.0, 1.0, -1.0)


@pytest.mark.parametrize("values", [(1, 1, 1, 1), (-1, -2, -3, -4)])
def test_rejects_single_sign(values):
    with pytest.raises(AllSameSignError):
        WeightedAreas(*values)


def test_area_errors_share_base():
    with pytest.raises(AreaError):
        WeightedAreas.from_sequence([1.0, 2.0, 3.0])


def test_three_negatives_are_flipped():
    a = WeightedAreas(-1.0, -2.0, -3.0, 4.0)
    assert a.as_tuple() == (1.0, 2.0, 3.0, -4.0)
    assert a.flipped
    assert a.hull == Hull.CONCAVE


def test_hull_from_sign_pattern():
    assert WeightedAreas(5, 6, 4, -8).hull == Hull.CONCAVE
    assert WeightedAreas(15, -6, 3, -4).hull == Hull.CONVEX
    assert WeightedAreas(15, -6, 3, -4).negative_labels == (2, 4)
    assert WeightedAreas(15, -6, 3, -4).positive_labels == (1, 3)


def test_relabeled_moves_constants():
    a = WeightedAreas(1.0, 2.0, 3.0, -4.0)
    b = a.relabeled((4, 3, 2, 1))
    assert b.as_tuple() == (-4.0, 3.0, 2.0, 1.0)
    assert b.relabeled((4, 3, 2, 1)) == a


def test_scaled_and_product():
    a = WeightedAreas(1.0, 2.0, 3.0, -4.0).scaled(2.0)
    assert a.as_tuple() == (2.0, 4.0, 6.0, -8.0)
    assert a.product(2, 4) == -32.0


# ===== DISTANCE SET =====

def test_distance_lookup_is_symmetric(distances):
    assert distances.get(1, 2) == distances.get(2, 1) == 1.0
    assert distances.get(4, 3) == 6.0
    assert distances.get(2, 2) == 0.0


def test_distance_dict_keys(distances):
    assert list(distances.as_dict()) == ["r12", "r13", "r14", "r23", "r24", "r34"]


def test_distance_relabel(distances):
    swapped = distances.relabeled((2, 1, 3, 4))
    assert swapped.r12 == distances.r12
    assert swapped.r13 == distances.r23
    assert swapped.r24 == distances.r14
    assert swapped.relabeled((2, 1, 3, 4)) == distances


def test_distance_must_be_positive():
    with pytest.raises(GeometryError):
        DistanceSet(1.0, 1.0, 1.0, 1.0, -1.0, 1.0)


def test_from_pairs_accepts_either_order():
    d = DistanceSet.from_pairs({(2, 1): 1.0, (1, 3): 2.0, (4, 1): 3.0, (2, 3): 4.0, (2, 4): 5.0, (3, 4): 6.0})
    assert d.as_tuple() == (1.0, 2.0, 3.0, 4.0, 5.0, 6.0)


def test_triangle_slack_unit_square():
    s = math.sqrt(2.0)
    d = DistanceSet(r12=1.0, r13=s, r14=1.0, r23=1.0, r24=s, r34=1.0)
    assert d.triangle_slack() == pytest.approx((2.0 - s) / s)


def test_check_triangles(distances):
    s = math.sqrt(2.0)
    DistanceSet(r12=1.0, r13=s, r14=1.0, r23=1.0, r24=s, r34=1.0).check_triangles()
    DistanceSet(r12=1.0, r13=2.0, r14=1.0, r23=1.0, r24=2.0, r34=1.0).check_triangles()
    with pytest.raises(ImpossibleTriangleError, match="triangle inequality"):
        distances.check_triangles()


# ===== REPORTS AND ERRORS =====

def test_residual_report_rejects_negative():
    with pytest.raises(ValueError):
        ResidualReport(0.0, 0.0, -1e-3, 0.0, 0.0)


def test_residual_report_worst():
    report = ResidualReport(1e-15, 2e-12, 3e-14, 4e-10, 0.0)
    assert report.worst() == 4e-10
    assert report.passes(1e-8)
    assert not report.passes(1e-10)


def test_error_codes():
    assert NoRootError("x").to_dict() == {"error": "NoRoot", "message": "x"}
    assert AllSameSignError("y").code == "AllSameSign"


def test_nearly_equal():
    assert nearly_equal(1.0, 1.0 + 1e-13)
    assert not nearly_equal(1.0, 1.0 + 1e-10)
    assert nearly_equal(0.0, 0.0)


# ===== CLASSIFICATION =====

def test_equilateral_center_tags():
    tags = symmetry_tags(WeightedAreas(1, 1, 1, -1))
    assert Symmetry.EQUILATERAL_CENTER in tags
    assert Symmetry.KITE in tags


def test_square_tags():
    c = validate_areas([1, -1, 1, -1])
    assert c.hull == Hull.CONVEX
    for tag in (Symmetry.SQUARE, Symmetry.RHOMBUS, Symmetry.KITE, Symmetry.ISOSCELES_TRAPEZIUM):
        assert c.has(tag)


def test_rhombus_is_not_square():
    c = validate_areas([1, -2, 1, -2])
    assert c.has(Symmetry.RHOMBUS)
    assert not c.has(Symmetry.SQUARE)


def test_trapezium_tags():
    c = validate_areas([2, -2, 3, -3])
    assert c.symmetries == frozenset({Symmetry.ISOSCELES_TRAPEZIUM})


def test_generic_has_no_symmetry():
    c = validate_areas([5, 6, 4, -8])
    assert c.hull == Hull.CONCAVE
    assert c.symmetries == frozenset({Symmetry.NONE})
    assert c.to_dict() == {"hull": "concave", "symmetries": ["none"]}


def test_validate_propagates_errors():
    with pytest.raises(AllSameSignError):
        validate_areas([1, 2, 3, 4])
