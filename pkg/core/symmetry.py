"""
Symmetry Checks
Predicates linking equalities among the weighted areas to the geometry of
a solved configuration, plus constructors for the symmetric input families.
"""
import math
from enum import Enum
from itertools import combinations
from typing import Tuple

from core.model import CentralConfig, WeightedAreas, nearly_equal

GEOMETRY_RTOL = 1e-9
AREA_RTOL = 1e-12


class RhombusVerdict(Enum):
    NOT_RHOMBUS = "NotRhombus"
    RHOMBUS = "Rhombus"
    SQUARE = "Square"


def _eq(x: float, y: float) -> bool:
    return nearly_equal(x, y, GEOMETRY_RTOL)


def _others(*labels: int) -> Tuple[int, ...]:
    return tuple(j for j in range(1, 5) if j not in labels)


# =============================================================================
# PREDICATES
# =============================================================================

def _kite_holds(c: CentralConfig, i: int, j: int) -> bool:
    d, s = c.distances, c.signed_areas
    return (all(_eq(d.get(i, k), d.get(j, k)) for k in _others(i, j))
            and _eq(s.get(i), s.get(j))
            and _eq(c.mass(i), c.mass(j)))


def check_kite(c: CentralConfig) -> bool:
    """
    True iff some pair A_i = A_j, and for every such pair the configuration
    is mirror-symmetric in i and j (r_ik = r_jk, S_i = S_j, m_i = m_j).
    """
    a = c.areas_in
    pairs = [(i, j) for i, j in combinations(range(1, 5), 2)
             if nearly_equal(a.get(i), a.get(j), AREA_RTOL)]
    if not pairs:
        return False
    return all(_kite_holds(c, i, j) for i, j in pairs)


def check_equilateral_center(c: CentralConfig) -> bool:
    """
    True iff three A's coincide and the three equal particles form an
    equilateral triangle around the fourth with side/spoke ratio sqrt(3),
    equal masses, S_j = -S_o / 3 and A_o / A_j = -3 m_j / m_o.
    """
    a, d, s = c.areas_in, c.distances, c.signed_areas
    for trio in combinations(range(1, 5), 3):
        if not all(nearly_equal(a.get(trio[0]), a.get(k), AREA_RTOL) for k in trio[1:]):
            continue
        (o,) = _others(*trio)
        j, k, l = trio
        side = d.get(j, k)
        spokes = [d.get(o, x) for x in trio]
        return (_eq(side, d.get(k, l)) and _eq(side, d.get(j, l))
                and all(_eq(spokes[0], x) for x in spokes[1:])
                and side > spokes[0]
                and _eq(side / spokes[0], math.sqrt(3.0))
                and all(_eq(s.get(x), -s.get(o) / 3.0) for x in trio)
                and all(_eq(c.mass(j), c.mass(x)) for x in trio)
                and _eq(a.get(o) / a.get(j), -3.0 * c.mass(j) / c.mass(o)))
    return False


def check_rhombus_square(c: CentralConfig) -> RhombusVerdict:
    """
    Rhombus iff the two positive A's are equal and the two negative A's are
    equal (all four sides then coincide); Square iff additionally the
    diagonal products agree, which forces equal diagonals.
    """
    a, d, s = c.areas_in, c.distances, c.signed_areas
    positives, negatives = a.positive_labels, a.negative_labels
    if len(positives) != 2 or len(negatives) != 2:
        return RhombusVerdict.NOT_RHOMBUS
    p, q = positives
    n, o = negatives
    if not (nearly_equal(a.get(p), a.get(q), AREA_RTOL) and nearly_equal(a.get(n), a.get(o), AREA_RTOL)):
        return RhombusVerdict.NOT_RHOMBUS

    sides = [d.get(x, y) for x in (p, q) for y in (n, o)]
    if not (all(_eq(sides[0], x) for x in sides[1:])
            and _eq(s.get(p), s.get(q)) and _eq(s.get(p), -s.get(n)) and _eq(s.get(p), -s.get(o))):
        return RhombusVerdict.NOT_RHOMBUS

    if nearly_equal(a.get(p) * a.get(q), a.get(n) * a.get(o), AREA_RTOL):
        if _eq(d.get(p, q), d.get(n, o)):
            return RhombusVerdict.SQUARE
        return RhombusVerdict.NOT_RHOMBUS
    return RhombusVerdict.RHOMBUS


def check_isosceles_trapezium(c: CentralConfig) -> bool:
    """
    True iff the A's split into two opposite-sign pairs A_p = -A_n and
    A_q = -A_o, with equal diagonals r_pq = r_no, equal legs r_po = r_nq,
    S_p = -S_n, S_q = -S_o and m_p = m_n, m_q = m_o.
    """
    a, d, s = c.areas_in, c.distances, c.signed_areas
    positives, negatives = a.positive_labels, a.negative_labels
    if len(positives) != 2 or len(negatives) != 2:
        return False
    p, q = positives
    for n, o in (negatives, negatives[::-1]):
        if not (nearly_equal(a.get(p), -a.get(n), AREA_RTOL) and nearly_equal(a.get(q), -a.get(o), AREA_RTOL)):
            continue
        if (_eq(d.get(p, q), d.get(n, o)) and _eq(d.get(p, o), d.get(n, q))
                and _eq(s.get(p), -s.get(n)) and _eq(s.get(q), -s.get(o))
                and _eq(c.mass(p), c.mass(n)) and _eq(c.mass(q), c.mass(o))):
            return True
    return False


# =============================================================================
# SYMMETRIC FAMILIES
# =============================================================================

def kite_areas(a_pair: float, a_apex: float, a_other: float) -> WeightedAreas:
    """A1 = A3 = a_pair; A2 = a_apex and A4 = a_other lie on the axis."""
    return WeightedAreas(a_pair, a_apex, a_pair, a_other)


def equilateral_center_areas(a_center: float, a_vertex: float = 1.0) -> WeightedAreas:
    return WeightedAreas(a_vertex, a_vertex, a_vertex, a_center)


def rhombus_areas(a_positive: float, a_negative: float) -> WeightedAreas:
    return WeightedAreas(a_positive, a_negative, a_positive, a_negative)


def square_areas(a: float = 1.0) -> WeightedAreas:
    return WeightedAreas(a, -a, a, -a)


def trapezium_areas(a: float, b: float) -> WeightedAreas:
    """A1 = -A2 = a, A3 = -A4 = b."""
    return WeightedAreas(a, -a, b, -b)
