"""
Planar Geometry
Heron areas, planarity residuals, kite Pythagoras constraint and embedding
"""
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from core.model import (
    AREA_TRIANGLES,
    PAIRS,
    DistanceSet,
    GeometryError,
    Hull,
    ImpossibleTriangleError,
    InconsistentDistancesError,
    NegativeRadicandError,
    NotKiteError,
    SignedAreas,
    WeightedAreas,
    nearly_equal,
)

HERON_RTOL = 1e-12
EMBED_RTOL = 1e-9
KITE_RTOL = 1e-9

# Sides of the triangle opposite each particle, as pairs
OPPOSITE_SIDES = {
    1: ((2, 3), (3, 4), (2, 4)),
    2: ((1, 3), (3, 4), (1, 4)),
    3: ((1, 2), (2, 4), (1, 4)),
    4: ((1, 2), (2, 3), (1, 3)),
}


# =============================================================================
# HERON
# =============================================================================

def _heron_form(da: float, db: float, dc: float) -> float:
    """
    16 * area^2 in Kahan's stable ordering. Negative when the three
    lengths violate the triangle inequality.
    """
    a, b, c = sorted((da, db, dc), reverse=True)
    return (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))


def heron_signed_area(da: float, db: float, dc: float, sign: int = 1) -> float:
    """
    Doubled directed area of a triangle from its side lengths.

    Args:
        da, db, dc: Side lengths (nonnegative)
        sign: Orientation to attach (+1 / -1)

    Returns:
        sign * sqrt(q) / 2, where q is the Heron quadratic form in the
        squared sides; exactly 0 for collinear triples

    Raises:
        ImpossibleTriangleError: q below -1e-12 * (max side)^4
    """
    if min(da, db, dc) < 0:
        raise ImpossibleTriangleError(f"Negative side length in ({da}, {db}, {dc})")
    q = _heron_form(da, db, dc)
    scale = max(da, db, dc) ** 4
    if q < -HERON_RTOL * scale:
        raise ImpossibleTriangleError(
            f"Sides ({da:.6g}, {db:.6g}, {dc:.6g}) violate the triangle inequality"
        )
    if q <= 0:
        return 0.0
    return math.copysign(math.sqrt(q) / 2.0, sign) if sign else 0.0


def heron_area_array(da: np.ndarray, db: np.ndarray, dc: np.ndarray) -> np.ndarray:
    """Vectorised unsigned doubled areas; NaN where the triangle is impossible."""
    sides = np.sort(np.stack([da, db, dc]), axis=0)[::-1]
    a, b, c = sides[0], sides[1], sides[2]
    q = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
    impossible = q < -HERON_RTOL * a ** 4
    area = np.sqrt(np.clip(q, 0.0, None)) / 2.0
    return np.where(impossible, np.nan, area)


def heron_areas(d: DistanceSet, a: WeightedAreas) -> SignedAreas:
    """Signed areas S_j with magnitudes from Heron and signs inherited from A_j."""
    values = []
    for j in range(1, 5):
        sides = [d.get(*pair) for pair in OPPOSITE_SIDES[j]]
        values.append(heron_signed_area(*sides, sign=1 if a.get(j) > 0 else -1))
    return SignedAreas(*values)


# =============================================================================
# PLANARITY RESIDUALS
# =============================================================================

def plane_sum_residual(s: SignedAreas) -> float:
    """S1 + S2 + S3 + S4."""
    return s.s1 + s.s2 + s.s3 + s.s4


def quad_planarity_residual(d: DistanceSet, s: SignedAreas) -> float:
    """Sum over all ordered pairs of r_ij^2 S_i S_j (r_jj = 0)."""
    return 2.0 * sum(d.get(i, j) ** 2 * s.get(i) * s.get(j) for i, j in PAIRS)


def quad_planarity_scale(d: DistanceSet, s: SignedAreas) -> float:
    """Magnitude that makes the quadratic residual scale-free."""
    return 2.0 * sum(d.get(i, j) ** 2 * abs(s.get(i) * s.get(j)) for i, j in PAIRS)


def planarity_decomposition(points: np.ndarray, s: SignedAreas) -> float:
    """
    2 (sum S)(sum S |r|^2) - 2 |sum S r|^2 for explicit positions; equals the
    quadratic residual for any choice of origin.
    """
    weights = np.asarray(s.as_tuple())
    points = np.asarray(points, dtype=float)
    moment = weights @ points
    return float(2.0 * weights.sum() * (weights @ (points ** 2).sum(axis=1)) - 2.0 * moment @ moment)


# =============================================================================
# KITE
# =============================================================================

def _radicand_root(value: float, scale: float) -> float:
    if value < -KITE_RTOL * scale:
        raise NegativeRadicandError(f"Pythagoras radicand {value:.3e} is negative")
    return math.sqrt(max(value, 0.0))


def kite_pythagoras_residual(d: DistanceSet, hull: Hull) -> float:
    """
    Pythagoras closure of a kite labelled with its axis through 2 and 4 and
    the equal pair at 1 and 3.

    concave: r24 - sqrt(r12^2 - r13^2/4) + sqrt(r14^2 - r13^2/4)
    convex:  r24 - sqrt(r12^2 - r13^2/4) - sqrt(r14^2 - r13^2/4)
    """
    if not (nearly_equal(d.r12, d.r23, KITE_RTOL) and nearly_equal(d.r14, d.r34, KITE_RTOL)):
        raise NotKiteError(
            f"Expected r12 = r23 and r14 = r34, got ({d.r12:.6g}, {d.r23:.6g}), ({d.r14:.6g}, {d.r34:.6g})"
        )
    half = d.r13 ** 2 / 4.0
    scale = max(d.r12, d.r14, d.r13) ** 2
    far = _radicand_root(d.r12 ** 2 - half, scale)
    near = _radicand_root(d.r14 ** 2 - half, scale)
    if hull == Hull.CONCAVE:
        return d.r24 - far + near
    return d.r24 - far - near


# =============================================================================
# COORDINATES
# =============================================================================

def _det(p: np.ndarray, q: np.ndarray, r: np.ndarray) -> float:
    return float((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))


def determinant_areas(points: np.ndarray) -> SignedAreas:
    """Signed areas from coordinates via the 3x3 minors of the coordinate matrix."""
    points = np.asarray(points, dtype=float)
    return SignedAreas(*(
        _det(*(points[k - 1] for k in AREA_TRIANGLES[j])) for j in range(1, 5)
    ))


def pairwise_distances(points: np.ndarray) -> DistanceSet:
    points = np.asarray(points, dtype=float)
    return DistanceSet(*(
        float(np.hypot(*(points[i - 1] - points[j - 1]))) for i, j in PAIRS
    ))


@dataclass(frozen=True)
class PlanarEmbedding:
    """Four planar points in units of sigma^(-1/3)."""
    points: Tuple[Tuple[float, float], ...]

    def as_array(self) -> np.ndarray:
        return np.array(self.points, dtype=float)

    def distances(self) -> DistanceSet:
        return pairwise_distances(self.as_array())

    def signed_areas(self) -> SignedAreas:
        return determinant_areas(self.as_array())

    def center_of_mass(self, masses: Sequence[float]) -> np.ndarray:
        m = np.asarray(masses, dtype=float)
        return m @ self.as_array() / m.sum()

    def area_moment(self, s: SignedAreas) -> np.ndarray:
        """Sum of S_j r_j; zero for coplanar configurations."""
        return np.asarray(s.as_tuple()) @ self.as_array()


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def embed(d: DistanceSet, s: SignedAreas, masses: Sequence[float],
          rtol: float = EMBED_RTOL) -> PlanarEmbedding:
    """
    Realise a distance set as planar coordinates.

    Particle 1 starts at the origin and particle 2 on the positive x-axis.
    Particle 3 goes to the half-plane that gives S4 its sign; particle 4 is
    trilaterated from r14 and r24 on the branch matching the sign of S2, and
    must reproduce r34. The result is translated so the centre of mass sits
    at the origin.

    Raises:
        InconsistentDistancesError: no branch reproduces r34 (non-planar set)
    """
    if len(masses) != 4 or sum(masses) <= 0:
        raise GeometryError(f"Embedding needs four masses with positive total, got {masses}")

    scale = max(d.as_tuple())
    tol = rtol * scale
    r12 = d.r12

    x3 = (d.r13 ** 2 - d.r23 ** 2 + r12 ** 2) / (2.0 * r12)
    h3_sq = d.r13 ** 2 - x3 ** 2
    if h3_sq < -rtol * scale ** 2:
        raise InconsistentDistancesError("Triangle (1, 2, 3) cannot be realised")
    # S4 = det(1, 3, 2) = -r12 * y3
    y3 = -_sign(s.s4) * math.sqrt(max(h3_sq, 0.0))

    x4 = (d.r14 ** 2 - d.r24 ** 2 + r12 ** 2) / (2.0 * r12)
    h4_sq = d.r14 ** 2 - x4 ** 2
    if h4_sq < -rtol * scale ** 2:
        raise InconsistentDistancesError("Triangle (1, 2, 4) cannot be realised")
    h4 = math.sqrt(max(h4_sq, 0.0))

    # S2 = det(1, 4, 3) = x4 * y3 - x3 * y4
    branches = sorted((h4, -h4), key=lambda y4: _sign(x4 * y3 - x3 * y4) != _sign(s.s2))
    best_error = math.inf
    for y4 in branches:
        error = abs(math.hypot(x4 - x3, y4 - y3) - d.r34)
        if error <= tol:
            points = np.array([[0.0, 0.0], [r12, 0.0], [x3, y3], [x4, y4]])
            m = np.asarray(masses, dtype=float)
            points -= m @ points / m.sum()
            return PlanarEmbedding(points=tuple((float(x), float(y)) for x, y in points))
        best_error = min(best_error, error)

    raise InconsistentDistancesError(
        f"Neither trilateration branch reproduces r34 = {d.r34:.12g} (closest miss {best_error:.3e})"
    )


def embedding_error(d: DistanceSet, e: PlanarEmbedding) -> float:
    """Largest relative mismatch between a distance set and an embedding."""
    return d.max_relative_difference(e.distances())
