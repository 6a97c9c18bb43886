"""
Tetrad Domain Model
Value types shared by geometry, solver, symmetry, limits, orbits and the CLI
"""
import math
from dataclasses import dataclass, field, asdict
from enum import Enum
from itertools import combinations
from typing import Dict, Any, FrozenSet, Mapping, Sequence, Tuple, Union


# Pair order used everywhere a DistanceSet is flattened
PAIRS: Tuple[Tuple[int, int], ...] = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))

# Particle j's signed area S_j is the triangle of the other three, in this
# vertex order (determinant convention of the coordinate minors)
AREA_TRIANGLES: Dict[int, Tuple[int, int, int]] = {
    1: (2, 3, 4),
    2: (1, 4, 3),
    3: (1, 2, 4),
    4: (1, 3, 2),
}

SYMMETRY_RTOL = 1e-12
TRIANGLE_RTOL = 1e-10


# =============================================================================
# ENUMS
# =============================================================================

class Hull(Enum):
    CONCAVE = "concave"
    CONVEX = "convex"


class Symmetry(Enum):
    KITE = "kite"
    EQUILATERAL_CENTER = "equilateral_center"
    RHOMBUS = "rhombus"
    SQUARE = "square"
    ISOSCELES_TRAPEZIUM = "isosceles_trapezium"
    NONE = "none"


class LimitKind(Enum):
    EULER_CONVEX = "euler_convex"
    LAGRANGE_CONCAVE = "lagrange_concave"
    LAGRANGE_CONVEX = "lagrange_convex"
    COORBITAL = "coorbital"
    GENERAL_LAGRANGE = "general_lagrange"
    GENERAL_EULER_COLLINEAR = "general_euler_collinear"
    GENERAL_COORBITAL = "general_coorbital"
    MAXWELL_1P3 = "maxwell_1p3"


class SolveStatus(Enum):
    OK = "OK"
    NO_ROOT = "NoRoot"
    NON_PHYSICAL = "NonPhysicalRoot"
    INVALID = "Invalid"


# =============================================================================
# EXCEPTIONS
# =============================================================================

class TetradError(Exception):
    """Base error; `code` is the stable identifier used in CLI error objects."""
    code = "TetradError"

    def to_dict(self) -> Dict[str, str]:
        return {"error": self.code, "message": str(self)}


class AreaError(TetradError):
    code = "InvalidAreas"


class AllSameSignError(AreaError):
    code = "AllSameSign"


class ZeroAreaError(AreaError):
    code = "ZeroArea"


class NonFiniteError(AreaError):
    code = "NonFinite"


class GeometryError(TetradError):
    code = "GeometryError"


class ImpossibleTriangleError(GeometryError):
    code = "ImpossibleTriangle"


class NotKiteError(GeometryError):
    code = "NotKite"


class NegativeRadicandError(GeometryError):
    code = "NegativeRadicand"


class InconsistentDistancesError(GeometryError):
    code = "InconsistentDistances"


class SolverError(TetradError):
    code = "SolverError"


class NoRootError(SolverError):
    code = "NoRoot"


class NonPhysicalRootError(SolverError):
    code = "NonPhysicalRoot"


class OutOfDomainError(SolverError):
    code = "OutOfDomain"


class EmptyBracketError(SolverError):
    code = "EmptyBracket"


class LimitError(TetradError):
    code = "LimitError"


class LimitNoRootError(LimitError):
    code = "NoRoot"


class LimitDomainError(LimitError):
    code = "DomainError"


class OrbitError(TetradError):
    code = "OrbitError"


class InvalidConfigError(OrbitError):
    code = "InvalidConfig"


# =============================================================================
# HELPERS
# =============================================================================

def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def nearly_equal(x: float, y: float, rtol: float = SYMMETRY_RTOL) -> bool:
    """Exact equality, or relative closeness within rtol."""
    if x == y:
        return True
    return abs(x - y) <= rtol * max(abs(x), abs(y))


# =============================================================================
# DOMAIN TYPES
# =============================================================================

@dataclass(frozen=True)
class WeightedAreas:
    """
    The four input constants A_j = S_j / m_j.

    Construction validates the record and normalizes its orientation: a
    pattern with three negative entries is multiplied by -1 (solutions are
    invariant under a global sign flip). `flipped` records that it happened.
    """
    a1: float
    a2: float
    a3: float
    a4: float
    flipped: bool = field(default=False, compare=False)

    def __post_init__(self):
        values = (self.a1, self.a2, self.a3, self.a4)
        if not all(math.isfinite(v) for v in values):
            raise NonFiniteError(f"Weighted areas must be finite, got {values}")
        if any(v == 0 for v in values):
            raise ZeroAreaError(
                f"Zero weighted area in {values}; use the limits module for vanishing constants"
            )
        negatives = sum(1 for v in values if v < 0)
        if negatives in (0, 4):
            raise AllSameSignError(
                f"All weighted areas share one sign {values}; no planar configuration exists"
            )
        if negatives == 3:
            object.__setattr__(self, "a1", -self.a1)
            object.__setattr__(self, "a2", -self.a2)
            object.__setattr__(self, "a3", -self.a3)
            object.__setattr__(self, "a4", -self.a4)
            object.__setattr__(self, "flipped", not self.flipped)

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "WeightedAreas":
        values = [float(v) for v in values]
        if len(values) != 4:
            raise AreaError(f"Expected four weighted areas, got {len(values)}")
        return cls(*values)

    def get(self, j: int) -> float:
        return (self.a1, self.a2, self.a3, self.a4)[j - 1]

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.a1, self.a2, self.a3, self.a4)

    def scaled(self, k: float) -> "WeightedAreas":
        return WeightedAreas(*(k * v for v in self.as_tuple()))

    def relabeled(self, perm: Sequence[int]) -> "WeightedAreas":
        """New record whose label i carries the constant of old label perm[i-1]."""
        return WeightedAreas(*(self.get(p) for p in perm))

    def product(self, j: int, k: int) -> float:
        return self.get(j) * self.get(k)

    @property
    def hull(self) -> Hull:
        negatives = sum(1 for v in self.as_tuple() if v < 0)
        return Hull.CONCAVE if negatives == 1 else Hull.CONVEX

    @property
    def positive_labels(self) -> Tuple[int, ...]:
        return tuple(j for j in range(1, 5) if self.get(j) > 0)

    @property
    def negative_labels(self) -> Tuple[int, ...]:
        return tuple(j for j in range(1, 5) if self.get(j) < 0)


@dataclass(frozen=True)
class DistanceSet:
    """
    Six mutual distances in units of sigma^(-1/3).

    Construction only checks positivity: the root scan builds distance sets
    at trial lambdas whose triangles may be impossible. `check_triangles()`
    enforces the triangle inequality on all four triples and runs whenever
    a configuration is assembled.
    """
    r12: float
    r13: float
    r14: float
    r23: float
    r24: float
    r34: float

    def __post_init__(self):
        for name, value in zip(("r12", "r13", "r14", "r23", "r24", "r34"), self.as_tuple()):
            if not (math.isfinite(value) and value > 0):
                raise GeometryError(f"Distance {name} must be positive and finite, got {value}")

    @classmethod
    def from_pairs(cls, values: Mapping[Tuple[int, int], float]) -> "DistanceSet":
        def lookup(i, j):
            return values[(i, j)] if (i, j) in values else values[(j, i)]
        return cls(*(float(lookup(i, j)) for i, j in PAIRS))

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "DistanceSet":
        return cls(*(float(v) for v in values))

    def get(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        if i > j:
            i, j = j, i
        return getattr(self, f"r{i}{j}")

    def as_tuple(self) -> Tuple[float, ...]:
        return (self.r12, self.r13, self.r14, self.r23, self.r24, self.r34)

    def as_dict(self) -> Dict[str, float]:
        return {f"r{i}{j}": self.get(i, j) for i, j in PAIRS}

    def relabeled(self, perm: Sequence[int]) -> "DistanceSet":
        """Distances seen under new labels: new (i, j) is old (perm[i-1], perm[j-1])."""
        return DistanceSet(*(self.get(perm[i - 1], perm[j - 1]) for i, j in PAIRS))

    def triangle_slack(self) -> float:
        """
        Smallest relative triangle-inequality slack over the four triples.
        Negative values mean some triple violates the inequality; zero means
        a degenerate (collinear) triple.
        """
        worst = math.inf
        for i, j, k in combinations(range(1, 5), 3):
            sides = sorted((self.get(i, j), self.get(j, k), self.get(i, k)))
            worst = min(worst, (sides[0] + sides[1] - sides[2]) / sides[2])
        return worst

    def check_triangles(self, rtol: float = TRIANGLE_RTOL) -> None:
        """
        Raises:
            ImpossibleTriangleError: some triple violates the triangle inequality
        """
        slack = self.triangle_slack()
        if slack < -rtol:
            raise ImpossibleTriangleError(
                f"Distances {self.as_tuple()} violate the triangle inequality (slack {slack:.3e})"
            )

    def max_relative_difference(self, other: "DistanceSet") -> float:
        return max(abs(x - y) / max(abs(x), abs(y)) for x, y in zip(self.as_tuple(), other.as_tuple()))


@dataclass(frozen=True)
class SignedAreas:
    """Doubled directed triangle areas S_1..S_4."""
    s1: float
    s2: float
    s3: float
    s4: float

    def get(self, j: int) -> float:
        return (self.s1, self.s2, self.s3, self.s4)[j - 1]

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.s1, self.s2, self.s3, self.s4)

    def relabeled(self, perm: Sequence[int]) -> "SignedAreas":
        return SignedAreas(*(self.get(p) for p in perm))


@dataclass(frozen=True)
class Classification:
    hull: Hull
    symmetries: FrozenSet[Symmetry]

    def has(self, symmetry: Symmetry) -> bool:
        return symmetry in self.symmetries

    def to_dict(self) -> Dict[str, Any]:
        return {
            "hull": self.hull.value,
            "symmetries": sorted(s.value for s in self.symmetries),
        }


@dataclass(frozen=True)
class ResidualReport:
    """Scale-free residuals of the independent verification equations."""
    plane_sum: float
    quad_constraint: float
    laura_andoyer: float
    central_eq: float
    sigma_identity: float

    def __post_init__(self):
        if any(v < 0 for v in self.as_tuple()):
            raise ValueError(f"Residuals must be nonnegative: {self}")

    def as_tuple(self) -> Tuple[float, ...]:
        return (self.plane_sum, self.quad_constraint, self.laura_andoyer,
                self.central_eq, self.sigma_identity)

    def worst(self) -> float:
        return max(self.as_tuple())

    def passes(self, tol: float) -> bool:
        return self.worst() < tol

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


Point = Tuple[float, float]


@dataclass(frozen=True)
class CentralConfig:
    """Full solved record of one planar central configuration."""
    areas_in: WeightedAreas
    lam: float
    sigma: float
    distances: DistanceSet
    signed_areas: SignedAreas
    masses: Tuple[float, float, float, float]
    coords: Tuple[Point, Point, Point, Point]
    classification: Classification
    diagnostics: ResidualReport
    alternate_roots: Tuple[float, ...] = ()

    @property
    def total_mass(self) -> float:
        return sum(self.masses)

    def mass(self, j: int) -> float:
        return self.masses[j - 1]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "areas": list(self.areas_in.as_tuple()),
            "lambda": self.lam,
            "sigma": self.sigma,
            "distances": self.distances.as_dict(),
            "signed_areas": list(self.signed_areas.as_tuple()),
            "masses": list(self.masses),
            "coordinates": [list(p) for p in self.coords],
            "classification": self.classification.to_dict(),
            "residuals": self.diagnostics.to_dict(),
            "alternate_roots": list(self.alternate_roots),
        }


@dataclass(frozen=True)
class LimitSolution:
    """Output of an asymptotic-case solve."""
    kind: LimitKind
    distances: DistanceSet
    lambda_or_product: float
    aux: Mapping[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "distances": self.distances.as_dict(),
            "lambda_or_product": self.lambda_or_product,
            "aux": dict(self.aux),
        }


# =============================================================================
# OPERATIONS
# =============================================================================

def _equal_pairs(a: WeightedAreas) -> Tuple[Tuple[int, int], ...]:
    return tuple((i, j) for i, j in combinations(range(1, 5), 2)
                 if nearly_equal(a.get(i), a.get(j)))


def _trapezium_matchings(a: WeightedAreas) -> Tuple[Tuple[Tuple[int, int], Tuple[int, int]], ...]:
    """Pairings (p, n), (p', n') with A_p = -A_n and A_p' = -A_n'."""
    positives, negatives = a.positive_labels, a.negative_labels
    if len(positives) != 2 or len(negatives) != 2:
        return ()
    found = []
    p, q = positives
    for n, o in (negatives, negatives[::-1]):
        if nearly_equal(a.get(p), -a.get(n)) and nearly_equal(a.get(q), -a.get(o)):
            found.append(((p, n), (q, o)))
    return tuple(found)


def symmetry_tags(a: WeightedAreas) -> FrozenSet[Symmetry]:
    """Symmetries implied by exact (or 1e-12 relative) equalities among the A's."""
    tags = set()
    pairs = _equal_pairs(a)
    if pairs:
        tags.add(Symmetry.KITE)

    positives, negatives = a.positive_labels, a.negative_labels
    if len(positives) == 3 and all(nearly_equal(a.get(positives[0]), a.get(j)) for j in positives[1:]):
        tags.add(Symmetry.EQUILATERAL_CENTER)

    if (len(positives) == 2 and len(negatives) == 2
            and nearly_equal(a.get(positives[0]), a.get(positives[1]))
            and nearly_equal(a.get(negatives[0]), a.get(negatives[1]))):
        tags.add(Symmetry.RHOMBUS)

    if _trapezium_matchings(a):
        tags.add(Symmetry.ISOSCELES_TRAPEZIUM)
        magnitudes = [abs(v) for v in a.as_tuple()]
        if all(nearly_equal(magnitudes[0], m) for m in magnitudes[1:]):
            tags.update({Symmetry.SQUARE, Symmetry.RHOMBUS, Symmetry.KITE})

    if not tags:
        tags.add(Symmetry.NONE)
    return frozenset(tags)


def validate_areas(a: Union[WeightedAreas, Sequence[float]]) -> Classification:
    """
    Classify a set of weighted areas.

    Raises:
        NonFiniteError, ZeroAreaError, AllSameSignError
    """
    if not isinstance(a, WeightedAreas):
        a = WeightedAreas.from_sequence(a)
    return Classification(hull=a.hull, symmetries=symmetry_tags(a))
