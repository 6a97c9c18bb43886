"""
Central Configuration Solver
One scalar root-solve for lambda turns four weighted areas into distances,
masses and coordinates; verification re-derives everything from positions.
"""
import math
import time
from dataclasses import dataclass, replace
from enum import Enum
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from core.config import Settings, get_settings
from core.geometry import (
    OPPOSITE_SIDES,
    determinant_areas,
    embed,
    heron_area_array,
    heron_areas,
    pairwise_distances,
    quad_planarity_residual,
    quad_planarity_scale,
)
from core.metrics import get_metrics_logger
from core.model import (
    PAIRS,
    CentralConfig,
    Classification,
    DistanceSet,
    EmptyBracketError,
    GeometryError,
    Hull,
    NoRootError,
    NonPhysicalRootError,
    OutOfDomainError,
    ResidualReport,
    Symmetry,
    WeightedAreas,
    nearly_equal,
    validate_areas,
)
from optimization.feasibility import FeasibilityGate, FeasibilityResult
from optimization.roots import find_roots

_PAIR_INDEX = {pair: k for k, pair in enumerate(PAIRS)}
ORDERING_RTOL = 1e-9


class RootResidual(Enum):
    QUAD_CONSTRAINT = "quad"
    PLANE_SUM = "plane"
    KITE_PYTHAGORAS = "kite"


@dataclass(frozen=True)
class SolverOptions:
    """
    Root-solve knobs. `residual_for_root=None` picks the quadratic
    constraint, or the kite Pythagoras closure when two A's coincide; the
    quadratic constraint and the plane sum serve as fallbacks.
    """
    tol_root: float = 1e-13
    max_iter: int = 200
    bracket_margin: float = 1e-9
    residual_for_root: Optional[RootResidual] = None
    grid_cells: int = 1024
    plane_tol: float = 1e-9
    verify_tol: float = 1e-8

    def __post_init__(self):
        if not self.tol_root > 0:
            raise ValueError(f"tol_root must be positive, got {self.tol_root}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")
        if not 0 < self.bracket_margin < 0.5:
            raise ValueError(f"bracket_margin must lie in (0, 0.5), got {self.bracket_margin}")
        if self.grid_cells < 2:
            raise ValueError(f"grid_cells must be at least 2, got {self.grid_cells}")

    @classmethod
    def from_settings(cls, settings: Optional[Settings] = None, **overrides) -> "SolverOptions":
        settings = settings or get_settings()
        values = dict(
            tol_root=settings.tol_root,
            max_iter=settings.max_iter,
            bracket_margin=settings.bracket_margin,
            grid_cells=settings.grid_cells,
            plane_tol=settings.accept_tol,
            verify_tol=settings.verify_tol,
        )
        values.update(overrides)
        return cls(**values)


AreasLike = Union[WeightedAreas, Sequence[float]]


def as_weighted_areas(a: AreasLike) -> WeightedAreas:
    return a if isinstance(a, WeightedAreas) else WeightedAreas.from_sequence(a)


def pair_products(a: WeightedAreas) -> np.ndarray:
    """A_j A_k in PAIRS order."""
    return np.array([a.product(i, j) for i, j in PAIRS])


# =============================================================================
# LAMBDA -> DISTANCES
# =============================================================================

def distances_from_lambda(a: AreasLike, lam: float) -> DistanceSet:
    """
    r_jk = (1 + lambda A_j A_k)^(-1/3) for the six pairs.

    Raises:
        OutOfDomainError: Some 1 + lambda A_j A_k is not positive
    """
    a = as_weighted_areas(a)
    values = {}
    for i, j in PAIRS:
        base = 1.0 + lam * a.product(i, j)
        if not base > 0:
            raise OutOfDomainError(
                f"1 + lambda A{i} A{j} = {base:.6g} <= 0 at lambda = {lam:.12g}"
            )
        values[(i, j)] = base ** (-1.0 / 3.0)
    return DistanceSet.from_pairs(values)


def lambda_bracket(a: AreasLike, opts: Optional[SolverOptions] = None) -> Tuple[float, float]:
    """
    Interval of negative lambda on which every distance is defined.

    Both ends sit a relative margin inside (-1/P_max, 0), where P_max is the
    largest positive product A_j A_k, so brackets scale as 1/k^2 with A.

    Raises:
        EmptyBracketError: No positive product exists
    """
    a = as_weighted_areas(a)
    margin = (opts or SolverOptions()).bracket_margin
    positive = [p for p in pair_products(a) if p > 0]
    if not positive:
        raise EmptyBracketError(f"No positive product A_j A_k for {a.as_tuple()}")
    p_max = max(positive)
    return -(1.0 - margin) / p_max, -margin / p_max


# =============================================================================
# ROOT RESIDUALS
# =============================================================================

def distance_column(r: np.ndarray, i: int, j: int) -> np.ndarray:
    """Column of an (n, 6) distance array for the pair (i, j)."""
    return r[:, _PAIR_INDEX[(min(i, j), max(i, j))]]


def area_columns(r: np.ndarray, signs: Sequence[float]) -> np.ndarray:
    """(n, 4) signed Heron areas from an (n, 6) distance array."""
    columns = []
    for j in range(1, 5):
        sides = [distance_column(r, *pair) for pair in OPPOSITE_SIDES[j]]
        columns.append(signs[j - 1] * heron_area_array(*sides))
    return np.stack(columns, axis=1)


def quad_residual_columns(r: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Row-wise sum of r_ij^2 S_i S_j over ordered pairs."""
    total = np.zeros(r.shape[0])
    for i, j in PAIRS:
        total += 2.0 * distance_column(r, i, j) ** 2 * s[:, i - 1] * s[:, j - 1]
    return total


def kite_labelling(a: WeightedAreas) -> Optional[Tuple[int, int, int, int]]:
    """
    Old labels that become new labels 1..4 for a kite: the equal pair at 1
    and 3, the axis through 2 and 4 (concave: the interior particle at 4).
    """
    for i, j in combinations(range(1, 5), 2):
        if nearly_equal(a.get(i), a.get(j)):
            k, l = (x for x in range(1, 5) if x not in (i, j))
            if a.hull == Hull.CONCAVE and a.get(k) < 0:
                k, l = l, k
            return (i, k, j, l)
    return None


class DziobekResidual:
    """
    Planarity residual g(lambda) with distances from the Dziobek relation
    and areas from Heron with signs inherited from the A's. NaN where a
    distance or triangle is undefined.
    """

    def __init__(self, a: WeightedAreas, kind: RootResidual = RootResidual.QUAD_CONSTRAINT):
        self.a = a
        self.kind = kind
        self.products = pair_products(a)
        self.signs = np.array([1.0 if a.get(j) > 0 else -1.0 for j in range(1, 5)])
        self.perm = kite_labelling(a) if kind == RootResidual.KITE_PYTHAGORAS else None
        if kind == RootResidual.KITE_PYTHAGORAS and self.perm is None:
            raise ValueError(f"Kite residual requested for non-kite areas {a.as_tuple()}")

    def distances(self, lams: np.ndarray) -> np.ndarray:
        base = 1.0 + np.outer(lams, self.products)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(base > 0, np.abs(base) ** (-1.0 / 3.0), np.nan)

    def __call__(self, lams: np.ndarray) -> np.ndarray:
        lams = np.atleast_1d(np.asarray(lams, dtype=float))
        r = self.distances(lams)

        if self.kind == RootResidual.KITE_PYTHAGORAS:
            p = self.perm
            r12 = distance_column(r, p[0], p[1])
            r13 = distance_column(r, p[0], p[2])
            r14 = distance_column(r, p[0], p[3])
            r24 = distance_column(r, p[1], p[3])
            half = r13 ** 2 / 4.0
            with np.errstate(invalid="ignore"):
                far = np.sqrt(r12 ** 2 - half)
                near = np.sqrt(r14 ** 2 - half)
            if self.a.hull == Hull.CONCAVE:
                return r24 - far + near
            return r24 - far - near

        s = area_columns(r, self.signs)
        if self.kind == RootResidual.PLANE_SUM:
            return s.sum(axis=1)
        return quad_residual_columns(r, s)

    def scalar(self, lam: float) -> float:
        return float(self(np.array([lam]))[0])


def candidate_roots(a: WeightedAreas, kind: RootResidual, opts: SolverOptions,
                    failures: Optional[List[str]] = None) -> List[float]:
    """
    Sign-change roots of the residual on the bracket, doubling the grid once
    if none. Brackets Brent could not refine are appended to `failures`.
    """
    lo, hi = lambda_bracket(a, opts)
    p_max = 1.0 / (hi - lo) * (1.0 - 2.0 * opts.bracket_margin)
    xtol = opts.tol_root / p_max
    residual = DziobekResidual(a, kind)

    cells = opts.grid_cells
    for _ in range(2):
        roots = find_roots(residual, residual.scalar, np.linspace(lo, hi, cells + 1),
                           xtol=xtol, max_iter=opts.max_iter, failures=failures)
        if roots:
            return roots
        cells *= 2
    return []


# =============================================================================
# CONFIGURATION ASSEMBLY
# =============================================================================

def build_config(a: AreasLike, lam: float,
                 classification: Optional[Classification] = None,
                 alternate_roots: Sequence[float] = ()) -> CentralConfig:
    """
    Distances, Heron areas, masses m_j = S_j / A_j and coordinates at a
    given lambda.

    Raises:
        OutOfDomainError, ImpossibleTriangleError, InconsistentDistancesError
    """
    a = as_weighted_areas(a)
    classification = classification or validate_areas(a)
    d = distances_from_lambda(a, lam)
    d.check_triangles()
    s = heron_areas(d, a)
    masses = tuple(s.get(j) / a.get(j) for j in range(1, 5))
    embedding = embed(d, s, masses)
    return CentralConfig(
        areas_in=a,
        lam=lam,
        sigma=1.0,
        distances=d,
        signed_areas=s,
        masses=masses,
        coords=embedding.points,
        classification=classification,
        diagnostics=verify_points(embedding.as_array(), masses),
        alternate_roots=tuple(alternate_roots),
    )


def _evaluate(a: WeightedAreas, lam: float, classification: Classification,
              gate: FeasibilityGate) -> FeasibilityResult:
    try:
        config = build_config(a, lam, classification)
    except (GeometryError, OutOfDomainError) as e:
        return gate.check_candidate(lam, None, f"{e.code}: {e}")
    return gate.check_candidate(lam, config)


def solve(a: AreasLike, opts: Optional[SolverOptions] = None) -> CentralConfig:
    """
    Solve the planar central configuration for four weighted areas.

    Scans the lambda bracket for sign changes of the planarity residual,
    refines each with Brent, builds a configuration at every root and keeps
    the physical one with the smallest central-equation residual. Other
    roots are reported in `alternate_roots`.

    Raises:
        AreaError: invalid input areas
        NoRootError: the residual never changes sign on the bracket
        NonPhysicalRootError: roots exist but none passes the gate
    """
    start = time.time()
    a = as_weighted_areas(a)
    opts = opts or SolverOptions.from_settings()
    classification = validate_areas(a)

    kind = opts.residual_for_root
    if kind is None:
        kind = RootResidual.KITE_PYTHAGORAS if classification.has(Symmetry.KITE) else RootResidual.QUAD_CONSTRAINT
    kinds = [kind] + [k for k in (RootResidual.QUAD_CONSTRAINT, RootResidual.PLANE_SUM) if k != kind]

    gate = FeasibilityGate(plane_tol=opts.plane_tol, central_tol=opts.verify_tol)
    rejected: List[FeasibilityResult] = []
    any_root = False
    failures: List[str] = []

    for residual_kind in kinds:
        if residual_kind == RootResidual.KITE_PYTHAGORAS and kite_labelling(a) is None:
            continue
        roots = candidate_roots(a, residual_kind, opts, failures)
        any_root = any_root or bool(roots)
        results = [_evaluate(a, lam, classification, gate) for lam in roots]
        feasible = gate.filter_candidates(results)
        rejected.extend(r for r in results if not r.is_feasible)
        if feasible:
            best = feasible[0]
            others = tuple(sorted(r.lam for r in results if r is not best))
            config = replace(best.config, alternate_roots=others)
            _log_solve(a, config, residual_kind, rejected, start)
            return config

    _log_failure(a, any_root, rejected, start)
    if not any_root:
        detail = f" ({'; '.join(failures)})" if failures else ""
        raise NoRootError(f"No sign change of the planarity residual for A = {a.as_tuple()}{detail}")
    reasons = "; ".join(v for r in rejected for v in r.violations)
    raise NonPhysicalRootError(f"No physical root for A = {a.as_tuple()}: {reasons}")


def _log_solve(a, config, kind, rejected, start):
    settings = get_settings()
    if not settings.metrics_enabled:
        return
    get_metrics_logger(settings.log_dir).log_solve(
        areas=a.as_tuple(), lam=config.lam, residual=kind.value,
        worst_residual=config.diagnostics.worst(),
        roots_rejected=[r.to_dict() for r in rejected],
        latency_ms=(time.time() - start) * 1000,
    )


def _log_failure(a, any_root, rejected, start):
    settings = get_settings()
    if not settings.metrics_enabled:
        return
    get_metrics_logger(settings.log_dir).log_error(
        "solver", "NonPhysicalRoot" if any_root else "NoRoot",
        {"areas": a.as_tuple(), "rejected": [r.to_dict() for r in rejected],
         "latency_ms": (time.time() - start) * 1000},
    )


# =============================================================================
# INDEPENDENT VERIFICATION
# =============================================================================

def dziobek_matrix(areas: Sequence[float]) -> np.ndarray:
    """
    Antisymmetric 6x6 coefficient matrix of the Laura-Andoyer system acting
    on u = (r23^-3, r31^-3, r12^-3, r41^-3, r42^-3, r43^-3).
    """
    a1, a2, a3, a4 = areas
    return np.array([
        [0.0, a4, -a4, 0.0, a1, -a1],
        [-a4, 0.0, a4, -a2, 0.0, a2],
        [a4, -a4, 0.0, a3, -a3, 0.0],
        [0.0, a2, -a3, 0.0, a3, -a2],
        [-a1, 0.0, a3, -a3, 0.0, a1],
        [a1, -a2, 0.0, a2, -a1, 0.0],
    ])


def inverse_cubes(d: DistanceSet) -> Dict[str, float]:
    """r_jk^-3 keyed in the Laura-Andoyer order."""
    return {
        "23": d.r23 ** -3, "31": d.r13 ** -3, "12": d.r12 ** -3,
        "41": d.r14 ** -3, "42": d.r24 ** -3, "43": d.r34 ** -3,
    }


def newtonian_accelerations(points: np.ndarray, masses: Sequence[float]) -> np.ndarray:
    """sum_j m_j (r_j - r_i) / r_ij^3 for each particle (G = 1)."""
    x = np.asarray(points, dtype=float)
    m = np.asarray(masses, dtype=float)
    diff = x[None, :, :] - x[:, None, :]
    dist = np.linalg.norm(diff, axis=2)
    np.fill_diagonal(dist, np.inf)
    return np.einsum("j,ijk->ik", m, diff / dist[:, :, None] ** 3)


def sigma_from_positions(points: np.ndarray, masses: Sequence[float]) -> float:
    """sigma = sum m_i m_j / r_ij  /  sum m_i m_j r_ij^2 over pairs."""
    x = np.asarray(points, dtype=float)
    m = np.asarray(masses, dtype=float)
    potential = 0.0
    inertia = 0.0
    for i, j in combinations(range(len(m)), 2):
        r = float(np.linalg.norm(x[i] - x[j]))
        potential += m[i] * m[j] / r
        inertia += m[i] * m[j] * r * r
    return potential / inertia


def areas_from_configuration(points: np.ndarray, masses: Sequence[float]) -> WeightedAreas:
    """Forward map: determinant areas divided by masses."""
    s = determinant_areas(points)
    return WeightedAreas(*(s.get(j) / masses[j - 1] for j in range(1, 5)))


def _sigma_expressions(u: Dict[str, float]) -> List[float]:
    scale = max(u.values())
    pairs = [
        (u["12"] * u["43"] - u["23"] * u["41"], u["12"] + u["43"] - u["23"] - u["41"]),
        (u["31"] * u["42"] - u["12"] * u["43"], u["31"] + u["42"] - u["12"] - u["43"]),
        (u["23"] * u["41"] - u["31"] * u["42"], u["23"] + u["41"] - u["31"] - u["42"]),
    ]
    # denominators vanish identically on kites
    return [num / den for num, den in pairs if abs(den) > 1e-5 * scale]


def verify_points(points: np.ndarray, masses: Sequence[float]) -> ResidualReport:
    """
    Residuals computed from positions and masses only.

    central_eq:     max |B r_i - F_i| / max |F_i| with B = -sigma M
    laura_andoyer:  |M(A) u|_inf / (max|A| max u)
    sigma_identity: deviation of sigma (and its three distance forms) from 1
    plane_sum, quad_constraint: normalised planarity residuals
    """
    m = np.asarray(masses, dtype=float)
    x = np.asarray(points, dtype=float)
    x = x - m @ x / m.sum()

    forces = newtonian_accelerations(x, m)
    sigma = sigma_from_positions(x, m)
    b = -sigma * m.sum()
    central = float(np.max(np.linalg.norm(b * x - forces, axis=1)) / np.max(np.linalg.norm(forces, axis=1)))

    d = pairwise_distances(x)
    s = determinant_areas(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        areas = np.array(s.as_tuple()) / m
    u = inverse_cubes(d)
    u_vec = np.array([u["23"], u["31"], u["12"], u["41"], u["42"], u["43"]])
    laura = float(np.max(np.abs(dziobek_matrix(areas) @ u_vec)) / (np.max(np.abs(areas)) * u_vec.max()))

    deviations = [abs(sigma - 1.0)] + [abs(v - 1.0) for v in _sigma_expressions(u)]

    plane = abs(sum(s.as_tuple())) / sum(abs(v) for v in s.as_tuple())
    quad = abs(quad_planarity_residual(d, s)) / quad_planarity_scale(d, s)

    return ResidualReport(
        plane_sum=plane,
        quad_constraint=quad,
        laura_andoyer=laura,
        central_eq=central,
        sigma_identity=max(deviations),
    )


def verify(c: CentralConfig) -> ResidualReport:
    """Independent residual report for a solved configuration; never raises."""
    return verify_points(np.array(c.coords), c.masses)


# =============================================================================
# THEOREM CHECKS
# =============================================================================

def canonical_labelling(a: WeightedAreas) -> Tuple[int, int, int, int]:
    """
    Old labels that become new labels 1..4 in the standard order:
    concave A1 >= A2 >= A3 > 0 > A4, convex A1 >= A3 > 0 > A2 >= A4.
    """
    positives = sorted(a.positive_labels, key=lambda j: -a.get(j))
    negatives = sorted(a.negative_labels, key=lambda j: -a.get(j))
    if a.hull == Hull.CONCAVE:
        return (positives[0], positives[1], positives[2], negatives[0])
    return (positives[0], negatives[0], positives[1], negatives[1])


def _chain(values: Sequence[float], rtol: float) -> bool:
    return all(x >= y - rtol * max(abs(x), abs(y)) for x, y in zip(values, values[1:]))


def ordering_check(c: CentralConfig, rtol: float = ORDERING_RTOL) -> bool:
    """
    Distance ordering after canonical relabelling:
    concave r12 >= r31 >= r23 >= 1 >= r43 >= r42 >= r41;
    convex 1 >= r23 >= r12 >= r41 and 1 >= r23 >= r43 >= r41.
    """
    d = c.distances.relabeled(canonical_labelling(c.areas_in))
    if c.classification.hull == Hull.CONCAVE:
        return _chain([d.r12, d.r13, d.r23, 1.0, d.r34, d.r24, d.r14], rtol)
    return _chain([1.0, d.r23, d.r12, d.r14], rtol) and _chain([1.0, d.r23, d.r34, d.r14], rtol)


def _coordinate_inverse_cubes(c: CentralConfig) -> Dict[Tuple[int, int], float]:
    d = pairwise_distances(np.array(c.coords))
    return {(i, j): d.get(i, j) ** -3 for i, j in PAIRS}


def quotient_residuals(c: CentralConfig) -> Dict[str, float]:
    """
    Lambda-free quotient relations A_i / A_j = (r_ik^-3 - 1) / (r_jk^-3 - 1)
    for both remaining k, cross-multiplied and normalised by max|A| max|r^-3 - 1|.
    """
    u = _coordinate_inverse_cubes(c)
    a = c.areas_in
    scale = max(abs(v) for v in a.as_tuple()) * max(abs(v - 1.0) for v in u.values())

    def w(i, k):
        return u[(min(i, k), max(i, k))] - 1.0

    residuals = {}
    for i, j in PAIRS:
        worst = 0.0
        for k in range(1, 5):
            if k in (i, j):
                continue
            lhs, rhs = a.get(i) * w(j, k), a.get(j) * w(i, k)
            worst = max(worst, abs(lhs - rhs) / scale)
        residuals[f"A{i}/A{j}"] = worst
    return residuals


def product_identity_residual(c: CentralConfig) -> float:
    """
    (r12^-3 - 1)(r43^-3 - 1) = (r31^-3 - 1)(r42^-3 - 1) = (r23^-3 - 1)(r41^-3 - 1)
    = lambda^2 A1 A2 A3 A4, as the largest deviation over max|r^-3 - 1|^2.
    """
    u = _coordinate_inverse_cubes(c)
    a = c.areas_in
    target = c.lam ** 2 * a.a1 * a.a2 * a.a3 * a.a4
    products = [
        (u[(1, 2)] - 1.0) * (u[(3, 4)] - 1.0),
        (u[(1, 3)] - 1.0) * (u[(2, 4)] - 1.0),
        (u[(2, 3)] - 1.0) * (u[(1, 4)] - 1.0),
    ]
    scale = max(abs(v - 1.0) for v in u.values()) ** 2
    return max(abs(p - target) for p in products) / scale


def residuals_pass(report: ResidualReport, tol: float) -> bool:
    return all(math.isfinite(v) for v in report.as_tuple()) and report.passes(tol)
