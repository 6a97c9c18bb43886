"""
Asymptotic Limits
Closed forms and one-dimensional root solves for the configurations reached
when a weighted area vanishes or diverges: Euler collinear, Lagrange
equilateral and the 1+3 coorbital ring.
"""
import math
from itertools import combinations
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from core.geometry import (
    OPPOSITE_SIDES,
    determinant_areas,
    embed,
    embedding_error,
    heron_signed_area,
)
from core.model import (
    PAIRS,
    DistanceSet,
    GeometryError,
    LimitDomainError,
    LimitKind,
    LimitNoRootError,
    LimitSolution,
    SignedAreas,
    WeightedAreas,
)
from optimization.roots import bracketed_root, find_roots
from optimization.solver import area_columns, distances_from_lambda, quad_residual_columns

SQRT3 = math.sqrt(3.0)
ENDPOINT_EPS = 1e-8

# Limiting A2/A1 of the Euler convex bound at the two extremes of A4/A1
EULER_BOUND_SMALL_A4 = (8.0 - math.sqrt(8.0)) / 7.0
EULER_BOUND_LARGE_A4 = (8.0 / math.sqrt(27.0) - 1.0) / 7.0


def _require(condition: bool, message: str):
    if not condition:
        raise LimitDomainError(message)


def _finite_nonzero(values: Sequence[float]) -> bool:
    return all(math.isfinite(v) and v != 0 for v in values)


def _signed_heron(d: DistanceSet, signs: Sequence[float]) -> SignedAreas:
    return SignedAreas(*(
        heron_signed_area(*(d.get(*pair) for pair in OPPOSITE_SIDES[j]), sign=int(math.copysign(1, signs[j - 1])))
        if signs[j - 1] != 0 else 0.0
        for j in range(1, 5)
    ))


def _dense_grid(length: float, points: int = 2048) -> np.ndarray:
    """Points in (0, length), clustered toward both ends."""
    low = np.geomspace(1e-9, 0.5, points)
    return length * np.unique(np.concatenate([low, 1.0 - low]))


def _embedded_error(d: DistanceSet, s: SignedAreas, masses: Sequence[float]) -> float:
    """Distance and area mismatch of an embedding; inf when it cannot be built."""
    try:
        e = embed(d, s, masses)
    except GeometryError:
        return math.inf
    scale = max(abs(v) for v in s.as_tuple())
    areas = determinant_areas(e.as_array())
    area_error = max(abs(x - y) for x, y in zip(areas.as_tuple(), s.as_tuple())) / scale
    return max(embedding_error(d, e), area_error)


# =============================================================================
# KITE LIMITS
# =============================================================================

def euler_convex_limit(a1: float, a4: float) -> LimitSolution:
    """
    Lower bound of A2 for the convex kite A1 = A3 as m2 -> 0, where 1, 4, 3
    become collinear with 4 at the midpoint.

    lambda = -7 / (8 A1^2 - A1 A4) in closed form; x = A2/A1 solves
    ((8-rho-7x)/(8-8rho))^(-2/3) - ((8-rho-7 rho x)/(8-8rho))^(-2/3) = 1
    with rho = A4/A1 on (0, (8-rho)/7).
    """
    _require(a1 > 0 > a4, f"euler_convex_limit needs a1 > 0 > a4, got ({a1}, {a4})")
    rho = a4 / a1
    lam = -7.0 / (8.0 * a1 * a1 - a1 * a4)
    scale = 8.0 - 8.0 * rho

    def f(x):
        return (((8.0 - rho - 7.0 * x) / scale) ** (-2.0 / 3.0)
                - ((8.0 - rho - 7.0 * rho * x) / scale) ** (-2.0 / 3.0) - 1.0)

    x_max = (8.0 - rho) / 7.0
    x = bracketed_root(f, 0.0, x_max * (1.0 - 1e-12), xtol=1e-15, label="Euler bound")
    d = distances_from_lambda(WeightedAreas(a1, x * a1, a1, a4), lam)
    return LimitSolution(
        kind=LimitKind.EULER_CONVEX,
        distances=d,
        lambda_or_product=lam,
        aux={"x": x, "a2_bound": x * a1, "rho": rho, "residual": abs(f(x))},
    )


def lagrange_concave_limit(a1: float, a4: float) -> LimitSolution:
    """
    A2 -> +inf with A1 = A3: 1, 3, 4 form a unit equilateral triangle and the
    massless particle 2 sits on the axis beyond 4 (angle 241 = 5 pi / 6).
    lambda A2 tends to (r42^-3 - 1) / A4 < 0.
    """
    _require(a1 > 0 > a4, f"lagrange_concave_limit needs a1 > 0 > a4, got ({a1}, {a4})")
    rho = a4 / a1

    def g(r):
        far = (1.0 + r * r + r * SQRT3) ** -1.5
        return (1.0 - r ** 3) - rho * r ** 3 * (far - 1.0)

    r42 = bracketed_root(g, ENDPOINT_EPS, 1.0, label="Lagrange concave distance")
    r12 = math.sqrt(1.0 + r42 * r42 + r42 * SQRT3)
    d = DistanceSet(r12=r12, r13=1.0, r14=1.0, r23=r12, r24=r42, r34=1.0)
    return LimitSolution(
        kind=LimitKind.LAGRANGE_CONCAVE,
        distances=d,
        lambda_or_product=(r42 ** -3 - 1.0) / a4,
        aux={"r42": r42, "angle_143": math.pi / 3.0, "angle_241": 5.0 * math.pi / 6.0,
             "residual": abs(g(r42))},
    )


def lagrange_convex_limit(a1: float, a2: float) -> LimitSolution:
    """
    A4 -> -inf with A1 = A3: 1, 2, 3 form a unit equilateral triangle and the
    massless particle 4 sits on the axis across the 1-3 side (angle 124 =
    pi / 6), so r42 lies in (1, sqrt 3). lambda A4 tends to (r42^-3 - 1) / A2 > 0.
    """
    _require(a1 > 0 > a2, f"lagrange_convex_limit needs a1 > 0 > a2, got ({a1}, {a2})")
    rho = a1 / a2

    def g(r):
        near = (1.0 + r * r - r * SQRT3) ** -1.5
        return (near - 1.0) - rho * (r ** -3 - 1.0)

    r42 = bracketed_root(g, 1.0, SQRT3, label="Lagrange convex distance")
    r41 = math.sqrt(1.0 + r42 * r42 - r42 * SQRT3)
    d = DistanceSet(r12=1.0, r13=1.0, r14=r41, r23=1.0, r24=r42, r34=r41)
    return LimitSolution(
        kind=LimitKind.LAGRANGE_CONVEX,
        distances=d,
        lambda_or_product=(r42 ** -3 - 1.0) / a2,
        aux={"r42": r42, "r41": r41, "angle_124": math.pi / 6.0, "residual": abs(g(r42))},
    )


def _ring_masses(r12: float, r31: float, a1: float, a2: float) -> Tuple[float, float]:
    """Satellite masses m1 (= m3) and m2 of a 1+3 ring with unit spokes."""
    s1 = heron_signed_area(r12, 1.0, 1.0, 1)
    s2 = heron_signed_area(r31, 1.0, 1.0, 1 if a2 > 0 else -1)
    return s1 / a1, s2 / a2


def coorbital_limit(a1: float, a2: float) -> LimitSolution:
    """
    A4 -> 0 with A1 = A3: the satellites 1, 2, 3 lie on the unit circle
    around particle 4, with r12 = r23 = 2 sin(theta/2) and r31 = 2 |sin theta|.

    a2 < 0: theta in (pi/6, pi/3), the centre outside the satellite triangle.
    a2 > 0: theta in (pi/2, 5 pi/6), the centre inside; no ring exists when
    a2/a1 does not exceed the Euler bound at vanishing A4.
    """
    _require(a1 > 0 and math.isfinite(a2) and a2 != 0,
             f"coorbital_limit needs a1 > 0 and a nonzero a2, got ({a1}, {a2})")
    rho = a2 / a1

    def f(r):
        chord = 2.0 * r * math.sqrt(max(1.0 - r * r / 4.0, 0.0))
        return (r ** -3 - 1.0) - rho * (chord ** -3 - 1.0)

    if a2 < 0:
        lo, hi = 2.0 * math.sin(math.pi / 12.0), 1.0
    else:
        lo, hi = math.sqrt(2.0), 2.0 * math.sin(5.0 * math.pi / 12.0)
    r12 = bracketed_root(f, lo, hi, label="coorbital chord")
    if r12 >= 2.0:
        raise LimitDomainError(f"Chord r12 = {r12} reaches the ring diameter")

    theta = 2.0 * math.asin(r12 / 2.0)
    r31 = 2.0 * abs(math.sin(theta))
    m1, m2 = _ring_masses(r12, r31, a1, a2)
    d = DistanceSet(r12=r12, r13=r31, r14=1.0, r23=r12, r24=1.0, r34=1.0)
    return LimitSolution(
        kind=LimitKind.COORBITAL,
        distances=d,
        lambda_or_product=(r12 ** -3 - 1.0) / (a1 * a2),
        aux={"theta": theta, "r12": r12, "r31": r31,
             "m1": 1.0, "m2": m2 / m1, "m3": 1.0, "residual": abs(f(r12))},
    )


# =============================================================================
# MAXWELL 1+3
# =============================================================================

def maxwell_restriction(theta: float) -> float:
    """1 - 1/(8|sin^3(theta/2)|) + 2 cos(theta) [1 - 1/(8|sin^3 theta|)]."""
    return (1.0 - 1.0 / (8.0 * abs(math.sin(theta / 2.0)) ** 3)
            + 2.0 * math.cos(theta) * (1.0 - 1.0 / (8.0 * abs(math.sin(theta)) ** 3)))


def maxwell_1p3_roots() -> Tuple[float, float]:
    """
    The two nontrivial angles of the equal-satellite 1+3 ring; the
    equilateral ring at 2 pi / 3 is excluded.
    """
    theta1 = bracketed_root(maxwell_restriction, math.pi / 6.0, math.pi / 3.0,
                            xtol=1e-16, label="Maxwell restriction")
    theta2 = bracketed_root(maxwell_restriction, 3.0 * math.pi / 4.0, 5.0 * math.pi / 6.0,
                            xtol=1e-16, label="Maxwell restriction")
    return theta1, theta2


def equal_mass_a2(theta: float) -> float:
    """A2 (with A1 = A3 = 1) that makes the ring at angle theta equal-mass."""
    return ((2.0 * math.sin(theta / 2.0)) ** -3 - 1.0) / ((2.0 * abs(math.sin(theta))) ** -3 - 1.0)


def maxwell_1p3_solution(which: int = 1) -> LimitSolution:
    """Coorbital ring at one of the two Maxwell angles, with its A2 and masses."""
    _require(which in (1, 2), f"which must be 1 or 2, got {which}")
    theta = maxwell_1p3_roots()[which - 1]
    a2 = equal_mass_a2(theta)
    ring = coorbital_limit(1.0, a2)
    return LimitSolution(
        kind=LimitKind.MAXWELL_1P3,
        distances=ring.distances,
        lambda_or_product=ring.lambda_or_product,
        aux={**ring.aux, "theta_maxwell": theta, "a2": a2},
    )


# =============================================================================
# GENERAL LIMITS
# =============================================================================

def _limit_distances(fixed: Dict[Tuple[int, int], float], free: Dict[Tuple[int, int], np.ndarray]) -> np.ndarray:
    """(n, 6) distance array mixing fixed values and per-sample columns."""
    n = len(next(iter(free.values())))
    r = np.empty((n, 6))
    for k, pair in enumerate(PAIRS):
        r[:, k] = free[pair] if pair in free else fixed[pair]
    return r


def _inverse_cube_root(base: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(base > 0, np.abs(base) ** (-1.0 / 3.0), np.nan)


def general_lagrange_limit(retained: Sequence[float], which: int, sign: int) -> LimitSolution:
    """
    One constant A_k diverges (with the given sign) and m_k vanishes; the
    three retained particles form a unit equilateral triangle. The finite
    product P = lambda A_k fixes r_kj^-3 = 1 + P A_j and is found from the
    planarity constraint; among several roots the one that embeds best wins.
    """
    retained = [float(v) for v in retained]
    _require(len(retained) == 3 and _finite_nonzero(retained), f"Need three finite nonzero constants, got {retained}")
    _require(which in (1, 2, 3, 4), f"Label must be 1..4, got {which}")
    _require(sign in (1, -1), f"sign must be +1 or -1, got {sign}")

    labels = [j for j in range(1, 5) if j != which]
    areas = dict(zip(labels, retained))
    signs = [float(sign) if j == which else math.copysign(1.0, areas[j]) for j in range(1, 5)]
    _require(0 < sum(1 for v in signs if v < 0) < 4, "All four constants share one sign")

    # lambda < 0, so P carries the opposite sign of A_k
    if sign > 0:
        limiting = [areas[j] for j in labels if areas[j] > 0]
    else:
        limiting = [-areas[j] for j in labels if areas[j] < 0]
    if limiting:
        length = 1.0 / max(limiting)
        magnitudes = _dense_grid(length)
    else:
        length = 1.0 / min(abs(v) for v in retained)
        magnitudes = length * np.geomspace(1e-9, 1e9, 4096)
    direction = -float(sign)
    grid = np.sort(direction * magnitudes)

    fixed = {pair: 1.0 for pair in combinations(labels, 2)}

    def residual(p):
        p = np.atleast_1d(np.asarray(p, dtype=float))
        free = {(min(which, j), max(which, j)): _inverse_cube_root(1.0 + p * areas[j]) for j in labels}
        r = _limit_distances(fixed, free)
        return quad_residual_columns(r, area_columns(r, signs))

    roots = find_roots(residual, lambda p: float(residual(p)[0]), grid, xtol=1e-15 * length)

    best: Optional[Tuple[float, float, DistanceSet]] = None
    for p in roots:
        values = dict(fixed)
        for j in labels:
            base = 1.0 + p * areas[j]
            if base <= 0:
                break
            values[(min(which, j), max(which, j))] = base ** (-1.0 / 3.0)
        else:
            d = DistanceSet.from_pairs(values)
            s = _signed_heron(d, signs)
            masses = [0.0 if j == which else s.get(j) / areas[j] for j in range(1, 5)]
            error = _embedded_error(d, s, masses)
            if not math.isfinite(error):
                continue
            if best is None or error < best[1]:
                best = (p, error, d)

    if best is None or not math.isfinite(best[1]):
        raise LimitNoRootError(f"No embeddable Lagrange limit for retained {retained}, label {which}")

    p, error, d = best
    aux = {"product": p, "which": float(which), "embedding_error": error}
    for j in labels:
        aux[f"r{min(which, j)}{max(which, j)}"] = d.get(which, j)
    return LimitSolution(kind=LimitKind.GENERAL_LAGRANGE, distances=d, lambda_or_product=p, aux=aux)


def _collinear_layout(a_i: float, a_m: float, a_o: float, lam: float) -> Tuple[float, float, float]:
    """Distances (r_im, r_mo, r_io) of the Dziobek relation at lambda."""
    return tuple((1.0 + lam * x * y) ** (-1.0 / 3.0) for x, y in ((a_i, a_m), (a_m, a_o), (a_i, a_o)))


def euler_collinear_residual(a_i: float, a_m: float, a_o: float, lam: float) -> float:
    """
    Central-configuration residual of three collinear bodies at 0, r_im and
    r_io, with masses from weighted directed distances m = d / a:
    d_i = x_o - x_m, d_m = x_i - x_o, d_o = x_m - x_i.
    """
    r_im, _, r_io = _collinear_layout(a_i, a_m, a_o, lam)
    x = np.array([0.0, r_im, r_io])
    directed = np.array([x[2] - x[1], x[0] - x[2], x[1] - x[0]])
    m = directed / np.array([a_i, a_m, a_o])
    if np.all(m < 0):
        m = -m
    if not np.all(m > 0):
        return math.inf
    x = x - m @ x / m.sum()

    forces = np.zeros(3)
    potential = inertia = 0.0
    for i, j in combinations(range(3), 2):
        r = abs(x[j] - x[i])
        forces[i] += m[j] * (x[j] - x[i]) / r ** 3
        forces[j] += m[i] * (x[i] - x[j]) / r ** 3
        potential += m[i] * m[j] / r
        inertia += m[i] * m[j] * r * r
    b = -(potential / inertia) * m.sum()
    return float(np.max(np.abs(b * x - forces)) / np.max(np.abs(forces)))


def general_euler_limit(trio: Sequence[float], labels: Sequence[int] = (1, 3, 4)) -> LimitSolution:
    """
    Three particles become collinear (the fourth triangle area vanishes).

    Stage 1 solves r_io = r_im + r_mo for lambda, the middle particle being
    the one whose constant has the odd sign. Stage 2 solves the planarity
    constraint with S_v = 0 for the fourth constant A_v.
    """
    trio = [float(v) for v in trio]
    labels = list(labels)
    _require(len(trio) == 3 and _finite_nonzero(trio), f"Need three finite nonzero constants, got {trio}")
    _require(len(set(labels)) == 3 and set(labels) <= {1, 2, 3, 4}, f"Bad labels {labels}")
    negatives = [k for k, v in enumerate(trio) if v < 0]
    _require(len(negatives) in (1, 2), f"Collinear trio needs mixed signs, got {trio}")

    odd = negatives[0] if len(negatives) == 1 else next(k for k in range(3) if trio[k] > 0)
    outer = [k for k in range(3) if k != odd]
    i_lab, m_lab, o_lab = labels[outer[0]], labels[odd], labels[outer[1]]
    a_i, a_m, a_o = trio[outer[0]], trio[odd], trio[outer[1]]
    (v_lab,) = [j for j in range(1, 5) if j not in labels]

    # Stage 1: collinearity fixes lambda
    p_outer = a_i * a_o

    def closure(lam):
        r_im, r_mo, r_io = _collinear_layout(a_i, a_m, a_o, lam)
        return r_io - r_im - r_mo

    lam = bracketed_root(closure, -(1.0 - 1e-12) / p_outer, -1e-12 / p_outer,
                         xtol=1e-16 / p_outer, label="collinear closure")

    # Stage 2: planarity with S_v = 0 fixes A_v
    areas = dict(zip(labels, trio))
    signs = [0.0 if j == v_lab else math.copysign(1.0, areas[j]) for j in range(1, 5)]
    def key(x, y):
        return (min(x, y), max(x, y))

    fixed = {key(x, y): (1.0 + lam * areas[x] * areas[y]) ** (-1.0 / 3.0)
             for x, y in combinations(labels, 2)}
    # exact collinearity
    fixed[key(i_lab, o_lab)] = fixed[key(i_lab, m_lab)] + fixed[key(m_lab, o_lab)]

    positive = max([v for v in trio if v > 0])
    negative = max([-v for v in trio if v < 0])
    upper, lower = 1.0 / (abs(lam) * positive), -1.0 / (abs(lam) * negative)
    grid = np.linspace(lower, upper, 4097)[1:-1]

    def residual(av):
        av = np.atleast_1d(np.asarray(av, dtype=float))
        free = {key(v_lab, j): _inverse_cube_root(1.0 + lam * av * areas[j]) for j in labels}
        r = _limit_distances(fixed, free)
        return quad_residual_columns(r, area_columns(r, signs))

    roots = find_roots(residual, lambda av: float(residual(av)[0]), grid, xtol=1e-15 * (upper - lower))

    best = None
    for av in roots:
        if av == 0:
            continue
        values = dict(fixed)
        for j in labels:
            values[key(v_lab, j)] = (1.0 + lam * av * areas[j]) ** (-1.0 / 3.0)
        d = DistanceSet.from_pairs(values)
        s = _signed_heron(d, signs)
        masses = [0.0 if j == v_lab else s.get(j) / areas[j] for j in range(1, 5)]
        if any(m < 0 for m in masses) or sum(masses) <= 0:
            continue
        error = _embedded_error(d, s, masses)
        if not math.isfinite(error):
            continue
        if best is None or error < best[1]:
            best = (av, error, d)

    if best is None or not math.isfinite(best[1]):
        raise LimitNoRootError(f"No embeddable fourth constant for collinear trio {trio}")

    av, error, d = best
    return LimitSolution(
        kind=LimitKind.GENERAL_EULER_COLLINEAR,
        distances=d,
        lambda_or_product=lam,
        aux={
            "lambda": lam,
            "a_v": av,
            "x": av / a_i,
            "middle": float(m_lab),
            "vanishing": float(v_lab),
            "embedding_error": error,
            "euler_residual": euler_collinear_residual(a_i, a_m, a_o, lam),
        },
    )


def general_coorbital_limit(satellites: Sequence[float]) -> LimitSolution:
    """
    Particle 4 dominates (A4 -> 0) and the satellites 1, 2, 3 sit on its unit
    circle. Chords follow the Dziobek relation; central angles
    phi = 2 arcsin(r/2) close to 2 pi when all constants are positive
    (centre inside), or as phi_io = phi_im + phi_mo when the middle
    satellite m has the odd sign.
    """
    s = [float(v) for v in satellites]
    _require(len(s) == 3 and _finite_nonzero(s), f"Need three finite nonzero constants, got {s}")
    if sum(1 for v in s if v < 0) >= 2:
        s = [-v for v in s]

    products = {(i, j): s[i - 1] * s[j - 1] for i, j in ((1, 2), (1, 3), (2, 3))}
    p_max = max(products.values())
    lam_min = -7.0 / (8.0 * p_max)

    def angles(lam):
        return {pair: 2.0 * math.asin(min(0.5 * (1.0 + lam * p) ** (-1.0 / 3.0), 1.0))
                for pair, p in products.items()}

    negatives = [k + 1 for k, v in enumerate(s) if v < 0]
    if negatives:
        (mid,) = negatives
        i, o = [k for k in (1, 2, 3) if k != mid]

        def closure(lam):
            phi = angles(lam)
            return phi[(i, o)] - phi[(min(i, mid), max(i, mid))] - phi[(min(mid, o), max(mid, o))]
    else:
        def closure(lam):
            return sum(angles(lam).values()) - 2.0 * math.pi

    lam = bracketed_root(closure, lam_min, lam_min * 1e-12, xtol=1e-16 / p_max, label="ring closure")
    chords = {pair: (1.0 + lam * p) ** (-1.0 / 3.0) for pair, p in products.items()}
    d = DistanceSet(r12=chords[(1, 2)], r13=chords[(1, 3)], r14=1.0,
                    r23=chords[(2, 3)], r24=1.0, r34=1.0)

    masses = []
    for j, (k, l) in ((1, (2, 3)), (2, (1, 3)), (3, (1, 2))):
        area = heron_signed_area(chords[(k, l)], 1.0, 1.0, 1 if s[j - 1] > 0 else -1)
        masses.append(area / s[j - 1])
    phi = angles(lam)
    return LimitSolution(
        kind=LimitKind.GENERAL_COORBITAL,
        distances=d,
        lambda_or_product=lam,
        aux={
            "phi_12": phi[(1, 2)], "phi_13": phi[(1, 3)], "phi_23": phi[(2, 3)],
            "m1": 1.0, "m2": masses[1] / masses[0], "m3": masses[2] / masses[0],
            "residual": abs(closure(lam)),
        },
    )
