"""
Homographic Orbits
Every particle follows z_i(t) = f(t) z_i(0), where f traces a Kepler ellipse
about the centre of mass with gravitational parameter mu = sigma * M.
"""
import math
from dataclasses import dataclass, replace
from typing import Dict, Any, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from core.model import CentralConfig, InvalidConfigError, OrbitError
from optimization.solver import newtonian_accelerations

KEPLER_TOL = 1e-15
ORBIT_METADATA = {
    "scale_convention": "a_f (1 - e) = 1, t = 0 at periapsis",
    "rotation": "counterclockwise",
    "units": "G = 1, sigma = 1",
}


@dataclass(frozen=True)
class OrbitParams:
    eccentricity: float = 0.0
    samples: int = 360          # per period
    periods: float = 1.0
    mirror: bool = False

    def __post_init__(self):
        if not 0.0 <= self.eccentricity < 1.0:
            raise OrbitError(f"Eccentricity must lie in [0, 1), got {self.eccentricity}")
        if self.samples < 2:
            raise OrbitError(f"Need at least 2 samples per period, got {self.samples}")
        if not self.periods > 0:
            raise OrbitError(f"Periods must be positive, got {self.periods}")


@dataclass(frozen=True)
class OrbitSample:
    time: float
    positions: Tuple[Tuple[float, float], ...]

    def as_array(self) -> np.ndarray:
        return np.array(self.positions)


# =============================================================================
# KEPLER
# =============================================================================

def kepler_solve(mean_anomaly: float, e: float) -> float:
    """
    Eccentric anomaly E with E - e sin E = M, by Newton iteration kept
    inside the bracket [M - e, M + e] (bisection whenever a step leaves it).
    """
    if not 0.0 <= e < 1.0:
        raise OrbitError(f"Eccentricity must lie in [0, 1), got {e}")
    if e == 0.0:
        return mean_anomaly

    turns = math.floor((mean_anomaly + math.pi) / (2.0 * math.pi))
    m = mean_anomaly - 2.0 * math.pi * turns
    lo, hi = m - e, m + e
    ecc = m + e * math.sin(m) if e < 0.8 else (math.pi if m > 0 else -math.pi)
    ecc = min(max(ecc, lo), hi)

    for _ in range(100):
        f = ecc - e * math.sin(ecc) - m
        if abs(f) <= KEPLER_TOL:
            break
        if f > 0:
            hi = ecc
        else:
            lo = ecc
        step = ecc - f / (1.0 - e * math.cos(ecc))
        ecc = step if lo < step < hi else 0.5 * (lo + hi)
        if hi - lo <= 4e-16 * max(1.0, abs(ecc)):
            break

    return ecc + 2.0 * math.pi * turns


# =============================================================================
# HOMOGRAPHIC MOTION
# =============================================================================

class HomographicOrbit:
    """
    Closed-form homographic motion of a verified central configuration.

    Usage:
        orbit = HomographicOrbit(config, OrbitParams(eccentricity=0.72))
        samples = orbit.samples()
    """

    def __init__(self, config: CentralConfig, params: OrbitParams, verify_tol: float = 1e-8):
        if not config.diagnostics.central_eq < verify_tol:
            raise InvalidConfigError(
                f"Configuration fails the central equation ({config.diagnostics.central_eq:.3e} >= {verify_tol:.0e})"
            )
        self.config = config
        self.params = params
        self.masses = np.asarray(config.masses, dtype=float)

        points = np.asarray(config.coords, dtype=float)
        points = points - self.masses @ points / self.masses.sum()
        z0 = points[:, 0] + 1j * points[:, 1]
        self.z0 = np.conj(z0) if params.mirror else z0

        e = params.eccentricity
        self.mu = config.sigma * self.masses.sum()
        self.semi_major = 1.0 / (1.0 - e)
        self.mean_motion = math.sqrt(self.mu / self.semi_major ** 3)
        self.period = 2.0 * math.pi / self.mean_motion

    def scale_factor(self, t: float) -> complex:
        """f(t) = a (cos E - e) + i a sqrt(1 - e^2) sin E."""
        e = self.params.eccentricity
        ecc = kepler_solve(self.mean_motion * t, e)
        a = self.semi_major
        return complex(a * (math.cos(ecc) - e), a * math.sqrt(1.0 - e * e) * math.sin(ecc))

    def positions_at(self, t: float) -> np.ndarray:
        """(4, 2) positions at time t."""
        z = self.scale_factor(t) * self.z0
        return np.column_stack([z.real, z.imag])

    def times(self) -> np.ndarray:
        n = self.params.samples
        count = int(round(n * self.params.periods))
        return np.arange(count) * self.period / n

    def samples(self) -> List[OrbitSample]:
        result = []
        for t in self.times():
            p = self.positions_at(t)
            result.append(OrbitSample(time=float(t), positions=tuple((float(x), float(y)) for x, y in p)))
        return result

    def metadata(self) -> Dict[str, Any]:
        return {
            **ORBIT_METADATA,
            "arrangement": "mirror" if self.params.mirror else "direct",
            "eccentricity": self.params.eccentricity,
            "mu": self.mu,
            "semi_major": self.semi_major,
            "period": self.period,
        }


def generate_orbit(c: CentralConfig, p: OrbitParams, verify_tol: float = 1e-8) -> List[OrbitSample]:
    """
    Uniform-in-time samples of the homographic motion of `c`.

    Raises:
        InvalidConfigError: `c` does not satisfy the central equation
    """
    return HomographicOrbit(c, p, verify_tol).samples()


def orbit_frame(samples: Sequence[OrbitSample]) -> pd.DataFrame:
    """Columns t, x1, y1, ..., x4, y4."""
    rows = []
    for sample in samples:
        row = {"t": sample.time}
        for j, (x, y) in enumerate(sample.positions, start=1):
            row[f"x{j}"] = x
            row[f"y{j}"] = y
        rows.append(row)
    return pd.DataFrame(rows, columns=["t"] + [f"{c}{j}" for j in range(1, 5) for c in ("x", "y")])


def both_arrangements(c: CentralConfig, p: OrbitParams, verify_tol: float = 1e-8) -> pd.DataFrame:
    """Direct and mirror samples stacked, labelled by a leading `arrangement` column."""
    frames = []
    for mirror in (False, True):
        orbit = HomographicOrbit(c, replace(p, mirror=mirror), verify_tol)
        frame = orbit_frame(orbit.samples())
        frame.insert(0, "arrangement", orbit.metadata()["arrangement"])
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


# =============================================================================
# DIAGNOSTICS
# =============================================================================

@dataclass(frozen=True)
class ConicFit:
    eccentricity: float
    center: Tuple[float, float]
    foci: Tuple[Tuple[float, float], Tuple[float, float]]
    semi_major: float
    residual: float

    def focus_distance(self, point: Sequence[float] = (0.0, 0.0)) -> float:
        """Distance from `point` to the nearer focus."""
        return min(math.hypot(fx - point[0], fy - point[1]) for fx, fy in self.foci)


def fit_conic(points: np.ndarray) -> ConicFit:
    """
    Least-squares ellipse through planar points via the SVD null vector of
    [x^2, xy, y^2, x, y, 1] on normalised coordinates.

    Raises:
        OrbitError: the points do not determine an ellipse
    """
    pts = np.asarray(points, dtype=float)
    mean = pts.mean(axis=0)
    spread = np.abs(pts - mean).max()
    if len(pts) < 5 or spread < 1e-12 * max(1.0, np.abs(mean).max()):
        raise OrbitError("Too few or coincident points to fit a conic")
    x, y = ((pts - mean) / spread).T

    design = np.column_stack([x * x, x * y, y * y, x, y, np.ones_like(x)])
    _, singular, vt = np.linalg.svd(design, full_matrices=False)
    a, b, c, d, e, f = vt[-1]

    quad = np.array([[a, b / 2.0], [b / 2.0, c]])
    eigvals, eigvecs = np.linalg.eigh(quad)
    if eigvals[0] * eigvals[1] <= 0:
        raise OrbitError("Sampled path is not an ellipse")

    center = np.linalg.solve(quad, -0.5 * np.array([d, e]))
    constant = f + 0.5 * (d * center[0] + e * center[1])
    order = np.argsort(np.abs(eigvals))
    small, large = eigvals[order[0]], eigvals[order[1]]
    major_axis = eigvecs[:, order[0]]

    semi_major = math.sqrt(-constant / small)
    ecc = math.sqrt(max(0.0, 1.0 - abs(small) / abs(large)))
    focal = semi_major * ecc

    world_center = mean + spread * center
    f1 = world_center + spread * focal * major_axis
    f2 = world_center - spread * focal * major_axis
    return ConicFit(
        eccentricity=ecc,
        center=tuple(world_center),
        foci=(tuple(f1), tuple(f2)),
        semi_major=spread * semi_major,
        residual=float(singular[-1] / singular[0]),
    )


def shape_drift(samples: Sequence[OrbitSample]) -> float:
    """
    Largest spread, over samples, of the six ratios r_jk(t) / r_jk(0);
    zero for exactly homographic motion.
    """
    def distances(p):
        return np.array([np.linalg.norm(p[i] - p[j]) for i in range(4) for j in range(i + 1, 4)])

    base = distances(samples[0].as_array())
    worst = 0.0
    for sample in samples:
        ratios = distances(sample.as_array()) / base
        worst = max(worst, float((ratios.max() - ratios.min()) / ratios.mean()))
    return worst


def dynamics_residual(orbit: HomographicOrbit, t: float, dt: Optional[float] = None) -> float:
    """
    Relative mismatch between the finite-difference acceleration of the
    sampled motion (step T / 1e5 by default) and the Newtonian force law.
    """
    h = dt if dt is not None else orbit.period / 1e5
    before, now, after = (orbit.positions_at(t + k * h) for k in (-1, 0, 1))
    numeric = (after - 2.0 * now + before) / (h * h)
    newton = newtonian_accelerations(now, orbit.masses)
    return float(np.max(np.linalg.norm(numeric - newton, axis=1)) / np.max(np.linalg.norm(newton, axis=1)))
