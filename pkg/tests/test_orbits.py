"""
Tests for Kepler solving and homographic orbits
"""
import math
from dataclasses import replace

import numpy as np
import pytest

from core.model import InvalidConfigError, OrbitError, ResidualReport
from core.orbits import (
    HomographicOrbit,
    both_arrangements,
    OrbitParams,
    dynamics_residual,
    fit_conic,
    generate_orbit,
    kepler_solve,
    orbit_frame,
    shape_drift,
)
from optimization.solver import solve

ECC = 0.72


# ===== FIXTURES =====

@pytest.fixture(scope="module")
def concave_figure():
    return solve([5.0, 6.0, 4.0, -8.0])


@pytest.fixture(scope="module")
def convex_figure():
    return solve([15.0, -6.0, 3.0, -4.0])


# ===== KEPLER =====

def test_kepler_at_pi():
    assert kepler_solve(math.pi, ECC) == pytest.approx(math.pi, abs=1e-15)


def test_kepler_residual():
    ecc = kepler_solve(1.0, ECC)
    assert abs(ecc - ECC * math.sin(ecc) - 1.0) < 1e-14


@pytest.mark.parametrize("m", [-7.0, 0.3, 5.9, 40.0])
def test_kepler_many_turns(m):
    ecc = kepler_solve(m, 0.95)
    assert abs(ecc - 0.95 * math.sin(ecc) - m) < 1e-12


def test_kepler_circular_is_identity():
    assert kepler_solve(2.5, 0.0) == 2.5


def test_kepler_rejects_hyperbolic():
    with pytest.raises(OrbitError):
        kepler_solve(1.0, 1.0)


# ===== PARAMETERS =====

@pytest.mark.parametrize("kwargs", [
    {"eccentricity": -0.1},
    {"eccentricity": 1.0},
    {"samples": 1},
    {"periods": 0.0},
])
def test_orbit_params_validation(kwargs):
    with pytest.raises(OrbitError):
        OrbitParams(**kwargs)


def test_rejects_unverified_configuration(concave_figure):
    broken = replace(concave_figure, diagnostics=ResidualReport(
        plane_sum=0.0, quad_constraint=0.0, laura_andoyer=0.0, central_eq=1e-3, sigma_identity=0.0,
    ))
    with pytest.raises(InvalidConfigError):
        generate_orbit(broken, OrbitParams(eccentricity=ECC))


# ===== HOMOGRAPHIC MOTION =====

def test_circular_orbit_keeps_distances(concave_figure):
    samples = generate_orbit(concave_figure, OrbitParams(eccentricity=0.0, samples=48))
    first = samples[0].as_array()
    for s in samples:
        p = s.as_array()
        assert np.allclose(np.linalg.norm(p, axis=1), np.linalg.norm(first, axis=1), rtol=1e-13)


def test_period_and_sample_count(concave_figure):
    orbit = HomographicOrbit(concave_figure, OrbitParams(eccentricity=ECC, samples=90, periods=2.5))
    mu = sum(concave_figure.masses)
    assert orbit.period == pytest.approx(2.0 * math.pi * math.sqrt(orbit.semi_major ** 3 / mu), rel=1e-14)
    assert len(orbit.times()) == 225
    assert orbit.metadata()["arrangement"] == "direct"


@pytest.mark.parametrize("figure", ["concave_figure", "convex_figure"])
def test_each_path_is_focal_ellipse(figure, request):
    config = request.getfixturevalue(figure)
    samples = generate_orbit(config, OrbitParams(eccentricity=ECC, samples=360))
    paths = np.stack([s.as_array() for s in samples])
    for j in range(4):
        fit = fit_conic(paths[:, j, :])
        assert fit.eccentricity == pytest.approx(ECC, abs=1e-6)
        assert fit.focus_distance() < 1e-9 * fit.semi_major
    assert shape_drift(samples) < 1e-10


@pytest.mark.parametrize("fraction", [0.0, 0.25, 0.5])
def test_motion_obeys_newton(concave_figure, fraction):
    orbit = HomographicOrbit(concave_figure, OrbitParams(eccentricity=ECC))
    assert dynamics_residual(orbit, fraction * orbit.period) < 1e-5


def test_mirror_reflects_initial_positions(convex_figure):
    direct = HomographicOrbit(convex_figure, OrbitParams(eccentricity=ECC)).positions_at(0.0)
    mirror_orbit = HomographicOrbit(convex_figure, OrbitParams(eccentricity=ECC, mirror=True))
    mirrored = mirror_orbit.positions_at(0.0)
    assert np.allclose(mirrored[:, 0], direct[:, 0], atol=1e-15)
    assert np.allclose(mirrored[:, 1], -direct[:, 1], atol=1e-15)
    assert mirror_orbit.metadata()["arrangement"] == "mirror"
    assert dynamics_residual(mirror_orbit, 0.3 * mirror_orbit.period) < 1e-5


def test_orbit_frame_columns(concave_figure):
    frame = orbit_frame(generate_orbit(concave_figure, OrbitParams(samples=12)))
    assert list(frame.columns) == ["t", "x1", "y1", "x2", "y2", "x3", "y3", "x4", "y4"]
    assert len(frame) == 12
    assert frame["t"].iloc[0] == 0.0


def test_conic_fit_rejects_degenerate_points():
    with pytest.raises(OrbitError):
        fit_conic(np.zeros((10, 2)))


def test_both_arrangements_stacked(convex_figure):
    frame = both_arrangements(convex_figure, OrbitParams(eccentricity=ECC, samples=10))
    assert frame.columns[0] == "arrangement"
    assert frame["arrangement"].tolist() == ["direct"] * 10 + ["mirror"] * 10
    direct, mirror = frame.iloc[:10], frame.iloc[10:]
    assert np.allclose(mirror["x2"].to_numpy(), direct["x2"].to_numpy(), atol=1e-15)
    assert np.allclose(mirror["y2"].iloc[0], -direct["y2"].iloc[0], atol=1e-15)
