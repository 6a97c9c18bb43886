"""
Shared pytest configuration for Tetrad
"""
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

# Add parent to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

# Hypothesis profile for solver-backed properties
settings.register_profile("tetrad", deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
settings.load_profile("tetrad")


@pytest.fixture
def rng():
    """Seeded generator for randomized suites."""
    return np.random.default_rng(20240607)


@pytest.fixture(autouse=True)
def no_metrics(monkeypatch):
    """Keep test runs from writing metrics.jsonl."""
    monkeypatch.setenv("TETRAD_METRICS", "0")
    from core.config import get_settings
    get_settings(reload=True)
    yield
    get_settings(reload=True)
