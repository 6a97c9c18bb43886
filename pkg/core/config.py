"""
Tetrad Configuration
Environment-driven numerical settings (loaded once from .env)
"""
import os
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

load_dotenv()


@dataclass(frozen=True)
class Settings:
    """Numerical and logging settings shared by the solver, limits and CLI."""
    grid_cells: int = 1024
    tol_root: float = 1e-13       # relative to the lambda-bracket width
    max_iter: int = 200
    bracket_margin: float = 1e-9  # relative to 1/P_max
    accept_tol: float = 1e-9
    verify_tol: float = 1e-8
    metrics_enabled: bool = False
    log_dir: str = "data"


def _env_number(name: str, default, cast):
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return cast(raw)
    except ValueError:
        print(f"⚠️ Ignoring malformed {name}={raw!r}, using {default}")
        return default


def _env_flag(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() in ("1", "true", "yes", "on")


_settings: Optional[Settings] = None


def get_settings(reload: bool = False) -> Settings:
    """
    Get settings from environment.

    Args:
        reload: Re-read the environment instead of returning the cached value

    Returns:
        Frozen Settings instance
    """
    global _settings

    if _settings is not None and not reload:
        return _settings

    defaults = Settings()
    _settings = Settings(
        grid_cells=_env_number("TETRAD_GRID_CELLS", defaults.grid_cells, int),
        tol_root=_env_number("TETRAD_TOL_ROOT", defaults.tol_root, float),
        max_iter=_env_number("TETRAD_MAX_ITER", defaults.max_iter, int),
        bracket_margin=_env_number("TETRAD_BRACKET_MARGIN", defaults.bracket_margin, float),
        accept_tol=_env_number("TETRAD_ACCEPT_TOL", defaults.accept_tol, float),
        verify_tol=_env_number("TETRAD_VERIFY_TOL", defaults.verify_tol, float),
        metrics_enabled=_env_flag("TETRAD_METRICS", defaults.metrics_enabled),
        log_dir=os.getenv("TETRAD_LOG_DIR", defaults.log_dir),
    )
    return _settings
