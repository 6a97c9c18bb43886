"""
Scalar Root Finding
Grid sign-change scanning with Brent refinement, shared by solver and limits
"""
from typing import Callable, List, Optional, Type

import numpy as np
from scipy.optimize import brentq

from core.model import LimitNoRootError, TetradError


def sign_changes(grid: np.ndarray, values: np.ndarray) -> List[tuple]:
    """
    Adjacent grid cells whose finite endpoint values differ in sign.

    Exact zeros on the grid come back as degenerate brackets (x, x).
    Cells touching a NaN (outside the residual's domain) are skipped.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    finite = np.isfinite(values)

    brackets = []
    for idx in np.flatnonzero(finite & (values == 0.0)):
        brackets.append((grid[idx], grid[idx]))

    left, right = values[:-1], values[1:]
    both = finite[:-1] & finite[1:]
    crossing = both & (np.sign(left) * np.sign(right) < 0)
    for idx in np.flatnonzero(crossing):
        brackets.append((grid[idx], grid[idx + 1]))

    brackets.sort(key=lambda b: b[0])
    return brackets


def domain_edges(grid: np.ndarray, values: np.ndarray) -> List[tuple]:
    """
    Cells with one finite endpoint and one NaN endpoint, as
    (finite_x, nan_x) pairs. The residual's domain ends inside them.
    """
    grid = np.asarray(grid, dtype=float)
    finite = np.isfinite(np.asarray(values, dtype=float))
    edges = []
    for idx in np.flatnonzero(finite[:-1] != finite[1:]):
        if finite[idx]:
            edges.append((grid[idx], grid[idx + 1]))
        else:
            edges.append((grid[idx + 1], grid[idx]))
    return edges


def last_finite_point(func: Callable[[float], float], inside: float, outside: float,
                      xtol: float, max_iter: int = 200) -> tuple:
    """
    Bisect from a finite point toward a NaN point until the gap is below
    xtol. Returns the last finite abscissa and its value.
    """
    f_inside = func(inside)
    for _ in range(max_iter):
        if abs(outside - inside) <= xtol:
            break
        mid = 0.5 * (inside + outside)
        if mid in (inside, outside):
            break
        f_mid = func(mid)
        if np.isfinite(f_mid):
            inside, f_inside = mid, f_mid
        else:
            outside = mid
    return inside, f_inside


def refine(func: Callable[[float], float], lo: float, hi: float,
           xtol: float, max_iter: int = 200) -> float:
    """Brent refinement of a bracketed sign change."""
    if lo == hi:
        return lo
    return brentq(func, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=max_iter)


def find_roots(vector_func: Callable[[np.ndarray], np.ndarray],
               scalar_func: Callable[[float], float],
               grid: np.ndarray,
               xtol: float,
               max_iter: int = 200,
               failures: Optional[List[str]] = None) -> List[float]:
    """
    All roots of a residual detected as sign changes on a grid.

    Cells cut by the edge of the residual's domain are narrowed to their
    last finite point first, so roots right next to a degenerate triangle
    are still bracketed.

    Args:
        vector_func: Residual evaluated on the whole grid (NaN off-domain)
        scalar_func: Same residual for a single point, used by Brent
        grid: Increasing sample points
        xtol: Absolute tolerance on the root
        max_iter: Brent iteration cap
        failures: Optional list collecting brackets Brent could not refine

    Returns:
        Roots in increasing order
    """
    grid = np.asarray(grid, dtype=float)
    values = vector_func(grid)
    brackets = sign_changes(grid, values)

    for finite_x, nan_x in domain_edges(grid, values):
        f_finite = scalar_func(finite_x)
        edge_x, f_edge = last_finite_point(scalar_func, finite_x, nan_x, xtol, max_iter)
        if edge_x == finite_x or not np.isfinite(f_edge):
            continue
        if f_edge == 0.0:
            brackets.append((edge_x, edge_x))
        elif np.sign(f_edge) != np.sign(f_finite):
            brackets.append((min(finite_x, edge_x), max(finite_x, edge_x)))

    roots = []
    for lo, hi in brackets:
        try:
            roots.append(refine(scalar_func, lo, hi, xtol, max_iter))
        except (ValueError, RuntimeError) as e:
            # Brent gives up when the residual is NaN inside the cell
            if failures is not None:
                failures.append(f"Brent failed on [{lo:.17g}, {hi:.17g}]: {e}")
    return sorted(set(roots))


def bracketed_root(func: Callable[[float], float], lo: float, hi: float,
                   xtol: float = 1e-15, max_iter: int = 200,
                   error: Type[TetradError] = LimitNoRootError,
                   label: str = "equation") -> float:
    """
    Single root on an analytically justified bracket.

    Raises:
        error: The residual has the same sign at both ends
    """
    f_lo, f_hi = func(lo), func(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if not (np.isfinite(f_lo) and np.isfinite(f_hi)) or np.sign(f_lo) == np.sign(f_hi):
        raise error(
            f"No sign change for {label} on [{lo:.12g}, {hi:.12g}] "
            f"(f = {f_lo:.3e}, {f_hi:.3e})"
        )
    return brentq(func, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=max_iter)
