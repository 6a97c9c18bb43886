"""
Parameter Sweeps
Solve along a grid of one varied weighted area and tabulate the results
"""
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, Any, List, Optional, Sequence

import numpy as np
import pandas as pd
from tqdm import tqdm

from core.model import PAIRS, AreaError, SolveStatus, TetradError
from optimization.solver import SolverOptions, solve

AREA_NAMES = ("a1", "a2", "a3", "a4")
DISTANCE_COLUMNS = [f"r{i}{j}" for i, j in PAIRS]
RESIDUAL_COLUMNS = ["plane_sum", "quad_constraint", "laura_andoyer", "central_eq", "sigma_identity"]
SWEEP_COLUMNS = (
    list(AREA_NAMES) + ["lambda", "lam_times_vary"] + DISTANCE_COLUMNS
    + ["m1", "m2", "m3", "m4"] + RESIDUAL_COLUMNS + ["status", "message"]
)

# Largest tolerated ratio between a lambda step and its neighbours' steps
JUMP_FACTOR = 10.0


@dataclass(frozen=True)
class SweepSpec:
    """Three fixed constants plus one varied over `values`."""
    fixed: Dict[str, float]
    vary: str
    values: Sequence[float]

    def __post_init__(self):
        if self.vary not in AREA_NAMES:
            raise ValueError(f"vary must be one of {AREA_NAMES}, got {self.vary!r}")
        if set(self.fixed) != set(AREA_NAMES) - {self.vary}:
            raise ValueError(f"fixed must name the three constants other than {self.vary}")
        if len(self.values) == 0:
            raise ValueError("Sweep range is empty")

    def areas_at(self, value: float) -> List[float]:
        return [value if name == self.vary else self.fixed[name] for name in AREA_NAMES]

    def metadata(self) -> Dict[str, Any]:
        return {
            "vary": self.vary,
            **{name: value for name, value in self.fixed.items()},
            "points": len(self.values),
            "first": self.values[0],
            "last": self.values[-1],
        }


def linear_grid(start: float, stop: float, step: float) -> np.ndarray:
    """
    start, start + step, ... up to and including stop (within half a step).

    Raises:
        ValueError: zero step or a step pointing away from stop
    """
    if step == 0 or not math.isfinite(step):
        raise ValueError(f"Step must be finite and nonzero, got {step}")
    if (stop - start) * step < 0:
        raise ValueError(f"Step {step} never reaches {stop} from {start}")
    count = int(math.floor((stop - start) / step + 0.5)) + 1
    return start + step * np.arange(count)


def log_grid(start: float, stop: float, num: int) -> np.ndarray:
    """Geometric grid; start and stop must be nonzero with a common sign."""
    if num < 1:
        raise ValueError(f"Need at least one grid point, got {num}")
    if start * stop <= 0:
        raise ValueError(f"Log grid needs same-sign nonzero endpoints, got {start}, {stop}")
    return np.geomspace(start, stop, num)


# =============================================================================
# ROWS
# =============================================================================

def _empty_row(areas: Sequence[float], status: SolveStatus, message: str) -> Dict[str, Any]:
    row = {name: value for name, value in zip(AREA_NAMES, areas)}
    for column in SWEEP_COLUMNS[4:]:
        row[column] = math.nan
    row["status"] = status.value
    row["message"] = message
    return row


def sweep_row(areas: Sequence[float], vary: str, opts: Optional[SolverOptions] = None) -> Dict[str, Any]:
    """Solve one grid point; failures become a status instead of an exception."""
    try:
        config = solve(list(areas), opts)
    except AreaError as e:
        return _empty_row(areas, SolveStatus.INVALID, e.code)
    except TetradError as e:
        status = SolveStatus.NO_ROOT if e.code == SolveStatus.NO_ROOT.value else SolveStatus.NON_PHYSICAL
        return _empty_row(areas, status, e.code)

    row = {name: value for name, value in zip(AREA_NAMES, areas)}
    row["lambda"] = config.lam
    row["lam_times_vary"] = config.lam * areas[AREA_NAMES.index(vary)]
    row.update(config.distances.as_dict())
    row.update({f"m{j}": config.mass(j) for j in range(1, 5)})
    row.update(config.diagnostics.to_dict())
    row["status"] = SolveStatus.OK.value
    row["message"] = ""
    return row


def _row_task(task):
    areas, vary, opts = task
    return sweep_row(areas, vary, opts)


def run_sweep(spec: SweepSpec, opts: Optional[SolverOptions] = None,
              workers: int = 1, progress: bool = True) -> pd.DataFrame:
    """
    Evaluate every grid point. Rows come back in grid order whatever the
    worker count; points past an asymptotic bound report NoRoot.
    """
    opts = opts or SolverOptions.from_settings()
    tasks = [(spec.areas_at(float(v)), spec.vary, opts) for v in spec.values]

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            chunk = max(1, len(tasks) // (4 * workers))
            rows = list(tqdm(executor.map(_row_task, tasks, chunksize=chunk),
                             total=len(tasks), disable=not progress, desc=f"sweep {spec.vary}"))
    else:
        rows = [_row_task(t) for t in tqdm(tasks, disable=not progress, desc=f"sweep {spec.vary}")]

    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def continuity_violations(frame: pd.DataFrame, factor: float = JUMP_FACTOR) -> List[int]:
    """
    Row indices where the lambda step exceeds `factor` times both
    neighbouring steps. Steps touching a non-OK row are ignored.
    """
    ok = (frame["status"] == SolveStatus.OK.value).to_numpy()
    lam = frame["lambda"].to_numpy(dtype=float)
    steps = np.abs(np.diff(lam))
    valid = ok[:-1] & ok[1:]

    flagged = []
    for k in range(1, len(steps) - 1):
        if not (valid[k - 1] and valid[k] and valid[k + 1]):
            continue
        local = max(steps[k - 1], steps[k + 1])
        if steps[k] > factor * local and steps[k] > 1e-14 * max(abs(lam[k]), abs(lam[k + 1])):
            flagged.append(k + 1)
    return flagged


def write_table(frame: pd.DataFrame, stream, metadata: Dict[str, Any]):
    """CSV with `# key: value` header lines; floats at full precision."""
    for key, value in metadata.items():
        stream.write(f"# {key}: {value}\n")
    frame.to_csv(stream, index=False, float_format="%.17g", lineterminator="\n")


def sweep_summary(frame: pd.DataFrame, started: float) -> Dict[str, Any]:
    counts = frame["status"].value_counts().to_dict()
    return {
        "points": len(frame),
        "ok": int(counts.get(SolveStatus.OK.value, 0)),
        "status_counts": counts,
        "latency_ms": (time.time() - started) * 1000,
    }
