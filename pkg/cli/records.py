"""
Tetrad Records
Versioned pydantic schema for solved configurations and limit solutions
"""
import math
from datetime import datetime
from pathlib import Path
from typing import Dict, Any, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from core.geometry import pairwise_distances
from core.model import CentralConfig, LimitSolution, TetradError
from optimization.solver import SolverOptions

SCHEMA_VERSION = "1.0"
TOOL_NAME = "tetrad"
TOOL_VERSION = "1.0.0"

# Stored distances may differ from the coordinates by rounding only
DISTANCE_RTOL = 1e-12


class RecordError(TetradError):
    """A record file could not be read or parsed."""
    code = "RecordParseError"


# --- Pydantic Models ---

class _Record(BaseModel):
    model_config = ConfigDict(populate_by_name=True, ser_json_inf_nan="constants", extra="forbid")


class Provenance(_Record):
    timestamp: str = Field(default_factory=lambda: datetime.now().isoformat())
    tool: str = Field(default=TOOL_NAME)
    version: str = Field(default=TOOL_VERSION)


class SolveInputs(_Record):
    areas: List[float] = Field(..., min_length=4, max_length=4)
    options: Dict[str, Any] = Field(default_factory=dict)


class SolveOutputs(_Record):
    lam: float = Field(..., alias="lambda")
    sigma: float = 1.0
    distances: Dict[str, float]
    signed_areas: List[float] = Field(..., min_length=4, max_length=4)
    masses: List[float] = Field(..., min_length=4, max_length=4)
    coordinates: List[List[float]] = Field(..., min_length=4, max_length=4)
    classification: Dict[str, Any]
    residuals: Dict[str, float]
    alternate_roots: List[float] = Field(default_factory=list)


class ConfigRecord(_Record):
    """One solved central configuration as written by `solve --json`."""
    schema_version: str = Field(default=SCHEMA_VERSION)
    inputs: SolveInputs
    outputs: SolveOutputs
    provenance: Provenance = Field(default_factory=Provenance)


class LimitRecord(_Record):
    """One asymptotic solution as written by `limit --json`."""
    schema_version: str = Field(default=SCHEMA_VERSION)
    kind: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    distances: Dict[str, float]
    lambda_or_product: float
    aux: Dict[str, float] = Field(default_factory=dict)
    provenance: Provenance = Field(default_factory=Provenance)


# --- Conversion ---

def options_to_dict(opts: SolverOptions) -> Dict[str, Any]:
    residual = opts.residual_for_root.value if opts.residual_for_root else "auto"
    return {
        "tol_root": opts.tol_root,
        "max_iter": opts.max_iter,
        "bracket_margin": opts.bracket_margin,
        "residual_for_root": residual,
        "grid_cells": opts.grid_cells,
        "plane_tol": opts.plane_tol,
        "verify_tol": opts.verify_tol,
    }


def config_record(config: CentralConfig, opts: SolverOptions,
                  areas: Optional[List[float]] = None) -> ConfigRecord:
    """
    Wrap a solved configuration. `areas` keeps the user's input order and
    sign when the solver normalized an all-but-one-negative pattern.
    """
    data = config.to_dict()
    inputs = SolveInputs(
        areas=list(areas) if areas is not None else data["areas"],
        options=options_to_dict(opts),
    )
    outputs = SolveOutputs.model_validate({k: v for k, v in data.items() if k != "areas"})
    return ConfigRecord(inputs=inputs, outputs=outputs)


def limit_record(solution: LimitSolution, parameters: Dict[str, Any]) -> LimitRecord:
    data = solution.to_dict()
    return LimitRecord(
        kind=data["kind"],
        parameters=parameters,
        distances=data["distances"],
        lambda_or_product=data["lambda_or_product"],
        aux=data["aux"],
    )


def dump_record(record: Union[ConfigRecord, LimitRecord], indent: Optional[int] = 2) -> str:
    return record.model_dump_json(by_alias=True, indent=indent)


def load_record(source: Union[str, Path]) -> ConfigRecord:
    """
    Parse a ConfigRecord from a JSON file.

    Raises:
        RecordError: missing file, malformed JSON or schema mismatch
    """
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise RecordError(f"Cannot read record {path}: {e}") from e
    try:
        record = ConfigRecord.model_validate_json(text)
    except ValidationError as e:
        raise RecordError(f"Invalid record {path}: {e.error_count()} schema error(s)\n{e}") from e
    if record.schema_version.split(".")[0] != SCHEMA_VERSION.split(".")[0]:
        raise RecordError(f"Unsupported schema_version {record.schema_version}")
    return record


def distance_mismatch(record: ConfigRecord) -> float:
    """Largest relative gap between stored distances and those of the stored coordinates."""
    measured = pairwise_distances(np.asarray(record.outputs.coordinates, dtype=float)).as_dict()
    worst = 0.0
    for name, value in measured.items():
        stored = record.outputs.distances.get(name, math.nan)
        if not math.isfinite(stored):
            return math.inf
        worst = max(worst, abs(stored - value) / max(abs(stored), abs(value)))
    return worst

