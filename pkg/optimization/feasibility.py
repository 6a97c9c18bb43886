"""
Feasibility Gate
Filters candidate lambda roots on hard physical constraints and ranks survivors
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Any, List, Optional

from core.geometry import plane_sum_residual
from core.model import CentralConfig


class RootVerdict(Enum):
    ACCEPTED = "accepted"
    POSITIVE_LAMBDA = "positive_lambda"
    NONPOSITIVE_MASS = "nonpositive_mass"
    EMBEDDING_FAILED = "embedding_failed"
    PLANE_SUM = "plane_sum"
    CENTRAL_EQUATION = "central_equation"


@dataclass
class FeasibilityResult:
    """Result of checking one candidate root."""
    lam: float
    is_feasible: bool
    verdict: RootVerdict
    violations: List[str] = field(default_factory=list)
    config: Optional[CentralConfig] = None
    score: float = math.inf  # central-equation residual, lower is better

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lambda": self.lam,
            "feasible": self.is_feasible,
            "verdict": self.verdict.value,
            "violations": self.violations,
            "score": self.score,
        }


class FeasibilityGate:
    """
    Hard constraints reject a candidate outright; among the survivors the
    one with the smallest central-equation residual wins.
    """

    # Hard constraint violation = candidate excluded
    HARD_CONSTRAINTS = ["negative_lambda", "positive_masses", "embedding", "plane_sum", "central_equation"]

    def __init__(self, plane_tol: float = 1e-9, central_tol: float = 1e-8):
        self.plane_tol = plane_tol
        self.central_tol = central_tol

    def check_candidate(self, lam: float,
                        config: Optional[CentralConfig] = None,
                        build_error: Optional[str] = None) -> FeasibilityResult:
        """
        Check a single candidate.

        Args:
            lam: Candidate root
            config: Configuration built at that root, if construction succeeded
            build_error: Why construction failed otherwise

        Returns:
            FeasibilityResult with pass/fail and details
        """
        if lam >= 0:
            return FeasibilityResult(lam, False, RootVerdict.POSITIVE_LAMBDA,
                                     [f"HARD: lambda = {lam:.6g} is not negative"])

        if config is None:
            return FeasibilityResult(lam, False, RootVerdict.EMBEDDING_FAILED,
                                     [f"HARD: {build_error or 'configuration could not be built'}"])

        bad = [m for m in config.masses if not (math.isfinite(m) and m > 0)]
        if bad:
            return FeasibilityResult(lam, False, RootVerdict.NONPOSITIVE_MASS,
                                     [f"HARD: masses {config.masses} are not all positive"], config)

        s = config.signed_areas
        plane = abs(plane_sum_residual(s)) / sum(abs(v) for v in s.as_tuple())
        if not plane < self.plane_tol:
            return FeasibilityResult(lam, False, RootVerdict.PLANE_SUM,
                                     [f"HARD: relative plane sum {plane:.3e} >= {self.plane_tol:.0e}"],
                                     config, config.diagnostics.central_eq)

        central = config.diagnostics.central_eq
        if not central < self.central_tol:
            return FeasibilityResult(lam, False, RootVerdict.CENTRAL_EQUATION,
                                     [f"HARD: central-equation residual {central:.3e} >= {self.central_tol:.0e}"],
                                     config, central)

        return FeasibilityResult(lam, True, RootVerdict.ACCEPTED, [], config, central)

    def filter_candidates(self, results: List[FeasibilityResult]) -> List[FeasibilityResult]:
        """Feasible candidates, best first."""
        feasible = [r for r in results if r.is_feasible]
        feasible.sort(key=lambda r: r.score)
        return feasible
