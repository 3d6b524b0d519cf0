"""Terminal status of a solver run."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple, Optional

import numpy as np

if TYPE_CHECKING:
    from .history import ConvergenceHistory


class Outcome(str, enum.Enum):
    CONVERGED = "Converged"
    BREAKDOWN = "Breakdown"
    STAGNATION = "Stagnation"
    MAX_ITERATIONS = "MaxIterations"


@dataclass(frozen=True)
class SolverOutcome:
    """How a run ended.

    ``reason`` and ``breakdown_iteration`` are only set for breakdowns (and
    ``reason`` for stagnation, as a short label).
    """

    tag: Outcome
    iterations: int
    final_relative_residual: float
    reason: Optional[str] = None
    breakdown_iteration: Optional[int] = None

    @property
    def converged(self) -> bool:
        return self.tag is Outcome.CONVERGED

    def __str__(self) -> str:
        if self.tag is Outcome.BREAKDOWN:
            return f"Breakdown({self.reason}, {self.breakdown_iteration})"
        if self.tag is Outcome.STAGNATION and self.reason:
            return f"Stagnation({self.reason})"
        return self.tag.value


class SolveResult(NamedTuple):
    x: np.ndarray
    r: np.ndarray
    outcome: SolverOutcome
    history: "ConvergenceHistory"
    steps: tuple = ()
