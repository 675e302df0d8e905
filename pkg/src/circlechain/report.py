from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .model import Configuration


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    STALLED = "Stalled"
    ORDERING_VIOLATED = "OrderingViolated"
    CROSSED_BREAKPOINT = "CrossedBreakpoint"
    MAX_ITERATIONS = "MaxIterations"
    MAX_TIME = "MaxTime"
    DIVERGED = "Diverged"


@dataclass(frozen=True)
class SolveReport:
    """Outcome of a Newton solve or a relaxation run."""

    status: Status
    config: Configuration
    residual_norm: float
    relative_residual: float
    iterations: int
    gauge: str
    partition: tuple[int, ...] = ()
    history: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)
    extra: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "positions": self.config.positions.tolist(),
            "residual_norm": self.residual_norm,
            "relative_residual": self.relative_residual,
            "iterations": self.iterations,
            "gauge": self.gauge,
            "partition": list(self.partition),
            "history": np.asarray(self.history).tolist(),
            **self.extra,
        }
