"""Equilibria of power-law repelling particles on a circle in a piecewise-constant external field."""

__version__ = "0.1.0"

from .asymptotics import fine_scale_report, uniformity_sweep
from .circle import (
    SymmetricSpec,
    construct_symmetric,
    construct_two_piece,
    glue_probe,
    repair_gap_points,
    solve_overlap,
    two_piece_gaps,
)
from .dynamics import DynamicsParams, relax, relax_segment
from .estimators import EquilibriumRelaxer, GapTransformer, SegmentEquilibrium, SymmetricEquilibrium
from .existence import Verdict, unique_partition, verdict
from .model import (
    Configuration,
    GapVector,
    InteractionLaw,
    PiecewiseForce,
    RingGeometry,
    energy,
    from_gaps,
    residual,
    to_gaps,
)
from .newton import NewtonOptions, solve
from .report import SolveReport, Status
from .segment import SegmentProblem, perturbative_deltas, solve_exact

__all__ = [
    "Configuration", "DynamicsParams", "EquilibriumRelaxer", "GapTransformer", "GapVector", "InteractionLaw",
    "NewtonOptions", "PiecewiseForce", "RingGeometry", "SegmentEquilibrium", "SegmentProblem", "SolveReport",
    "Status", "SymmetricEquilibrium", "SymmetricSpec", "Verdict", "construct_symmetric", "construct_two_piece",
    "energy", "fine_scale_report", "from_gaps", "glue_probe", "perturbative_deltas", "relax", "relax_segment",
    "repair_gap_points", "residual", "solve", "solve_exact", "solve_overlap", "to_gaps", "two_piece_gaps",
    "uniformity_sweep", "unique_partition", "verdict",
]
