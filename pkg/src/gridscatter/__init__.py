"""Deterministic uniform scattering of oblivious robots on a grid.

Robots start on distinct nodes and, using only the positions they observe,
spread onto alternate nodes of a square grid anchored at the swarm's
north-west corner.
"""

from .compute import (
    Bounds,
    CaseLabel,
    Dimensions,
    MoveDecision,
    MoveKind,
    classify,
    compute_move,
    find_dimension,
    find_x_min,
    find_y_max,
)
from .grid import Configuration, Position, Snapshot, occupied, robots_in_row, row_index
from .sim import (
    ConflictEvent,
    RoundRecord,
    RunOutcome,
    make_strategy,
    run,
    step,
)
from .verifier import ViolationEvent, ViolationKind, check_progress, check_round, expected_final, is_final

__version__ = "0.1.0"

__all__ = [
    "Bounds", "CaseLabel", "ConflictEvent", "Configuration", "Dimensions", "MoveDecision",
    "MoveKind", "Position", "RoundRecord", "RunOutcome", "Snapshot", "ViolationEvent",
    "ViolationKind", "check_progress", "check_round", "classify", "compute_move",
    "expected_final", "find_dimension", "find_x_min", "find_y_max", "is_final",
    "make_strategy", "occupied", "robots_in_row", "row_index", "run", "step",
]
