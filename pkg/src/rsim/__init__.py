"""Reaction systems simulation with direct, dependency-graph and matrix engines."""

from rsim.core import (
    ContextSequence,
    DimensionError,
    Reaction,
    ReactionSystem,
    ReactionSystemError,
    State,
    Trajectory,
    enabled,
    result,
    run,
    run_steps,
    step,
)
from rsim.engines import DirectEngine, GraphEngine, MatrixEngine, make_engine

__all__ = [
    "ContextSequence",
    "DimensionError",
    "DirectEngine",
    "GraphEngine",
    "MatrixEngine",
    "Reaction",
    "ReactionSystem",
    "ReactionSystemError",
    "State",
    "Trajectory",
    "enabled",
    "make_engine",
    "result",
    "run",
    "run_steps",
    "step",
]

__version__ = "0.1.0"
