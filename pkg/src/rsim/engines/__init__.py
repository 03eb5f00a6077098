"""Simulation engines sharing the ``step(d, c) -> State`` interface."""

from __future__ import annotations

from rsim.core import ReactionSystem
from rsim.engines.direct import DirectEngine
from rsim.engines.graph import GraphEngine
from rsim.engines.matrix import MatrixEngine

__all__ = ["DirectEngine", "GraphEngine", "MatrixEngine", "ENGINE_NAMES", "make_engine"]

ENGINE_NAMES = ("direct", "graph", "matrix", "matrix-dense", "matrix-sparse")


def make_engine(name: str, system: ReactionSystem, matrix_kernel: str = "auto", **options):
    """Build an engine by label. ``matrix-dense``/``matrix-sparse`` pin the kernel."""
    if name == "direct":
        return DirectEngine(system)
    if name == "graph":
        return GraphEngine(system, **options)
    if name == "matrix":
        return MatrixEngine(system, kernel=matrix_kernel)
    if name in ("matrix-dense", "matrix-sparse"):
        return MatrixEngine(system, kernel=name.split("-", 1)[1])
    raise ValueError(f"unknown engine {name!r}; choose from {', '.join(ENGINE_NAMES)}")
