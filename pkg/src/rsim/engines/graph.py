"""Dependency-graph pruning engine.

Only reactions having at least one reactant among the entities just
produced, or injected by the context, can be enabled at the next step.
Candidates are kept in a bitmask over reactions and refreshed from a
per-entity index of consuming reactions after every step.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

from rsim.core import DimensionError, ReactionSystem, State, iter_bits, mask_of
from rsim.engines.direct import _ONE, DirectEngine, _probe_table

__all__ = [
    "DependencyGraph",
    "EntityReactionIndex",
    "GraphEngine",
    "PruningSoundnessError",
    "StepStats",
    "build_graph",
    "build_entity_index",
    "graph_step",
    "write_candidate_csv",
]


class PruningSoundnessError(AssertionError):
    """An enabled reaction was missing from the candidate set."""


@dataclass(frozen=True)
class DependencyGraph:
    """``edges[i]`` lists the reactions ``j`` whose reactants meet the products of ``i``."""

    edges: tuple[tuple[int, ...], ...]

    def edge_set(self) -> set[tuple[int, int]]:
        return {(i, j) for i, succ in enumerate(self.edges) for j in succ}


@dataclass(frozen=True)
class EntityReactionIndex:
    """``consumers[e]`` lists the reactions having entity ``e`` as a reactant."""

    consumers: tuple[tuple[int, ...], ...]

    def __getitem__(self, e: int) -> tuple[int, ...]:
        return self.consumers[e]


def build_entity_index(sys: ReactionSystem) -> EntityReactionIndex:
    consumers: list[list[int]] = [[] for _ in range(sys.n_entities)]
    for j, r in enumerate(sys.reactions):
        for e in r.reactants:
            consumers[e].append(j)
    return EntityReactionIndex(tuple(tuple(c) for c in consumers))


def build_graph(sys: ReactionSystem) -> DependencyGraph:
    marks = [mask_of(js) for js in build_entity_index(sys).consumers]
    edges = []
    for r in sys.reactions:
        succ = 0
        for e in r.products:
            succ |= marks[e]
        edges.append(tuple(iter_bits(succ)))
    return DependencyGraph(tuple(edges))


class StepStats(NamedTuple):
    step: int
    popcount: int
    fired: int


class GraphEngine:
    """Pruning engine. Carries candidate state between calls; one instance per run.

    ``record_stats`` keeps a :class:`StepStats` per step; ``check_soundness``
    verifies at every step that each enabled reaction was a candidate and
    raises :class:`PruningSoundnessError` otherwise.
    """

    name = "graph"

    def __init__(
        self,
        system: ReactionSystem,
        record_stats: bool = False,
        check_soundness: bool = False,
    ) -> None:
        self.system = system
        self.n_entities = system.n_entities
        self.n_reactions = system.n_reactions
        self.inner = DirectEngine(system)
        self.dep = build_graph(system)
        self.idx = build_entity_index(system)
        self._marks = tuple(mask_of(js) for js in self.idx.consumers)
        self.record_stats = record_stats
        self.check_soundness = check_soundness
        self.stats: list[StepStats] = []
        self.reset()

    def reset(self) -> None:
        """Forget carried state; the next step considers every reaction."""
        self.candidates = (1 << self.n_reactions) - 1
        self._last: int | None = None
        self._steps = 0
        self.stats = []

    def _mark(self, bits: int) -> int:
        marks = self._marks
        out = 0
        for e in iter_bits(bits):
            out |= marks[e]
        return out

    def step(self, d: State, c: State) -> State:
        for s in (d, c):
            if s.width != self.n_entities:
                raise DimensionError(
                    f"state has width {s.width}, engine expects {self.n_entities}"
                )
        if self._last is not None and d.bits != self._last:
            # Called out of sequence: rebuild candidates from d.
            self.candidates = self._mark(d.bits)
        candidates = self.candidates | self._mark(c.bits)
        t = d.bits | c.bits
        probe = _probe_table(t, self.n_entities)
        table = self.inner._table
        out = 0
        fired = 0
        tested = 0
        for j in iter_bits(candidates):
            tested += 1
            reactants, inhibitors, pmask = table[j]
            for i in reactants:
                if probe[i] != _ONE:
                    break
            else:
                for i in inhibitors:
                    if probe[i] == _ONE:
                        break
                else:
                    out |= pmask
                    fired += 1
        if self.check_soundness:
            missed = self.inner.enabled_mask(t) & ~candidates
            if missed:
                raise PruningSoundnessError(
                    f"step {self._steps + 1}: enabled reactions {list(iter_bits(missed))} "
                    "were not candidates"
                )
        self._steps += 1
        if self.record_stats:
            self.stats.append(StepStats(self._steps, tested, fired))
        self.candidates = self._mark(out)
        self._last = out
        return State(out, self.n_entities)


def graph_step(e: GraphEngine, d: State, c: State) -> State:
    return e.step(d, c)


def write_candidate_csv(stats: list[StepStats], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(StepStats._fields)
        w.writerows(stats)
