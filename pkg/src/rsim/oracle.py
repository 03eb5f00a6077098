"""Naive set-of-names evaluation of the result function.

Shares no code with the engines: states are plain ``frozenset`` of entity
names and every reaction is re-read from the system on each call.
"""

from __future__ import annotations

from typing import Iterable

from rsim.core import ReactionSystem

__all__ = ["naive_step", "naive_run", "naive_reaction_sets"]

def naive_reaction_sets(sys: ReactionSystem) -> list[tuple[set[str], set[str], set[str]]]:
    names = sys.entity_names
    return [
        (
            {names[e] for e in r.reactants},
            {names[e] for e in r.inhibitors},
            {names[e] for e in r.products},
        )
        for r in sys.reactions
    ]


def _check_names(sys: ReactionSystem, s: Iterable[str]) -> None:
    known = set(sys.entity_names)
    unknown = set(s) - known
    if unknown:
        raise KeyError(f"unknown entities {sorted(unknown)}")


def naive_step(sys: ReactionSystem, t: Iterable[str], c: Iterable[str] = ()) -> frozenset[str]:
    return _apply(naive_reaction_sets(sys), sys, t, c)


def _apply(reaction_sets, sys: ReactionSystem, t: Iterable[str], c: Iterable[str]) -> frozenset[str]:
    t, c = set(t), set(c)
    _check_names(sys, t)
    _check_names(sys, c)
    current = t.union(c)
    out: set[str] = set()
    for reactants, inhibitors, products in reaction_sets:
        if reactants.issubset(current) and current.isdisjoint(inhibitors):
            out.update(products)
    return frozenset(out)


def naive_run(sys: ReactionSystem, ctx: Iterable[Iterable[str]]) -> list[frozenset[str]]:
    """``[D_0, D_1, ..., D_n]`` with ``D_0`` empty."""
    reaction_sets = naive_reaction_sets(sys)
    states = [frozenset()]
    for c in ctx:
        states.append(_apply(reaction_sets, sys, states[-1], c))
    return states
