"""Reaction system types and the reference semantics of the result function.

Entities are identified by dense integer ids ``0..|S|-1`` fixed when the
system is built. A state is a bitset over those ids stored in a Python int
(bit ``i`` set means entity ``i`` is present).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Protocol, Sequence

__all__ = [
    "ReactionSystemError",
    "DimensionError",
    "State",
    "Reaction",
    "ReactionSystem",
    "ContextSequence",
    "Trajectory",
    "Engine",
    "mask_of",
    "iter_bits",
    "enabled",
    "result",
    "step",
    "run",
    "run_steps",
    "ReferenceEngine",
]

_FORBIDDEN_NAME_CHARS = frozenset(",#")


class ReactionSystemError(ValueError):
    """A reaction or reaction system violates its structural invariants."""


class DimensionError(ValueError):
    """A state does not have the width of the system it is used with."""


def mask_of(indices: Iterable[int]) -> int:
    value = 0
    for i in indices:
        value |= 1 << i
    return value


def iter_bits(value: int) -> Iterator[int]:
    """Yield the indices of set bits in ascending order."""
    while value:
        low = value & -value
        yield low.bit_length() - 1
        value ^= low


@dataclass(frozen=True)
class State:
    """Fixed-width set of entities."""

    bits: int
    width: int

    def __post_init__(self) -> None:
        if self.width < 0:
            raise DimensionError(f"negative state width {self.width}")
        if self.bits < 0 or self.bits >> self.width:
            raise DimensionError(
                f"state bits exceed width {self.width}"
            )

    @classmethod
    def empty(cls, width: int) -> State:
        return cls(0, width)

    @classmethod
    def from_indices(cls, indices: Iterable[int], width: int) -> State:
        return cls(mask_of(indices), width)

    def indices(self) -> list[int]:
        return list(iter_bits(self.bits))

    def popcount(self) -> int:
        return bin(self.bits).count("1")

    def __contains__(self, index: int) -> bool:
        return bool(self.bits >> index & 1)

    def __or__(self, other: State) -> State:
        if other.width != self.width:
            raise DimensionError(
                f"cannot union states of width {self.width} and {other.width}"
            )
        return State(self.bits | other.bits, self.width)

    def __bool__(self) -> bool:
        return self.bits != 0

    def __len__(self) -> int:
        return self.popcount()


@dataclass(frozen=True)
class Reaction:
    """A reaction ``(reactants, inhibitors, products)`` over entity ids."""

    reactants: frozenset[int]
    inhibitors: frozenset[int]
    products: frozenset[int]

    def __init__(
        self,
        reactants: Iterable[int],
        inhibitors: Iterable[int],
        products: Iterable[int],
    ) -> None:
        object.__setattr__(self, "reactants", frozenset(reactants))
        object.__setattr__(self, "inhibitors", frozenset(inhibitors))
        object.__setattr__(self, "products", frozenset(products))
        overlap = self.reactants & self.inhibitors
        if overlap:
            raise ReactionSystemError(
                f"reactants and inhibitors overlap on {sorted(overlap)}"
            )

    @cached_property
    def reactant_mask(self) -> int:
        return mask_of(self.reactants)

    @cached_property
    def inhibitor_mask(self) -> int:
        return mask_of(self.inhibitors)

    @cached_property
    def product_mask(self) -> int:
        return mask_of(self.products)

    def validate(self, n_entities: int, allow_empty_inhibitors: bool = False) -> None:
        if not self.reactants:
            raise ReactionSystemError("reaction has no reactants")
        if not self.products:
            raise ReactionSystemError("reaction has no products")
        if not self.inhibitors and not allow_empty_inhibitors:
            raise ReactionSystemError(
                "reaction has no inhibitors (use allow_empty_inhibitors to relax)"
            )
        for part in (self.reactants, self.inhibitors, self.products):
            for e in part:
                if not 0 <= e < n_entities:
                    raise ReactionSystemError(
                        f"entity id {e} outside background set of size {n_entities}"
                    )


@dataclass(frozen=True)
class ReactionSystem:
    """Background set (ordered entity names) plus an ordered list of reactions.

    Strict mode (the default) requires every reaction to have non-empty
    reactants, inhibitors and products. ``allow_empty_inhibitors=True``
    relaxes only the inhibitor requirement.
    """

    entity_names: tuple[str, ...]
    reactions: tuple[Reaction, ...]
    allow_empty_inhibitors: bool = False
    _ids: dict[str, int] = field(init=False, repr=False, compare=False)

    def __init__(
        self,
        entity_names: Sequence[str],
        reactions: Sequence[Reaction],
        allow_empty_inhibitors: bool = False,
    ) -> None:
        names = tuple(entity_names)
        object.__setattr__(self, "entity_names", names)
        object.__setattr__(self, "reactions", tuple(reactions))
        object.__setattr__(self, "allow_empty_inhibitors", allow_empty_inhibitors)
        ids: dict[str, int] = {}
        for i, name in enumerate(names):
            bad = any(ch.isspace() or ch in _FORBIDDEN_NAME_CHARS for ch in name)
            if not name or name == "." or bad:
                raise ReactionSystemError(f"invalid entity name {name!r}")
            if name in ids:
                raise ReactionSystemError(f"duplicate entity name {name!r}")
            ids[name] = i
        object.__setattr__(self, "_ids", ids)
        for k, r in enumerate(self.reactions):
            try:
                r.validate(len(names), allow_empty_inhibitors)
            except ReactionSystemError as exc:
                raise ReactionSystemError(f"reaction {k}: {exc}") from None

    @property
    def n_entities(self) -> int:
        return len(self.entity_names)

    @property
    def n_reactions(self) -> int:
        return len(self.reactions)

    def entity_id(self, name: str) -> int:
        try:
            return self._ids[name]
        except KeyError:
            raise KeyError(f"unknown entity {name!r}") from None

    def state(self, names: Iterable[str] = ()) -> State:
        """Build a state from entity names."""
        return State(mask_of(self.entity_id(n) for n in names), self.n_entities)

    def names_of(self, state: State) -> list[str]:
        return [self.entity_names[i] for i in iter_bits(state.bits)]

    def empty_state(self) -> State:
        return State(0, self.n_entities)

    def check_state(self, state: State) -> None:
        if state.width != self.n_entities:
            raise DimensionError(
                f"state has width {state.width}, system has {self.n_entities} entities"
            )

    @cached_property
    def product_union(self) -> int:
        """Bitmask of every entity produced by some reaction."""
        out = 0
        for r in self.reactions:
            out |= r.product_mask
        return out


@dataclass(frozen=True)
class ContextSequence:
    """Entity sets injected before each step, ``C_0 .. C_{n-1}``."""

    steps: tuple[State, ...]

    def __init__(self, steps: Iterable[State] = ()) -> None:
        object.__setattr__(self, "steps", tuple(steps))

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[State]:
        return iter(self.steps)

    def __getitem__(self, i: int) -> State:
        return self.steps[i]

    def padded(self, n_steps: int, width: int) -> ContextSequence:
        """Truncate or pad with empty contexts to exactly ``n_steps``."""
        if n_steps < 0:
            raise ValueError("n_steps must be non-negative")
        steps = list(self.steps[:n_steps])
        steps.extend(State(0, width) for _ in range(n_steps - len(steps)))
        return ContextSequence(steps)


@dataclass(frozen=True)
class Trajectory:
    """States ``D_0 .. D_n`` of an interactive process; ``D_0`` is empty."""

    states: tuple[State, ...]

    def __init__(self, states: Iterable[State]) -> None:
        object.__setattr__(self, "states", tuple(states))

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[State]:
        return iter(self.states)

    def __getitem__(self, i: int) -> State:
        return self.states[i]

    def first_divergence(self, other: Trajectory) -> int | None:
        """Index of the first differing state, or None if identical."""
        for i, (a, b) in enumerate(zip(self.states, other.states)):
            if a != b:
                return i
        if len(self.states) != len(other.states):
            return min(len(self.states), len(other.states))
        return None


class Engine(Protocol):
    """Anything that computes ``res(d | c)`` for one system."""

    system: ReactionSystem

    def step(self, d: State, c: State) -> State: ...


def enabled(r: Reaction, t: State) -> bool:
    return (r.reactant_mask & ~t.bits) == 0 and (r.inhibitor_mask & t.bits) == 0


def result(sys: ReactionSystem, t: State) -> State:
    """Union of the products of every reaction enabled in ``t``."""
    sys.check_state(t)
    bits = t.bits
    out = 0
    for r in sys.reactions:
        if (r.reactant_mask & ~bits) == 0 and (r.inhibitor_mask & bits) == 0:
            out |= r.product_mask
    return State(out, sys.n_entities)


def step(sys: ReactionSystem, d: State, c: State) -> State:
    sys.check_state(d)
    sys.check_state(c)
    return result(sys, d | c)


def run(engine: Engine, ctx: ContextSequence) -> Trajectory:
    """Run the interactive process from the empty state through every context entry."""
    sys = engine.system
    for i, c in enumerate(ctx):
        if c.width != sys.n_entities:
            raise DimensionError(
                f"context step {i} has width {c.width}, system has {sys.n_entities} entities"
            )
    d = sys.empty_state()
    states = [d]
    for c in ctx:
        d = engine.step(d, c)
        states.append(d)
    return Trajectory(states)


def run_steps(engine: Engine, ctx: ContextSequence, n_steps: int) -> Trajectory:
    """Like :func:`run` but for exactly ``n_steps``, padding with empty contexts."""
    return run(engine, ctx.padded(n_steps, engine.system.n_entities))


class ReferenceEngine:
    """Engine wrapper around :func:`step`; used as the in-library reference."""

    name = "reference"

    def __init__(self, system: ReactionSystem) -> None:
        self.system = system

    def step(self, d: State, c: State) -> State:
        return step(self.system, d, c)
