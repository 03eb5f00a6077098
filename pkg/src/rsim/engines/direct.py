"""Direct simulation over a bitset state.

Each reaction is compiled into sorted index tuples. A step expands the
current state into a byte lookup table once, then probes reactant and
inhibitor indices per reaction with early exit.
"""

from __future__ import annotations

from dataclasses import dataclass

from rsim.core import DimensionError, ReactionSystem, State, mask_of

__all__ = ["CompiledReaction", "DirectEngine", "compile_system", "direct_step"]

_ONE = ord("1")


@dataclass(frozen=True)
class CompiledReaction:
    reactants: tuple[int, ...]
    inhibitors: tuple[int, ...]
    products: tuple[int, ...]
    product_mask: int


def _probe_table(bits: int, width: int) -> bytes:
    """``table[i] == ord('1')`` iff bit ``i`` is set."""
    return format(bits, f"0{width}b")[::-1].encode("ascii") if width else b""


class DirectEngine:
    name = "direct"

    def __init__(self, system: ReactionSystem) -> None:
        self.system = system
        self.n_entities = system.n_entities
        self.compiled = tuple(
            CompiledReaction(
                tuple(sorted(r.reactants)),
                tuple(sorted(r.inhibitors)),
                tuple(sorted(r.products)),
                mask_of(r.products),
            )
            for r in system.reactions
        )
        self._table = tuple((c.reactants, c.inhibitors, c.product_mask) for c in self.compiled)

    def _check(self, s: State) -> None:
        if s.width != self.n_entities:
            raise DimensionError(
                f"state has width {s.width}, engine expects {self.n_entities}"
            )

    def step_bits(self, t: int) -> int:
        """Result function on a raw bitmask (context already merged in)."""
        probe = _probe_table(t, self.n_entities)
        out = 0
        for reactants, inhibitors, pmask in self._table:
            for i in reactants:
                if probe[i] != _ONE:
                    break
            else:
                for i in inhibitors:
                    if probe[i] == _ONE:
                        break
                else:
                    out |= pmask
        return out

    def is_enabled(self, j: int, probe: bytes) -> bool:
        reactants, inhibitors, _ = self._table[j]
        for i in reactants:
            if probe[i] != _ONE:
                return False
        for i in inhibitors:
            if probe[i] == _ONE:
                return False
        return True

    def enabled_mask(self, t: int) -> int:
        """Bitmask over reactions enabled in ``t``."""
        probe = _probe_table(t, self.n_entities)
        out = 0
        for j in range(len(self._table)):
            if self.is_enabled(j, probe):
                out |= 1 << j
        return out

    def step_bits_exhaustive(self, t: int) -> int:
        """Same as :meth:`step_bits` without early exit; kept for testing."""
        probe = _probe_table(t, self.n_entities)
        out = 0
        for reactants, inhibitors, pmask in self._table:
            present = sum(probe[i] == _ONE for i in reactants)
            blocked = sum(probe[i] == _ONE for i in inhibitors)
            if present == len(reactants) and blocked == 0:
                out |= pmask
        return out

    def step(self, d: State, c: State) -> State:
        self._check(d)
        self._check(c)
        return State(self.step_bits(d.bits | c.bits), self.n_entities)


def compile_system(sys: ReactionSystem) -> DirectEngine:
    return DirectEngine(sys)


def direct_step(e: DirectEngine, d: State, c: State) -> State:
    return e.step(d, c)
