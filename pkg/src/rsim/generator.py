"""Synthetic reaction systems parameterized as ``|S| x |A| x alpha``.

Reactant, inhibitor and product counts are each drawn from
Binomial(|S|, alpha) and then repaired to give a valid reaction:

* every count is clamped to at least 1;
* reactants are capped at ``|S| - 1`` so an inhibitor always fits;
* inhibitors are capped at ``|S| - reactants`` and drawn from the
  entities that are not reactants.

Randomness comes from numpy's PCG64 seeded through a ``SeedSequence``; the
system and the context use separate spawned streams, so changing
``ctx_steps`` never changes the generated system.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from rsim.core import ContextSequence, Reaction, ReactionSystem, State

__all__ = [
    "GenSpec",
    "GeneratorError",
    "repair_sizes",
    "generate_system",
    "generate_context",
]

_SEED_MASK = (1 << 64) - 1


class GeneratorError(ValueError):
    pass


@dataclass(frozen=True)
class GenSpec:
    n_entities: int
    n_reactions: int
    alpha: float
    seed: int = 0
    ctx_steps: int = 1000

    def __post_init__(self) -> None:
        if self.n_entities < 1 or self.n_reactions < 1:
            raise GeneratorError("n_entities and n_reactions must be >= 1")
        if not 0.0 <= self.alpha <= 1.0:
            raise GeneratorError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.ctx_steps < 0:
            raise GeneratorError("ctx_steps must be >= 0")

    @property
    def label(self) -> str:
        return f"{self.n_entities}x{self.n_reactions}x{self.alpha:g}"

    def _streams(self) -> tuple[np.random.Generator, np.random.Generator]:
        sys_seq, ctx_seq = np.random.SeedSequence(self.seed & _SEED_MASK).spawn(2)
        return np.random.default_rng(sys_seq), np.random.default_rng(ctx_seq)


def repair_sizes(r: int, i: int, p: int, n: int) -> tuple[int, int, int]:
    if n < 2:
        raise GeneratorError(
            "need at least 2 entities for disjoint non-empty reactants and inhibitors"
        )
    r = min(max(r, 1), n - 1)
    i = min(max(i, 1), n - r)
    p = max(p, 1)
    return r, i, p


def generate_system(spec: GenSpec) -> ReactionSystem:
    n = spec.n_entities
    if n < 2:
        raise GeneratorError(
            "need at least 2 entities for disjoint non-empty reactants and inhibitors"
        )
    rng, _ = spec._streams()
    everything = np.arange(n)
    reactions = []
    for _ in range(spec.n_reactions):
        r, i, p = repair_sizes(*(int(x) for x in rng.binomial(n, spec.alpha, size=3)), n)
        reactants = rng.choice(n, size=r, replace=False)
        rest = np.setdiff1d(everything, reactants, assume_unique=True)
        inhibitors = rng.choice(rest, size=i, replace=False)
        products = rng.choice(n, size=p, replace=False)
        reactions.append(
            Reaction(reactants.tolist(), inhibitors.tolist(), products.tolist())
        )
    return ReactionSystem([f"e{k}" for k in range(n)], reactions)


def generate_context(spec: GenSpec, p_include: float = 0.5) -> ContextSequence:
    """``ctx_steps`` random states, each entity present independently with ``p_include``.

    At the default 0.5 every subset of the background set is equally likely.
    """
    if not 0.0 <= p_include <= 1.0:
        raise GeneratorError(f"p_include must lie in [0, 1], got {p_include}")
    n = spec.n_entities
    _, rng = spec._streams()
    steps = []
    if p_include == 0.5:
        n_bytes = (n + 7) // 8
        mask = (1 << n) - 1
        for _ in range(spec.ctx_steps):
            steps.append(State(int.from_bytes(rng.bytes(n_bytes), "little") & mask, n))
    else:
        for _ in range(spec.ctx_steps):
            row = rng.random(n) < p_include
            bits = int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")
            steps.append(State(bits, n))
    return ContextSequence(steps)
