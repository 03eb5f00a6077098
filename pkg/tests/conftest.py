from __future__ import annotations

import random
from pathlib import Path

import pytest

from rsim.core import ContextSequence, Reaction, ReactionSystem, State
from rsim.formats import parse_model

DATA = Path(__file__).parent / "data"

EXAMPLE_MODEL = "a b, c, a b\na, b c, d\nd, c, b\n"


@pytest.fixture
def example() -> ReactionSystem:
    return parse_model(EXAMPLE_MODEL)


def random_system(rng: random.Random, n: int, m: int, density: float) -> ReactionSystem:
    """Small random strict system built with the stdlib RNG (independent of rsim.generator)."""
    reactions = []
    for _ in range(m):
        ids = list(range(n))
        rng.shuffle(ids)
        r = max(1, min(n - 1, sum(rng.random() < density for _ in range(n))))
        i = max(1, min(n - r, sum(rng.random() < density for _ in range(n))))
        p = max(1, sum(rng.random() < density for _ in range(n)))
        reactions.append(Reaction(ids[:r], ids[r:r + i], rng.sample(range(n), p)))
    return ReactionSystem([f"s{k}" for k in range(n)], reactions)


def random_state(rng: random.Random, n: int) -> State:
    return State(rng.getrandbits(n) if n else 0, n)


def random_context(rng: random.Random, n: int, steps: int) -> ContextSequence:
    return ContextSequence(random_state(rng, n) for _ in range(steps))


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")
