from __future__ import annotations

import random

import pytest

from rsim.core import DimensionError, State, step
from rsim.engines.direct import DirectEngine, compile_system, direct_step
from rsim.generator import GenSpec, generate_system

from conftest import random_state, random_system


def test_compile_paper_example(example):
    e = compile_system(example)
    assert len(e.compiled) == 3
    r2 = e.compiled[1]
    assert (r2.reactants, r2.inhibitors, r2.products) == ((0,), (1, 2), (3,))


def test_compile_single_reaction():
    from rsim.formats import parse_model

    assert len(compile_system(parse_model("x, y, x")).compiled) == 1


def test_compiled_sizes_match_generated_system():
    sys = generate_system(GenSpec(100, 100, 0.05, seed=4))
    e = DirectEngine(sys)
    for c, r in zip(e.compiled, sys.reactions):
        assert len(c.reactants) == len(r.reactants)
        assert len(c.inhibitors) == len(r.inhibitors)
        assert len(c.products) == len(r.products)
        assert list(c.reactants) == sorted(r.reactants)
        assert list(c.inhibitors) == sorted(r.inhibitors)


def test_direct_step_paper_example(example):
    e = DirectEngine(example)
    out = direct_step(e, example.state("bd"), example.empty_state())
    assert example.names_of(out) == ["b"]
    assert e.step(example.empty_state(), example.empty_state()) == example.empty_state()


def test_direct_step_matches_reference_200_cases():
    rng = random.Random(200)
    for _ in range(200):
        n = rng.randint(4, 80)
        sys = random_system(rng, n, rng.randint(1, 60), rng.choice([0.05, 0.1, 0.3]))
        d, c = random_state(rng, n), random_state(rng, n)
        assert DirectEngine(sys).step(d, c) == step(sys, d, c)


@pytest.mark.parametrize("n", [4, 17, 64, 200, 500])
def test_direct_step_equivalence_across_sizes(n):
    rng = random.Random(n)
    for _ in range(200):
        sys = random_system(rng, n, rng.randint(1, 40), rng.choice([0.01, 0.05, 0.1]))
        e = DirectEngine(sys)
        for _ in range(2):
            d, c = random_state(rng, n), random_state(rng, n)
            out = e.step(d, c)
            assert out == step(sys, d, c)
            assert out.bits & ~sys.product_union == 0


def test_short_circuit_is_sound():
    rng = random.Random(9)
    for _ in range(300):
        n = rng.randint(4, 50)
        sys = random_system(rng, n, 30, 0.2)
        e = DirectEngine(sys)
        t = rng.getrandbits(n)
        assert e.step_bits(t) == e.step_bits_exhaustive(t)


def test_dimension_mismatch(example):
    with pytest.raises(DimensionError):
        DirectEngine(example).step(State(0, 3), example.empty_state())
