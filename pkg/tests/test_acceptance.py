"""Exit criteria. Each test records one PASS/FAIL line shown in the terminal summary."""

from __future__ import annotations

import bisect
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from rsim.bench import BenchPlan, format_summary, read_csv, run_bench, summarize, write_csv
from rsim.core import ContextSequence, ReferenceEngine, run
from rsim.engines import make_engine
from rsim.engines.graph import GraphEngine, build_graph
from rsim.engines.matrix import MatrixEngine, build_matrices, clip_enabled, state_to_vector
from rsim.formats import (
    parse_context,
    parse_model,
    read_context,
    read_model,
    write_context,
    write_model,
    write_trajectory,
)
from rsim.generator import GenSpec, generate_context, generate_system
from rsim.oracle import naive_run

from conftest import ACCEPTANCE, DATA, EXAMPLE_MODEL

ALPHAS = (0.01, 0.05, 0.1, 0.3)
ENGINES = ("direct", "graph", "matrix-dense", "matrix-sparse")


class record:
    """Context manager storing the outcome of one criterion."""

    def __init__(self, number: int, detail: str):
        self.number = number
        self.detail = detail

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            ACCEPTANCE[self.number] = (True, self.detail)
        else:
            ACCEPTANCE[self.number] = (False, f"{self.detail} -- {exc_type.__name__}: {exc}")
        return False


def test_c1_paper_example_dynamics(example):
    with record(1, "paper example {b,d} -> {b} -> {} on all engines and the oracle, < 1 ms") as rec:
        ctx = ContextSequence([example.state("bd"), example.empty_state()])
        expected = [set(), {"b"}, set()]
        assert naive_run(example, [{"b", "d"}, set()]) == expected
        slowest = 0.0
        for name in ENGINES:
            best = math.inf
            for _ in range(5):
                engine = make_engine(name, example)
                t0 = time.perf_counter()
                tr = run(engine, ctx)
                best = min(best, time.perf_counter() - t0)
            assert [set(example.names_of(s)) for s in tr] == expected, name
            slowest = max(slowest, best)
        assert slowest < 1e-3, f"slowest engine took {slowest * 1e3:.3f} ms"
        rec.detail += f" (slowest {slowest * 1e3:.3f} ms)"


def test_c2_paper_matrices_and_pipeline(example):
    with record(2, "paper matrices R-In, P and pipeline [1,-1,1] -> [0,0,1] -> [0,1,0,0]"):
        m = build_matrices(example)
        assert m.rminus_in.tolist() == [[1, 1, -1, 0], [1, -1, -1, 0], [0, 0, -1, 1]]
        assert m.products.tolist() == [[1, 1, 0, 0], [0, 0, 0, 1], [0, 1, 0, 0]]
        t = np.array([0, 1, 0, 1])
        ahat = m.rminus_in @ t
        assert ahat.tolist() == [1, -1, 1]
        for kernel in ("dense", "sparse"):
            e = MatrixEngine(example, kernel)
            a = e.enabled_vector(t)
            assert clip_enabled(ahat, m.thresholds).tolist() == a.tolist() == [0, 0, 1]
            assert e.product_counts(a).tolist() == [0, 1, 0, 0]
            assert e.step_vector(t).tolist() == [0, 1, 0, 0]
            assert e.step_vector(e.step_vector(t)).tolist() == [0, 0, 0, 0]


def test_c3_paper_dependency_graph(example):
    with record(3, "dependency graph edges {r1->r1, r1->r2, r2->r3, r3->r1}"):
        assert build_graph(example).edge_set() == {(0, 0), (0, 1), (1, 2), (2, 0)}


def _corpus(n_cases: int = 1000, seed: int = 2024):
    """Randomized (system, context) pairs: sizes log-uniform in 4..500, every alpha."""
    rng = random.Random(seed)
    cases = []
    for k in range(n_cases):
        alpha = ALPHAS[k % len(ALPHAS)]
        if k < 2 * len(ALPHAS):
            n = m = 4 if k < len(ALPHAS) else 500
        else:
            n = round(math.exp(rng.uniform(math.log(4), math.log(500))))
            m = round(math.exp(rng.uniform(math.log(4), math.log(500))))
        p_include = rng.choice((0.5, 0.1, 0.02))
        spec = GenSpec(n, m, alpha, seed=rng.getrandbits(63), ctx_steps=100)
        cases.append((spec, p_include))
    return cases


@pytest.fixture(scope="module")
def corpus_results():
    """Run every engine and the oracle over the corpus once; criteria 4 and 5 read the outcome."""
    mismatches = []
    soundness_violations = []
    sizes = set()
    t0 = time.perf_counter()
    cases = _corpus()
    for spec, p_include in cases:
        sys = generate_system(spec)
        ctx = generate_context(spec, p_include)
        sizes.add((spec.n_entities, spec.n_reactions, spec.alpha))
        expected = naive_run(sys, [sys.names_of(c) for c in ctx])
        for name in ENGINES:
            opts = {"check_soundness": True} if name == "graph" else {}
            try:
                tr = run(make_engine(name, sys, **opts), ctx)
            except AssertionError as exc:
                soundness_violations.append((spec, str(exc)))
                continue
            got = [frozenset(sys.names_of(s)) for s in tr]
            if got != expected:
                mismatches.append((spec.label, spec.seed, name))
    return {
        "cases": len(cases),
        "mismatches": mismatches,
        "violations": soundness_violations,
        "sizes": sizes,
        "seconds": time.perf_counter() - t0,
    }


def test_c4_cross_engine_equivalence(corpus_results):
    r = corpus_results
    with record(4, f"{r['cases']} randomized pairs, 100 steps, all engines == naive oracle") as rec:
        ns = {s[0] for s in r["sizes"]}
        ms = {s[1] for s in r["sizes"]}
        assert r["cases"] >= 1000
        assert min(ns) == min(ms) == 4 and max(ns) == max(ms) == 500
        assert {s[2] for s in r["sizes"]} == set(ALPHAS)
        assert r["mismatches"] == []
        assert r["seconds"] < 120, f"corpus took {r['seconds']:.1f} s"
        rec.detail += f" ({r['seconds']:.1f} s)"


def test_c5_pruning_soundness(corpus_results):
    with record(5, "graph engine: enabled subset of candidates at every step, zero violations"):
        assert corpus_results["violations"] == []


def test_c6_matrix_enabledness_conditions():
    with record(6, "clip_enabled((R-In)t)_i == [sum r_ij t_j = |R_i|] and [sum in_ij t_j = 0]") as rec:
        rng = random.Random(6)
        checked = 0
        for k in range(200):
            n, m = rng.randint(4, 200), rng.randint(1, 200)
            spec = GenSpec(n, m, ALPHAS[k % len(ALPHAS)], seed=k)
            sys = generate_system(spec)
            # reactant and inhibitor matrices built straight from the reaction sets
            R = np.zeros((m, n), dtype=np.int64)
            In = np.zeros((m, n), dtype=np.int64)
            for i, r in enumerate(sys.reactions):
                R[i, sorted(r.reactants)] = 1
                In[i, sorted(r.inhibitors)] = 1
            sizes = np.array([len(r.reactants) for r in sys.reactions])
            mats = build_matrices(sys)
            engines = [MatrixEngine(sys, "dense"), MatrixEngine(sys, "sparse")]
            for c in generate_context(GenSpec(n, m, 0.1, seed=k, ctx_steps=20), rng.choice((0.5, 0.9, 0.1))):
                t = state_to_vector(c)
                cond_reactants = (R @ t) == sizes
                cond_inhibitors = (In @ t) == 0
                expected = (cond_reactants & cond_inhibitors).astype(np.int64)
                got = clip_enabled(mats.rminus_in @ t, mats.thresholds)
                assert got.tolist() == expected.tolist()
                for e in engines:
                    assert e.enabled_vector(t).tolist() == expected.tolist()
                checked += m
        rec.detail += f" ({checked} reaction/state checks)"


def _clamped_binomial_mc(n: int, alpha: float, draws: int, seed: int) -> tuple[float, float]:
    """Monte-Carlo mean and standard error of max(1, Binomial(n, alpha)) via inverse CDF."""
    cdf = []
    acc = 0.0
    for k in range(n + 1):
        acc += math.comb(n, k) * alpha**k * (1 - alpha) ** (n - k)
        cdf.append(acc)
    rng = random.Random(seed)
    total = 0
    total_sq = 0
    for _ in range(draws):
        k = min(bisect.bisect_left(cdf, rng.random() * cdf[-1]), n)
        k = min(max(k, 1), n - 1)
        total += k
        total_sq += k * k
    mean = total / draws
    var = total_sq / draws - mean * mean
    return mean, math.sqrt(var / draws)


def test_c7_generator_distribution():
    with record(7, "100x10000x0.05 reactant-size mean within 3 SE of clamped binomial; ctx popcount in [48,52]") as rec:
        spec = GenSpec(100, 10_000, 0.05, seed=7, ctx_steps=1000)
        sizes = [len(r.reactants) for r in generate_system(spec).reactions]
        mean = sum(sizes) / len(sizes)
        sd = math.sqrt(sum((s - mean) ** 2 for s in sizes) / (len(sizes) - 1))
        se = sd / math.sqrt(len(sizes))
        oracle_mean, oracle_se = _clamped_binomial_mc(100, 0.05, 1_000_000, seed=77)
        assert abs(mean - oracle_mean) <= 3 * se, (mean, oracle_mean, se)
        ctx = generate_context(spec)
        popcount = sum(c.popcount() for c in ctx) / len(ctx)
        assert 48 <= popcount <= 52
        rec.detail += (
            f" (mean {mean:.4f}, oracle {oracle_mean:.4f}+-{oracle_se:.4f}, 3SE {3 * se:.4f}; popcount {popcount:.2f})"
        )


def test_c8_performance_envelope(tmp_path):
    with record(8, "1000x1000x0.1, 1000 steps on direct engine <= 10 s; graph tests <= |A|; setup/run split") as rec:
        spec = GenSpec(1000, 1000, 0.1, seed=8, ctx_steps=1000)
        cand = tmp_path / "candidates.csv"
        plan = BenchPlan.from_spec(spec, engines=["direct", "graph"], repetitions=1, warmup=0, candidate_csv=cand)
        records = run_bench(plan)
        by_label = {r.engine: r.wall_ms for r in records}
        assert set(by_label) == {"direct", "direct:setup", "graph", "graph:setup"}
        assert by_label["direct"] <= 10_000, f"direct run took {by_label['direct']} ms"
        lines = cand.read_text().splitlines()[1:]
        assert len(lines) == 1000
        tested = [int(line.split(",")[1]) for line in lines]
        assert max(tested) <= spec.n_reactions
        rec.detail += (
            f" (direct run {by_label['direct']:.1f} ms + setup {by_label['direct:setup']:.1f} ms;"
            f" graph run {by_label['graph']:.1f} ms + setup {by_label['graph:setup']:.1f} ms;"
            f" max candidates {max(tested)})"
        )


def test_c9_format_round_trip():
    with record(9, "parse/write/parse identity for 100 random systems and contexts; golden example files"):
        rng = random.Random(9)
        for k in range(100):
            n = rng.randint(2, 300)
            spec = GenSpec(n, rng.randint(1, 300), ALPHAS[k % len(ALPHAS)], seed=k, ctx_steps=30)
            sys = generate_system(spec)
            text = write_model(sys)
            again = parse_model(text)
            assert again == sys
            assert write_model(again) == text
            ctx = generate_context(spec, rng.choice((0.5, 0.05)))
            ctx_text = write_context(ctx, sys)
            assert parse_context(ctx_text, again) == ctx
            assert write_context(parse_context(ctx_text, again), again) == ctx_text
        model_bytes = (DATA / "example.rsys").read_bytes()
        assert model_bytes == EXAMPLE_MODEL.encode()
        sys = read_model(DATA / "example.rsys")
        assert write_model(sys).encode() == model_bytes
        ctx = read_context(DATA / "example.ctx", sys)
        assert write_context(ctx, sys).encode() == (DATA / "example.ctx").read_bytes() == b"b d\n.\n"
        traj = write_trajectory(run(ReferenceEngine(sys), ctx), sys).encode()
        assert traj == (DATA / "example.traj").read_bytes() == b".\nb\n.\n"


def test_c10_bench_summary_matches_csv(tmp_path):
    with record(10, "reps=30 plan: summary mean/std == independent recomputation from CSV, full precision"):
        plan = BenchPlan.from_spec(
            GenSpec(50, 50, 0.05, seed=10, ctx_steps=200),
            engines=["direct", "graph", "matrix"],
            repetitions=30,
            warmup=2,
        )
        records = run_bench(plan)
        path = tmp_path / "bench.csv"
        write_csv(records, path)
        printed = format_summary(summarize(records))
        rows = {}
        for line in printed.splitlines()[1:]:
            cells = line.split()
            rows[cells[0]] = (int(cells[1]), float(cells[2]), float(cells[3]))
        groups: dict[str, list[Fraction]] = {}
        for r in read_csv(path):
            groups.setdefault(r.engine, []).append(Fraction(r.wall_ms))
        assert set(groups) == set(rows) == {"direct", "direct:setup", "graph", "graph:setup", "matrix", "matrix:setup"}
        for label, xs in groups.items():
            mean = sum(xs) / len(xs)
            std = math.sqrt(float(sum((x - mean) ** 2 for x in xs) / len(xs)))
            assert rows[label] == (30, float(mean), std), label
