"""Repeated timed runs per engine, summary statistics and CSV output.

Every repetition builds a fresh engine (timed as ``<engine>:setup``) and
then times only the simulation loop. All trajectories produced during a
plan must agree, so a benchmark is also a cross-engine correctness check.

Summary arithmetic is exact up to the final rounding: the mean is the
correctly rounded rational mean of the recorded ``wall_ms`` values and the
standard deviation is the square root of the correctly rounded population
variance.
"""

from __future__ import annotations

import csv
import math
import statistics
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from rsim.core import ContextSequence, ReactionSystem, Trajectory, run
from rsim.engines import ENGINE_NAMES, make_engine
from rsim.engines.graph import GraphEngine, write_candidate_csv
from rsim.formats import read_context, read_model
from rsim.generator import GenSpec, generate_context, generate_system

__all__ = [
    "BenchPlan",
    "BenchRecord",
    "EngineMismatchError",
    "Summary",
    "CSV_HEADER",
    "run_bench",
    "summarize",
    "format_summary",
    "write_csv",
    "read_csv",
]

CSV_HEADER = ("engine", "model", "steps", "rep", "wall_ms")
SETUP_SUFFIX = ":setup"


class EngineMismatchError(RuntimeError):
    def __init__(self, engine_a: str, engine_b: str, step: int):
        self.engine_a = engine_a
        self.engine_b = engine_b
        self.step = step
        super().__init__(
            f"engines {engine_a!r} and {engine_b!r} diverge at step {step}"
        )


class BenchRecord(NamedTuple):
    engine: str
    model: str
    steps: int
    rep: int
    wall_ms: float


@dataclass
class BenchPlan:
    system: ReactionSystem
    context: ContextSequence
    model: str
    engines: Sequence[str] = ("direct", "graph", "matrix")
    repetitions: int = 30
    warmup: int = 2
    matrix_kernel: str = "auto"
    candidate_csv: Path | None = None

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.warmup < 0:
            raise ValueError("warmup must be >= 0")
        if not self.engines:
            raise ValueError("at least one engine is required")
        for name in self.engines:
            if name not in ENGINE_NAMES:
                raise ValueError(f"unknown engine {name!r}")

    @classmethod
    def from_files(
        cls, model_path: str | Path, context_path: str | Path, allow_empty_inhibitors: bool = False, **kw
    ) -> BenchPlan:
        sys = read_model(model_path, allow_empty_inhibitors)
        return cls(sys, read_context(context_path, sys), Path(model_path).stem, **kw)

    @classmethod
    def from_spec(cls, spec: GenSpec, **kw) -> BenchPlan:
        return cls(generate_system(spec), generate_context(spec), spec.label, **kw)


def _ms(ns: int) -> float:
    # microsecond capture, millisecond units
    return round(ns / 1_000_000, 3)


def run_bench(plan: BenchPlan) -> list[BenchRecord]:
    steps = len(plan.context)
    records: list[BenchRecord] = []
    reference: tuple[str, Trajectory] | None = None

    def check(label: str, tr: Trajectory) -> None:
        nonlocal reference
        if reference is None:
            reference = (label, tr)
            return
        at = reference[1].first_divergence(tr)
        if at is not None:
            raise EngineMismatchError(reference[0], label, at)

    for name in plan.engines:
        record_stats = plan.candidate_csv is not None and name == "graph"
        opts = {"record_stats": True} if record_stats else {}
        for _ in range(plan.warmup):
            check(name, run(make_engine(name, plan.system, plan.matrix_kernel, **opts), plan.context))
        for rep in range(plan.repetitions):
            t0 = time.perf_counter_ns()
            engine = make_engine(name, plan.system, plan.matrix_kernel, **opts)
            t1 = time.perf_counter_ns()
            tr = run(engine, plan.context)
            t2 = time.perf_counter_ns()
            records.append(BenchRecord(name, plan.model, steps, rep, _ms(t2 - t1)))
            records.append(BenchRecord(name + SETUP_SUFFIX, plan.model, steps, rep, _ms(t1 - t0)))
            check(name, tr)
        if record_stats and isinstance(engine, GraphEngine):
            write_candidate_csv(engine.stats, plan.candidate_csv)
    records.sort(key=lambda r: (r.engine, r.rep))
    return records


class Summary(NamedTuple):
    n: int
    mean: float
    std: float
    min: float
    max: float
    median: float

    def table_cell(self) -> str:
        """Rounded ``mean (std)`` as in a results table."""
        return f"{self.mean:.0f} ({self.std:.0f})"


def _summary(values: list[float]) -> Summary:
    if not values:
        raise ValueError("cannot summarize an empty group")
    exact = [Fraction(v) for v in values]
    n = len(exact)
    mean = sum(exact) / n
    var = sum((x - mean) ** 2 for x in exact) / n
    return Summary(
        n, float(mean), math.sqrt(float(var)), min(values), max(values), statistics.median(values)
    )


def summarize(records: Iterable[BenchRecord]) -> dict[str, Summary]:
    """Per-engine statistics, keyed by engine label in first-seen order."""
    groups: dict[str, list[float]] = {}
    for r in records:
        groups.setdefault(r.engine, []).append(r.wall_ms)
    if not groups:
        raise ValueError("no records to summarize")
    return {label: _summary(values) for label, values in groups.items()}


def format_summary(summary: dict[str, Summary]) -> str:
    rows = [("engine", "n", "mean_ms", "std_ms", "min_ms", "median_ms", "max_ms", "table")]
    for label, s in summary.items():
        rows.append(
            (label, str(s.n), repr(s.mean), repr(s.std), repr(s.min), repr(s.median), repr(s.max), s.table_cell())
        )
    widths = [max(len(row[k]) for row in rows) for k in range(len(rows[0]))]
    return "".join(
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() + "\n" for row in rows
    )


def write_csv(records: Iterable[BenchRecord], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in sorted(records, key=lambda r: (r.engine, r.rep)):
            w.writerow((r.engine, r.model, r.steps, r.rep, repr(r.wall_ms)))


def read_csv(path: str | Path) -> list[BenchRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        return [
            BenchRecord(row["engine"], row["model"], int(row["steps"]), int(row["rep"]), float(row["wall_ms"]))
            for row in reader
        ]
