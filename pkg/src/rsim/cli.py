"""Command line entry point: ``rsim simulate | generate | bench``.

Exit codes: 0 success, 2 usage or input error, 3 engines disagreed.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from rsim.bench import BenchPlan, EngineMismatchError, format_summary, run_bench, summarize, write_csv
from rsim.core import DimensionError, ReactionSystemError, run
from rsim.engines import ENGINE_NAMES, make_engine
from rsim.engines.graph import GraphEngine, write_candidate_csv
from rsim.formats import FormatError, read_context, read_model, write_context, write_model, write_text, write_trajectory
from rsim.generator import GeneratorError, GenSpec, generate_context, generate_system

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISMATCH = 3

SEED_ENV = "RSIM_SEED"


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"rsim: error: {SEED_ENV} must be an integer, got {raw!r}") from None


def _engine_list(text: str) -> list[str]:
    names = [n.strip() for n in text.split(",") if n.strip()]
    for n in names:
        if n not in ENGINE_NAMES:
            raise argparse.ArgumentTypeError(f"unknown engine {n!r}")
    if not names:
        raise argparse.ArgumentTypeError("empty engine list")
    return names


def _add_kernel(p: argparse.ArgumentParser) -> None:
    p.add_argument("--matrix-kernel", choices=("dense", "sparse", "auto"), default="auto")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rsim", description="Reaction systems simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the interactive process and write a trajectory")
    p.add_argument("--model", required=True, type=Path)
    p.add_argument("--context", required=True, type=Path)
    p.add_argument("--engine", choices=("direct", "graph", "matrix"), default="direct")
    p.add_argument("--output", required=True, type=Path)
    p.add_argument("--steps", type=int, help="pad with empty contexts or truncate to N steps")
    p.add_argument("--allow-empty-inhibitors", action="store_true")
    p.add_argument("--candidates-csv", type=Path, help="graph engine: per-step candidate counts")
    _add_kernel(p)

    p = sub.add_parser("generate", help="write a synthetic model and context")
    p.add_argument("--entities", required=True, type=int)
    p.add_argument("--reactions", required=True, type=int)
    p.add_argument("--alpha", required=True, type=float)
    p.add_argument("--ctx-steps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None, help=f"defaults to ${SEED_ENV} or 0")
    p.add_argument("--out-prefix", required=True)

    p = sub.add_parser("bench", help="time engines on a model")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--model", type=Path)
    src.add_argument("--gen", nargs=3, metavar=("ENTITIES", "REACTIONS", "ALPHA"))
    p.add_argument("--context", type=Path, help="required with --model")
    p.add_argument("--ctx-steps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--engines", type=_engine_list, default=["direct", "graph", "matrix"])
    p.add_argument("--reps", type=int, default=30)
    p.add_argument("--warmup", type=int, default=2)
    p.add_argument("--csv", type=Path, required=True)
    p.add_argument("--allow-empty-inhibitors", action="store_true")
    p.add_argument("--candidates-csv", type=Path)
    _add_kernel(p)
    return parser


def cmd_simulate(args: argparse.Namespace) -> int:
    system = read_model(args.model, args.allow_empty_inhibitors)
    ctx = read_context(args.context, system)
    if args.steps is not None:
        if args.steps < 0:
            raise ValueError("--steps must be non-negative")
        ctx = ctx.padded(args.steps, system.n_entities)
    opts = {"record_stats": True} if args.candidates_csv and args.engine == "graph" else {}
    engine = make_engine(args.engine, system, args.matrix_kernel, **opts)
    tr = run(engine, ctx)
    write_text(args.output, write_trajectory(tr, system))
    if isinstance(engine, GraphEngine) and args.candidates_csv:
        write_candidate_csv(engine.stats, args.candidates_csv)
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    seed = _default_seed() if args.seed is None else args.seed
    spec = GenSpec(args.entities, args.reactions, args.alpha, seed, args.ctx_steps)
    system = generate_system(spec)
    write_text(f"{args.out_prefix}.rsys", write_model(system))
    write_text(f"{args.out_prefix}.ctx", write_context(generate_context(spec), system))
    print(spec.label)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    kw = dict(
        engines=args.engines,
        repetitions=args.reps,
        warmup=args.warmup,
        matrix_kernel=args.matrix_kernel,
        candidate_csv=args.candidates_csv,
    )
    if args.model is not None:
        if args.context is None:
            raise ValueError("--context is required with --model")
        plan = BenchPlan.from_files(args.model, args.context, args.allow_empty_inhibitors, **kw)
    else:
        n, m, alpha = args.gen
        seed = _default_seed() if args.seed is None else args.seed
        plan = BenchPlan.from_spec(GenSpec(int(n), int(m), float(alpha), seed, args.ctx_steps), **kw)
    records = run_bench(plan)
    write_csv(records, args.csv)
    print(f"model {plan.model}, {len(plan.context)} steps, {plan.repetitions} repetitions")
    print(format_summary(summarize(records)), end="")
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "generate": cmd_generate, "bench": cmd_bench}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except EngineMismatchError as exc:
        print(f"rsim: correctness failure: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (FormatError, ReactionSystemError, DimensionError, GeneratorError, ValueError, OSError) as exc:
        print(f"rsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
