"""Command-line entry point: ``darp solve | bench | oracle | gen``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from .bench import CHECKPOINTS, emit_reports, instance_paths, run_experiment
from .instance_io import BKS_ENV_VAR, BksRegistry, ParseError, canonical_name, gap_percent, read_instance, write_instance
from .instgen import GenParams, generate
from .kernels import BACKENDS, DEFAULT_BACKEND
from .model import validate_solution
from .oracle import OracleRefused, exact_solve
from .schedule import EvaluationLevel, evaluate_solution
from .tabu import VARIANTS, SearchConfig, search


class CliError(Exception):
    """A user-facing failure; reported on stderr with exit status 2."""


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"{text} is not an unsigned 64-bit integer")
    return value


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"{text} must be positive")
    return value


def _add_engine_options(p: argparse.ArgumentParser, clock: str) -> None:
    p.add_argument("--time-limit", type=_positive, default=10.0, help="seconds per run (default 10)")
    p.add_argument("--clock", choices=("wall", "work"), default=clock,
                   help=f"wall time, or deterministic kernel work (default {clock})")
    p.add_argument("--work-per-ms", type=_positive, default=SearchConfig.work_per_ms,
                   help="kernel steps counted as one millisecond on the work clock")
    p.add_argument("--backend", choices=sorted(BACKENDS), default=None,
                   help=f"route kernel (default {DEFAULT_BACKEND})")
    p.add_argument("--registry", default=None,
                   help=f"best-known-cost file ('name cost' lines); overrides ${BKS_ENV_VAR}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="darp", description="Tabu search for the dial-a-ride problem.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run one search on one instance")
    p.add_argument("--instance", required=True, type=Path)
    p.add_argument("--variant", required=True, choices=sorted(VARIANTS), type=str.lower)
    p.add_argument("--ch", action="store_true", help="start from the greedy construction")
    p.add_argument("--tw", action="store_true", help="tighten time windows first")
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--json", action="store_true", help="print the result as JSON")
    _add_engine_options(p, clock="wall")

    p = sub.add_parser("bench", help="replicated runs with trace and table output")
    p.add_argument("--instances", required=True, type=Path, help="directory of instance files")
    p.add_argument("--variants", required=True,
                   help="comma list such as ts11,ts32,its or ts32+ch+tw")
    p.add_argument("--replicates", type=int, default=5)
    p.add_argument("--seeds", type=_u64, default=0, help="seed of the first replicate")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--workers", type=int, default=1)
    _add_engine_options(p, clock="work")

    p = sub.add_parser("oracle", help="exact optimum of a tiny instance by enumeration")
    p.add_argument("--instance", required=True, type=Path)

    p = sub.add_parser("gen", help="write a random instance")
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--m", required=True, type=int)
    p.add_argument("--seed", required=True, type=_u64)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--window-open-max", type=float, default=GenParams.window_open_max,
                   help="latest opening time of the narrow windows")
    return parser


def _registry(path) -> BksRegistry:
    try:
        return BksRegistry.load(path)
    except OSError as exc:
        raise CliError(f"cannot read registry: {exc}") from exc


def _read(path: Path):
    try:
        return read_instance(path)
    except OSError as exc:
        raise CliError(f"cannot read instance {path}: {exc.strerror or exc}") from exc
    except ParseError as exc:
        raise CliError(f"{path}: {exc}") from exc


def _engine_kwargs(args) -> dict:
    return dict(time_limit=args.time_limit, clock=args.clock, work_per_ms=args.work_per_ms,
                backend=args.backend)


def cmd_solve(args) -> int:
    instance = _read(args.instance)
    registry = _registry(args.registry)
    config = SearchConfig.for_variant(args.variant, args.ch, args.tw, seed=args.seed, **_engine_kwargs(args))
    result = search(instance, config)
    name = canonical_name(instance.name)
    bks = registry.get(name)
    out = {
        "instance": name,
        "variant": config.label,
        "seed": args.seed,
        "feasible": result.best is not None,
        "cost": result.best_cost,
        "gap_percent": gap_percent(result.best_cost, bks) if bks and result.best_cost is not None else None,
        "first_feasible": result.trace.first_feasible,
        "iterations": result.iterations,
        "evaluations": result.evaluations,
        "routes": result.best.sequences if result.best is not None else None,
    }
    if result.best is not None:
        defects = validate_solution(instance, result.best)
        if defects:
            raise CliError(f"internal error: returned solution is malformed: {defects[0]}")
        # the schedule is computed on the searched instance; report on the original too
        viol = evaluate_solution(instance, result.best.routes, EvaluationLevel.LEVEL3)[1]
        out["violations_on_original_windows"] = list(viol)
    if args.json:
        print(json.dumps(out, indent=2))
        return 0
    print(f"{name}  {config.label}  seed={args.seed}")
    if result.best is None:
        print("no feasible solution found")
    else:
        gap = "" if out["gap_percent"] is None else f"  gap={out['gap_percent']:.2f}%"
        print(f"cost={result.best_cost:.2f}{gap}")
        ff = result.trace.first_feasible
        print(f"first feasible: cost={ff[0]:.2f} at {ff[1]:.1f} ms")
        for k, seq in enumerate(out["routes"]):
            print(f"  vehicle {k}: {' '.join(map(str, seq)) or '-'}")
    print(f"iterations={result.iterations} evaluations={result.evaluations}")
    return 0


def cmd_bench(args) -> int:
    if args.replicates < 1:
        raise CliError("--replicates must be >= 1")
    if args.workers < 1:
        raise CliError("--workers must be >= 1")
    try:
        paths = instance_paths(args.instances)
    except FileNotFoundError as exc:
        raise CliError(str(exc)) from exc
    instances = [_read(p) for p in paths]
    variants = [v for v in (s.strip() for s in args.variants.split(",")) if v]
    if not variants:
        raise CliError("--variants is empty")
    registry = _registry(args.registry)
    reports = run_experiment(instances, variants, args.replicates, args.time_limit, seeds=args.seeds,
                             workers=args.workers, registry=registry, clock=args.clock,
                             work_per_ms=args.work_per_ms, backend=args.backend)
    config = {
        "instances": [canonical_name(p.stem) for p in paths],
        "variants": variants,
        "replicates": args.replicates,
        "seeds": args.seeds,
        "time_limit": args.time_limit,
        "clock": args.clock,
        "work_per_ms": args.work_per_ms,
        "backend": args.backend or DEFAULT_BACKEND,
        "checkpoints_s": list(CHECKPOINTS),
        "engine": SearchConfig().to_dict(),
    }
    try:
        written = emit_reports(reports, args.out, config)
    except OSError as exc:
        raise CliError(f"cannot write reports to {args.out}: {exc}") from exc
    print(f"{len(reports)} runs written to {args.out}")
    for kind, path in written.items():
        print(f"  {kind}: {path}")
    return 0


def cmd_oracle(args) -> int:
    instance = _read(args.instance)
    try:
        found = exact_solve(instance)
    except OracleRefused as exc:
        raise CliError(str(exc)) from exc
    if found is None:
        print("infeasible")
        return 0
    cost, solution = found
    print(f"optimum={cost:.6f}")
    for k, seq in enumerate(solution.sequences):
        print(f"  vehicle {k}: {' '.join(map(str, seq)) or '-'}")
    return 0


def cmd_gen(args) -> int:
    try:
        instance = generate(args.n, args.m, args.seed, GenParams(window_open_max=args.window_open_max))
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    try:
        write_instance(instance, args.out)
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc.strerror or exc}") from exc
    print(f"wrote {args.out}")
    return 0


COMMANDS = {"solve": cmd_solve, "bench": cmd_bench, "oracle": cmd_oracle, "gen": cmd_gen}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"darp {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"darp {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
