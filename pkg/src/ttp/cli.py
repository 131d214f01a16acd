"""Command line front end.

Exit codes: 0 success, 1 usage error, 2 unreadable or invalid data,
3 oracle limit refusal.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .analysis import (
    Direction,
    capacity_sensitivity,
    dependency_test,
    rent_sweep,
    slope_sweep,
)
from .errors import ConfigError, OracleLimitError, ParseError, ValidationError
from .instance import (
    GeneratorConfig,
    KPClass,
    TtpInstance,
    generate_instance,
    read_instance,
    validate_instance,
    write_instance,
)
from .oracle import OracleLimits, Solution, solve_exact_ttp
from .solvers import (
    RunResult,
    SolverConfig,
    cooperative_coevolution,
    decomposed_pipeline,
    joint_ea,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_LIMIT = 0, 1, 2, 3

SWEEP_COLUMNS = ["parameter_value", "objective", "packing_matches_kp", "tour_matches_tsp", "plan_empty"]
STOCHASTIC = {"ea", "cc"}


@dataclass
class CommandOutcome:
    exit_code: int
    artifacts: list[str] = field(default_factory=list)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ttp", description="Traveling Thief Problem toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="validate an instance file")
    c.add_argument("--instance", required=True)

    g = sub.add_parser("generate", help="write a random instance")
    g.add_argument("--cities", type=int, required=True)
    g.add_argument("--items-per-city", type=int, required=True)
    g.add_argument("--kp-class", choices=[k.value for k in KPClass], required=True)
    g.add_argument("--capacity-factor", type=float, required=True)
    g.add_argument("--rent", type=float, required=True)
    g.add_argument("--vmin", type=float, required=True)
    g.add_argument("--vmax", type=float, required=True)
    g.add_argument("--coordinate-range", type=float, default=100.0)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True)

    s = sub.add_parser("solve", help="run a solver")
    s.add_argument("--instance", required=True)
    s.add_argument("--algorithm", choices=["oracle", "pipeline", "ea", "cc"], required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--evals", type=int, default=100_000)
    s.add_argument("--out", required=True)
    s.add_argument("--runs", type=int, default=1)
    s.add_argument("--population", type=int, default=50)
    _limit_flags(s)

    w = sub.add_parser("sweep", help="oracle sweep over rent, slope (v_min) or capacity")
    w.add_argument("--instance", required=True)
    w.add_argument("--param", choices=["rent", "slope", "capacity"], required=True)
    w.add_argument("--values", required=True, type=_float_list)
    w.add_argument("--out", required=True)
    _limit_flags(w)

    d = sub.add_parser("dep", help="dependency test between the two components")
    d.add_argument("--instance", required=True)
    d.add_argument("--direction", choices=[x.value for x in Direction], required=True)
    d.add_argument("--out", required=True)
    _limit_flags(d)
    return p


def _limit_flags(p):
    p.add_argument("--max-cities", type=int, default=OracleLimits.max_cities)
    p.add_argument("--max-items", type=int, default=OracleLimits.max_items)


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty value list")
    return vals


def _limits(args) -> OracleLimits:
    return OracleLimits(args.max_cities, args.max_items)


def _load(path: str) -> TtpInstance:
    inst = read_instance(path)
    problems = validate_instance(inst)
    if problems:
        raise ValidationError(problems)
    return inst


def _write_json(path: str, payload) -> str:
    text = json.dumps(payload, indent=2) + "\n"
    Path(path).write_text(text, encoding="utf-8")
    return path


def solution_json(sol: Solution) -> dict:
    return {
        "tour": list(sol.tour.order),
        "plan": sol.plan.items(),
        "profit": sol.evaluation.profit,
        "time": sol.evaluation.time,
        "objective": sol.evaluation.objective,
    }


def result_json(inst: TtpInstance, algorithm: str, seed, budget, res: RunResult) -> dict:
    return {
        "instance": inst.name,
        "algorithm": algorithm,
        "seed": seed,
        "eval_budget": budget,
        "best": solution_json(res.best),
        "history": [[e, b] for e, b in res.history],
    }


def _run_one(job):
    inst, algorithm, cfg = job
    if algorithm == "ea":
        return joint_ea(inst, cfg)
    if algorithm == "cc":
        return cooperative_coevolution(inst, cfg)
    return decomposed_pipeline(inst, cfg)


def cmd_check(args) -> CommandOutcome:
    inst = read_instance(args.instance)
    problems = validate_instance(inst)
    if problems:
        for msg in problems:
            print(msg)
        return CommandOutcome(EXIT_DATA)
    print("valid")
    return CommandOutcome(EXIT_OK)


def cmd_generate(args) -> CommandOutcome:
    cfg = GeneratorConfig(
        n_cities=args.cities,
        items_per_city=args.items_per_city,
        kp_class=KPClass(args.kp_class),
        capacity_factor=args.capacity_factor,
        coordinate_range=args.coordinate_range,
        rent=args.rent,
        v_min=args.vmin,
        v_max=args.vmax,
        seed=args.seed,
    )
    try:
        cfg.check()
    except ValidationError as exc:
        raise UsageError(str(exc))
    write_instance(generate_instance(cfg), args.out)
    return CommandOutcome(EXIT_OK, [args.out])


def cmd_solve(args) -> CommandOutcome:
    if args.algorithm in STOCHASTIC and args.seed is None:
        raise UsageError(f"ttp solve: error: --seed is required for --algorithm {args.algorithm}")
    if args.runs < 1:
        raise UsageError("ttp solve: error: --runs must be at least 1")
    inst = _load(args.instance)
    if args.algorithm == "oracle":
        sol = solve_exact_ttp(inst, _limits(args))
        res = RunResult(sol, 0, [(0, sol.objective)])
        payload = result_json(inst, "oracle", args.seed, None, res)
        return CommandOutcome(EXIT_OK, [_write_json(args.out, payload)])

    base = 0 if args.seed is None else args.seed
    seeds = [base + k for k in range(args.runs)]
    try:
        cfgs = [SolverConfig(seed=s, eval_budget=args.evals, population_size=args.population) for s in seeds]
        for cfg in cfgs:
            cfg.check()
    except ConfigError as exc:
        raise UsageError(f"ttp solve: error: {exc}")
    jobs = [(inst, args.algorithm, cfg) for cfg in cfgs]
    if len(jobs) > 1 and (os.cpu_count() or 1) > 1:
        with ProcessPoolExecutor(max_workers=min(len(jobs), os.cpu_count() or 1)) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]

    docs = [
        result_json(inst, args.algorithm, s if args.seed is not None else None, args.evals, r)
        for s, r in zip(seeds, results)
    ]
    if args.runs == 1:
        payload = docs[0]
    else:
        payload = {"instance": inst.name, "algorithm": args.algorithm, "eval_budget": args.evals, "runs": docs}
    return CommandOutcome(EXIT_OK, [_write_json(args.out, payload)])


def cmd_sweep(args) -> CommandOutcome:
    inst = _load(args.instance)
    fn = {"rent": rent_sweep, "slope": slope_sweep, "capacity": capacity_sensitivity}[args.param]
    try:
        res = fn(inst, args.values, _limits(args))
    except ValueError as exc:
        raise UsageError(f"ttp sweep: error: {exc}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for pt in res.points:
        writer.writerow([repr(pt.value), repr(pt.objective), int(pt.packing_matches_kp),
                         int(pt.tour_matches_tsp), int(pt.plan_empty)])
    Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    return CommandOutcome(EXIT_OK, [args.out])


def _component_json(x) -> list[int]:
    return list(x.order) if hasattr(x, "order") else x.items()


def cmd_dep(args) -> CommandOutcome:
    inst = _load(args.instance)
    rep = dependency_test(inst, args.direction, _limits(args))
    witness = None
    if rep.witness is not None:
        w = rep.witness
        witness = {k: _component_json(getattr(w, k)) for k in ("a", "a_prime", "best", "best_prime")}
    payload = {
        "instance": inst.name,
        "direction": list(rep.direction),
        "dependent": rep.dependent,
        "instances_tested": rep.instances_tested,
        "witness": witness,
    }
    return CommandOutcome(EXIT_OK, [_write_json(args.out, payload)])


COMMANDS = {"check": cmd_check, "generate": cmd_generate, "solve": cmd_solve, "sweep": cmd_sweep, "dep": cmd_dep}


def execute(argv: list[str]) -> CommandOutcome:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return CommandOutcome(EXIT_USAGE)
    except SystemExit as exc:  # --help
        return CommandOutcome(EXIT_OK if not exc.code else EXIT_USAGE)
    except OracleLimitError as exc:
        print(f"ttp: oracle refused: {exc}", file=sys.stderr)
        return CommandOutcome(EXIT_LIMIT)
    except (OSError, ParseError, ValidationError) as exc:
        print(f"ttp: {exc}", file=sys.stderr)
        return CommandOutcome(EXIT_DATA)


def main() -> None:
    sys.exit(execute(sys.argv[1:]).exit_code)


if __name__ == "__main__":
    main()
