"""Command-line interface: gen / robust / compare / sweep.

Batch, non-interactive; every command writes one declared output file and
prints its path.  Exit codes: 0 success, 1 usage, 2 solver limit hit,
3 I/O or malformed input.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import bench
from .bench import GenSpec, lambda_grid
from .frontier import efficient_sample, reference_point
from .milp import SolverConfig, SolverLimitError, export_lp
from .model import StructuralError, read_scenario_set, write_scenario_set
from .recovery import (
    RecEffConfig,
    center_fixed_model,
    coupled_model,
    generate_robust_set,
    median_fixed_model,
    write_robust_csv,
)

_SCAL = {"ws": "weighted_sum", "cheb": "chebyshev"}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="recokp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a random benchmark instance")
    gen.add_argument("--items", type=int, required=True)
    gen.add_argument("--scenarios", type=int, default=10)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--low", type=int, default=10)
    gen.add_argument("--high", type=int, default=100)
    gen.add_argument("-o", "--output", required=True)
    gen.set_defaults(func=cmd_gen)

    robust = sub.add_parser("robust", help="robust set over the 101-point grid")
    robust.add_argument("instance")
    robust.add_argument("--method", choices=("center", "median"), required=True)
    robust.add_argument("--coupling", choices=("fixed", "opt"), required=True)
    robust.add_argument("--scalarization", choices=("ws", "cheb"), required=True)
    robust.add_argument("--epsilon", default="0")
    robust.add_argument("--jobs", type=int, default=1)
    robust.add_argument("--node-limit", type=int, default=None)
    robust.add_argument("--time-limit", type=float, default=None)
    robust.add_argument("--export-lp", metavar="DIR", default=None)
    robust.add_argument("-o", "--output", required=True)
    robust.set_defaults(func=cmd_robust)

    compare = sub.add_parser("compare", help="fixed vs opt recovery cost report")
    compare.add_argument("instances", nargs="*")
    compare.add_argument("--items", type=int, default=None)
    compare.add_argument("--count", type=int, default=1)
    compare.add_argument("--scenarios", type=int, default=10)
    compare.add_argument("--seed", type=int, default=0)
    compare.add_argument("--low", type=int, default=10)
    compare.add_argument("--high", type=int, default=100)
    compare.add_argument("--method", choices=("center", "median"), default=None)
    compare.add_argument("--scalarization", choices=("ws", "cheb"), default=None)
    compare.add_argument("--jobs", type=int, default=1)
    compare.add_argument("-o", "--output", required=True)
    compare.set_defaults(func=cmd_compare)

    sweep = sub.add_parser("sweep", help="opt-coupling tolerance sweep")
    sweep.add_argument("instance")
    sweep.add_argument("--method", choices=("center", "median"), required=True)
    sweep.add_argument("--scalarization", choices=("ws", "cheb"), required=True)
    sweep.add_argument("--jobs", type=int, default=1)
    sweep.add_argument("-o", "--output", required=True)
    sweep.set_defaults(func=cmd_sweep)

    return parser


def _write_lines(path: str, lines) -> None:
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def _parse_epsilon(text: str) -> Fraction:
    try:
        eps = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise _UsageError(f"invalid epsilon {text!r}") from None
    if not 0 <= eps <= 1:
        raise _UsageError("epsilon must lie in [0, 1]")
    return eps


def _gen_spec(args, items: int) -> GenSpec:
    try:
        return GenSpec(
            num_items=items,
            num_scenarios=args.scenarios,
            cost_low=args.low,
            cost_high=args.high,
            seed=args.seed,
        )
    except StructuralError as exc:
        raise _UsageError(str(exc)) from None


def cmd_gen(args) -> int:
    spec = _gen_spec(args, args.items)
    write_scenario_set(bench.generate(spec), args.output)
    print(args.output)
    return 0


def _export_models(directory: str, scenario_set, config, lambdas) -> None:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    samples, table = efficient_sample(scenario_set, lambdas, config.scalarization)
    h = (
        reference_point(scenario_set)
        if config.scalarization == "chebyshev"
        else None
    )
    for li, lam in enumerate(lambdas):
        if config.coupling == "opt":
            model = coupled_model(
                scenario_set, lam, config.scalarization, table,
                config.epsilon, config.method, h,
            )
        else:
            points = [samples[(j, li)] for j in range(scenario_set.num_scenarios)]
            builder = (
                center_fixed_model if config.method == "center" else median_fixed_model
            )
            model = builder(scenario_set.instance, points)
        (out / f"lambda_{li:03d}.lp").write_text(export_lp(model), encoding="ascii")


def cmd_robust(args) -> int:
    if args.jobs < 1:
        raise _UsageError("--jobs must be at least 1")
    config = RecEffConfig(
        method=args.method,
        coupling=args.coupling,
        epsilon=_parse_epsilon(args.epsilon),
        scalarization=_SCAL[args.scalarization],
    )
    scenario_set = read_scenario_set(args.instance)
    solver = SolverConfig(node_limit=args.node_limit, time_limit=args.time_limit)
    grid = lambda_grid()
    rs = generate_robust_set(
        scenario_set, grid, config, jobs=args.jobs, solver=solver
    )
    if args.export_lp:
        _export_models(args.export_lp, scenario_set, config, grid)
    write_robust_csv(args.output, rs)
    print(args.output)
    return 0


def cmd_compare(args) -> int:
    if args.jobs < 1:
        raise _UsageError("--jobs must be at least 1")
    sets = []
    if args.instances:
        for k, path in enumerate(args.instances, start=1):
            sets.append((str(k), read_scenario_set(path)))
    elif args.items is not None:
        if args.count < 1:
            raise _UsageError("--count must be at least 1")
        for k in range(args.count):
            spec = _gen_spec(args, args.items)
            spec = GenSpec(
                num_items=spec.num_items,
                num_scenarios=spec.num_scenarios,
                cost_low=spec.cost_low,
                cost_high=spec.cost_high,
                seed=spec.seed + k,
            )
            sets.append((str(k + 1), bench.generate(spec)))
    else:
        raise _UsageError("give instance files or --items for a generated batch")
    methods = (args.method,) if args.method else ("center", "median")
    scals = (
        (_SCAL[args.scalarization],)
        if args.scalarization
        else ("weighted_sum", "chebyshev")
    )
    rows = []
    for label, ss in sets:
        for method in methods:
            for scal in scals:
                rows.append(
                    bench.compare_couplings(
                        ss, method, scal, instance_label=label, jobs=args.jobs
                    )
                )
    report = bench.ExperimentReport(tuple(rows), seed=args.seed)
    _write_lines(args.output, bench.report_csv_rows(report))
    note = bench.scalarization_annotation(report)
    if note:
        print(note, file=sys.stderr)
    print(args.output)
    return 0


def cmd_sweep(args) -> int:
    if args.jobs < 1:
        raise _UsageError("--jobs must be at least 1")
    scenario_set = read_scenario_set(args.instance)
    rows = bench.epsilon_sweep(
        scenario_set, args.method, _SCAL[args.scalarization], jobs=args.jobs
    )
    _write_lines(args.output, bench.sweep_csv_rows(rows))
    print(args.output)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError:
        return 1
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"recokp: error: {exc}", file=sys.stderr)
        return 1
    except SolverLimitError as exc:
        print(f"recokp: solver limit: {exc}", file=sys.stderr)
        return 2
    except (OSError, StructuralError) as exc:
        print(f"recokp: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
