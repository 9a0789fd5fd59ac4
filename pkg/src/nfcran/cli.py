"""Command-line interface: ``nfcran {gen,solve,check,sweep}``.

Exit codes: 0 success, 1 usage, 2 I/O or parse error (including an
assignment that does not match its scenario), 3 infeasible assignment or
solver guard.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import constraints, experiment, model, scenarios, solvers

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_INFEASIBLE = 0, 1, 2, 3

log = logging.getLogger("nfcran")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_override(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    name, value = text.split("=", 1)
    return name.strip(), value.strip()


def apply_overrides(params: scenarios.GenParams, overrides: Sequence[tuple[str, str]]) -> scenarios.GenParams:
    """Range fields take ``LOW:HIGH`` (or one value for a point range)."""
    scalar = {"cell_count": int, "deadline": float, "fec_capacity": float}
    for name, value in overrides:
        if name in scenarios.RANGE_FIELDS:
            parts = value.split(":")
            if len(parts) not in (1, 2):
                raise UsageError(f"bad range for {name}: {value!r}")
            lo, hi = float(parts[0]), float(parts[-1])
            params = params.with_range(name, lo, hi)
        elif name in scalar:
            params = params.replace(**{name: scalar[name](value)})
        else:
            raise UsageError(f"unknown override {name!r}")
    return params


def _build_params(args: argparse.Namespace, ues_per_cell: int) -> scenarios.GenParams:
    params = scenarios.PRESETS[args.preset](ues_per_cell=ues_per_cell, seed=args.seed)
    if args.cells is not None:
        params = params.replace(cell_count=args.cells)
    if args.log_uniform:
        params = params.replace(log_uniform=True)
    return apply_overrides(params, args.set or [])


def _solver_config(args: argparse.Namespace) -> solvers.SolverConfig:
    return solvers.SolverConfig(
        solvers.SolverKind(args.solver), args.exact_limit, solvers.Scoring(args.scoring)
    )


def cmd_gen(args: argparse.Namespace) -> int:
    params = _build_params(args, args.ues_per_cell)
    scenario = scenarios.generate(params)
    model.save_scenario(scenario, args.out)
    n = model.total_task_count(scenario)
    print(f"wrote {args.out}: {len(scenario.cells)} cells, {n} tasks, preset={params.preset}, seed={params.seed}")
    print(f"  FEC capacity       {scenario.fec_capacity:.6g} cycles/s")
    print(f"  NEC capacity total {sum(c.nec_capacity for c in scenario.cells):.6g} cycles/s")
    print(f"  fronthaul total    {sum(c.fronthaul_capacity for c in scenario.cells):.6g} bits/s")
    return EXIT_OK


def _utilization_lines(scenario: model.Scenario, usage: model.ResourceUsage) -> list[str]:
    def pct(used: float, cap: float) -> str:
        return f"{100 * used / cap:6.2f}%" if cap > 0 else "   n/a"

    lines = [f"  FEC        {usage.fec:.6g} / {scenario.fec_capacity:.6g}  {pct(usage.fec, scenario.fec_capacity)}"]
    for cell in sorted(scenario.cells, key=lambda c: c.cell_id):
        j = cell.cell_id
        lines.append(
            f"  cell {j:<3} NEC {pct(usage.nec.get(j, 0.0), cell.nec_capacity)}"
            f"  fronthaul {pct(usage.fronthaul.get(j, 0.0), cell.fronthaul_capacity)}"
        )
    return lines


def cmd_solve(args: argparse.Namespace) -> int:
    scenario = model.load_scenario(args.input)
    problems = model.validate_scenario(scenario)
    if problems:
        for p in problems:
            print(f"invalid scenario: {p}", file=sys.stderr)
        return EXIT_IO
    config = _solver_config(args)
    try:
        result = solvers.solve(scenario, config)
    except solvers.InstanceTooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    report = constraints.audit(scenario, result.assignment)
    if not report.feasible:
        print(f"internal error: solver output failed audit: {report.to_dict()}", file=sys.stderr)
        return EXIT_INFEASIBLE
    model.write_json(model.result_to_dict(result, include_time=args.timing), args.out)
    print(f"solver        {result.solver_name}")
    print(f"objective     {result.objective} / {model.total_task_count(scenario)}")
    print(f"success_rate  {result.success_rate:.6f}")
    print(f"solve_time    {result.solve_time:.4f} s")
    print("utilization")
    print("\n".join(_utilization_lines(scenario, result.usage)))
    return EXIT_OK


def load_assignment(path: str | Path) -> model.Assignment:
    doc = model.read_json(path)
    if isinstance(doc, dict):
        doc = doc.get("assignment", doc.get("decisions"))
    if not isinstance(doc, list):
        raise model.FormatError(f"{path}: no assignment list found")
    return model.assignment_from_list(doc)


def cmd_check(args: argparse.Namespace) -> int:
    scenario = model.load_scenario(args.scenario)
    try:
        assignment = load_assignment(args.assignment)
        report = constraints.audit(scenario, assignment)
    except model.AssignmentError as exc:
        print(f"mismatch: {exc}", file=sys.stderr)
        return EXIT_IO
    print(model.dumps(report.to_dict()), end="")
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def _sweep_spec(args: argparse.Namespace) -> experiment.SweepSpec:
    if args.spec:
        return experiment.SweepSpec.from_dict(model.read_json(args.spec))
    base = _build_params(args, args.ues_per_cell[0])
    return experiment.SweepSpec(
        base_params=base,
        ues_per_cell_values=tuple(args.ues_per_cell),
        seeds=tuple(range(args.seed, args.seed + args.seeds)),
        baseline_fec_capacity=args.baseline_fec_capacity,
        solvers_to_run=tuple(args.solver or ["greedy"]),
        include_matched=args.matched,
    )


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        spec = _sweep_spec(args)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    try:
        result = experiment.run_sweep(spec, workers=args.workers)
    except experiment.SweepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    comment = (
        f"baseline CRAN_FEC_ONLY uses fec_capacity={spec.baseline_fec_capacity!r} "
        f"(generated fec_capacity={spec.base_params.fec_capacity!r})\n"
        f"spec {json.dumps(spec.to_dict(), sort_keys=True)}"
    )
    experiment.emit_table(result, args.out, comment=comment)
    if args.detail:
        model.write_json(result.to_dict(), args.detail)
    print(experiment.curves_text(result))
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nfcran", description="Near/far edge task allocation for C-RAN")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def gen_flags(sp: argparse.ArgumentParser, multi_n: bool) -> None:
        sp.add_argument("--preset", choices=sorted(scenarios.PRESETS), default="paper")
        if multi_n:
            sp.add_argument("--ues-per-cell", type=int, nargs="+", default=list(scenarios.PAPER_UES_PER_CELL))
        else:
            sp.add_argument("--ues-per-cell", type=int, required=True)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--cells", type=int, default=None, help="override cell count")
        sp.add_argument("--log-uniform", action="store_true", help="draw ranged fields on a log scale")
        sp.add_argument(
            "--set", type=_parse_override, action="append", metavar="NAME=VALUE",
            help="override a parameter; ranges as LOW:HIGH",
        )

    g = sub.add_parser("gen", help="generate a scenario file")
    gen_flags(g, multi_n=False)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve a scenario file")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--solver", choices=[k.value for k in solvers.SolverKind], default="greedy")
    s.add_argument("--scoring", choices=[k.value for k in solvers.Scoring], default="min-footprint")
    s.add_argument("--exact-limit", type=int, default=20)
    s.add_argument("--timing", action="store_true", help="store solve_time in the output (breaks byte-identity)")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("check", help="audit an assignment against a scenario")
    c.add_argument("--scenario", required=True)
    c.add_argument("--assignment", required=True)
    c.set_defaults(func=cmd_check)

    w = sub.add_parser("sweep", help="success rate vs load, NFC-RAN vs FEC-only C-RAN")
    gen_flags(w, multi_n=True)
    w.add_argument("--spec", help="SweepSpec JSON; overrides the generation flags")
    w.add_argument("--seeds", type=int, default=20, help="number of seeds, starting at --seed")
    w.add_argument("--solver", action="append", choices=sorted(experiment.SOLVER_MODES))
    w.add_argument("--baseline-fec-capacity", type=float, default=scenarios.PAPER_BASELINE_FEC_CAPACITY)
    w.add_argument("--matched", action="store_true", help="also run the capacity-matched FEC-only baseline")
    w.add_argument("--workers", type=int, default=1)
    w.add_argument("--detail", help="optional JSON with per-seed rates")
    w.add_argument("--out", required=True)
    w.set_defaults(func=cmd_sweep)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, scenarios.InvalidParamsError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, model.FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
