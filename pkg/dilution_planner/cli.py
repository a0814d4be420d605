# dilution_planner/cli.py
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import pandas as pd
from rich.console import Console
from rich.markup import escape
from tqdm import tqdm

from .config import DEFAULT_PRECISION, DEFAULT_SEED
from .errors import DilutionError, PlanFormatError
from .execute import check_conservation, execute
from .models import Plan
from .plan.oracle import OPTIMAL, UNKNOWN, min_cost_plan
from .plan.orchestrator import (
    compare_series,
    dominance_failures,
    max_peak_ratio,
    reduction_vs,
    run_algorithm,
)
from .plan.policy import OBJECTIVES, ORDERS, PlannerConfig, SearchCaps
from .report.dot import plan_to_dot
from .report.tables import comparison_frame, frame_to_csv, frame_to_rich, frame_to_text, reduction_lines
from .series import FAMILIES, SeriesSpec, family_corpus, generate
from .storage.plan_files import load_reference, load_series_fixtures, plan_to_document, read_plan, trace_to_document
from .utils import parse_targets_arg, render_series, write_text_atomic
from .utils_debug import dbg, set_debug

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_BUDGET = 3

console = Console()
err_console = Console(stderr=True)


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1; 2 is reserved for failed validation."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common_flags() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    p.add_argument("--precision", type=int, default=None, help="Quantize decimal CFs to k/2^d")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Seed for generated corpora")
    p.add_argument("--output", default="", help="Write the result here instead of stdout")
    p.add_argument("--format", choices=("json", "csv", "text"), default=None, help="Output format")
    p.add_argument("--debug", action="store_true", help="Debug log to stderr (or DILUTION_DEBUG_LOG)")
    return p


def _caps_flags(p: argparse.ArgumentParser) -> None:
    defaults = SearchCaps()
    p.add_argument("--max-steps", type=int, default=defaults.max_steps)
    p.add_argument("--max-droplets", type=int, default=defaults.max_droplets)
    p.add_argument("--max-precision", type=int, default=defaults.max_precision)
    p.add_argument("--budget", type=float, default=defaults.time_budget_s, help="Oracle time budget in seconds")
    p.add_argument("--no-prune", action="store_true", help="Disable the oracle's lower-bound pruning")


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    p = _Parser(prog="dilution_planner", description="Plan, check and compare droplet dilution series.")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("plan", parents=[common], help="Plan a target series")
    sp.add_argument("--targets", required=True, help='CF list ("5/16,11/16") or a file holding one')
    sp.add_argument("--algorithm", choices=("emdp", "twowaymix", "naive"), default="emdp")
    sp.add_argument("--order", choices=ORDERS, default="best", help="EMDP target order")
    sp.add_argument("--reorder", action="store_true", help="Same as --order descending")
    sp.add_argument("--capacity", type=int, default=None, help="EMDP storage capacity (default unbounded)")

    sp = sub.add_parser("compare", parents=[common], help="Compare planners over series")
    sp.add_argument("--series", default="", help="Shipped series names, comma separated (default ts1,ts2,ts3)")
    sp.add_argument("--family", choices=[f for f in FAMILIES if f != "explicit"], default=None)
    sp.add_argument("--n", type=int, default=8, help="Targets per generated series")
    sp.add_argument("--count", type=int, default=10, help="Series in a generated corpus")
    sp.add_argument("--with-oracle", action="store_true", help="Add an oracle row per series")
    sp.add_argument("--ui", action="store_true", help="Open the comparison viewer")
    _caps_flags(sp)

    sp = sub.add_parser("oracle", parents=[common], help="Minimum-cost plan by exhaustive search")
    sp.add_argument("--targets", required=True)
    sp.add_argument("--objective", choices=OBJECTIVES, default="samples")
    _caps_flags(sp)

    sp = sub.add_parser("validate", parents=[common], help="Replay a plan file and check it")
    sp.add_argument("--plan", required=True, help="Plan JSON file")

    sp = sub.add_parser("gen-series", parents=[common], help="Generate a target series")
    sp.add_argument("--family", choices=FAMILIES, required=True)
    sp.add_argument("--n", type=int, default=0)
    sp.add_argument("--a", type=Fraction, default=Fraction(0))
    sp.add_argument("--delta", type=Fraction, default=Fraction(0))
    sp.add_argument("--ratio", type=Fraction, default=Fraction(1))
    sp.add_argument("--b", type=Fraction, default=Fraction(0))
    sp.add_argument("--values", default="", help="Explicit family: comma separated values")

    sp = sub.add_parser("export-dot", parents=[common], help="Graphviz text for a plan file")
    sp.add_argument("--plan", required=True, help="Plan JSON file")

    return p


# -----------------------------
# Output
# -----------------------------

def _emit(args: argparse.Namespace, text: str) -> None:
    if args.output:
        write_text_atomic(Path(args.output).expanduser(), text)
        dbg("cli.write", path=args.output, chars=len(text))
        return
    sys.stdout.write(text)
    sys.stdout.flush()


def _plan_text(plan: Plan) -> str:
    grid = max((t.prec for t in plan.targets), default=0)
    lines = [f"targets: {', '.join(render_series(plan.targets))}"]
    for s in plan.steps:
        out = s.out_cf.over(max(grid, s.out_cf.prec))
        disps = " / ".join(str(d) for d in s.dispositions)
        lines.append(f"{s.id:>3}  {s.input_a.ref:>7} + {s.input_b.ref:<7} -> {out:<7} {disps}")
    for index, src in plan.direct_dispenses:
        lines.append(f"  -  {src.ref:>7} -> target[{index}]")
    return "\n".join(lines) + "\n"


def _plan_csv(plan: Plan) -> str:
    df = pd.DataFrame.from_records(
        [
            {
                "step": s.id,
                "input_a": s.input_a.ref,
                "input_b": s.input_b.ref,
                "out": str(s.out_cf),
                "disposition_a": str(s.disposition_a),
                "disposition_b": str(s.disposition_b),
            }
            for s in plan.steps
        ],
        columns=["step", "input_a", "input_b", "out", "disposition_a", "disposition_b"],
    )
    return df.to_csv(index=False, lineterminator="\n")


def _emit_plan(args: argparse.Namespace, plan: Plan) -> int:
    """Write the plan in the chosen format and print its stats line."""
    trace = execute(plan)
    fmt = args.format or "json"
    if fmt == "json":
        text = json.dumps(plan_to_document(plan, stats=trace.stats), indent=2) + "\n"
    elif fmt == "csv":
        text = _plan_csv(plan)
    else:
        text = _plan_text(plan)
    _emit(args, text)

    # stats line must not end up inside JSON on stdout
    out = err_console if (fmt == "json" and not args.output) else console
    out.print(trace.stats.summary(), highlight=False)

    if not trace.ok:
        for v in trace.violations:
            err_console.print(f"[red]{escape(str(v))}[/red]")
        return EXIT_INVALID
    return EXIT_OK


def _caps(args: argparse.Namespace) -> SearchCaps:
    return SearchCaps(
        max_steps=args.max_steps,
        max_droplets=args.max_droplets,
        max_precision=args.max_precision,
        time_budget_s=args.budget,
        prune=not args.no_prune,
    )


# -----------------------------
# Commands
# -----------------------------

def cmd_plan(args: argparse.Namespace) -> int:
    targets = parse_targets_arg(args.targets, precision=args.precision)
    config = PlannerConfig(order="descending" if args.reorder else args.order, storage_capacity=args.capacity)
    dbg("cli.plan", algorithm=args.algorithm, order=config.order, n=len(targets))
    _, plan = run_algorithm(args.algorithm, targets, config=config)
    assert plan is not None
    return _emit_plan(args, plan)


def cmd_oracle(args: argparse.Namespace) -> int:
    targets = parse_targets_arg(args.targets, precision=args.precision)
    result = min_cost_plan(targets, _caps(args), args.objective)
    dbg("cli.oracle", status=result.status, expanded=result.expanded)

    if result.status == UNKNOWN:
        err_console.print(f"[yellow]unknown[/yellow]: time budget of {args.budget}s exhausted after {result.expanded} states")
        return EXIT_BUDGET
    if result.status != OPTIMAL or result.plan is None:
        err_console.print("[red]none[/red]: no plan fits the search caps")
        return EXIT_INVALID
    return _emit_plan(args, result.plan)


def cmd_validate(args: argparse.Namespace) -> int:
    plan = read_plan(Path(args.plan).expanduser())
    trace = execute(plan)
    verdict = check_conservation(trace)

    as_json = args.format == "json" or (args.output and args.format is None)
    if as_json:
        _emit(args, json.dumps(trace_to_document(trace, verdict), indent=2) + "\n")

    # verdict must not end up inside JSON on stdout
    out = err_console if (as_json and not args.output) else console
    out.print(trace.stats.summary(), highlight=False)
    for v in trace.violations:
        out.print(f"[red]{escape(str(v))}[/red]")
    if trace.ok and not verdict.ok:
        out.print(f"[red]conservation: {escape(verdict.message)}[/red]")

    if trace.ok and verdict.ok:
        out.print("[green]valid[/green]")
        return EXIT_OK
    out.print("[red]invalid[/red]")
    return EXIT_INVALID


def cmd_export_dot(args: argparse.Namespace) -> int:
    plan = read_plan(Path(args.plan).expanduser())
    trace = execute(plan)
    if not trace.ok:
        for v in trace.violations:
            err_console.print(f"[red]{escape(str(v))}[/red]")
        return EXIT_INVALID
    _emit(args, plan_to_dot(plan, name=Path(args.plan).stem))
    return EXIT_OK


def cmd_gen_series(args: argparse.Namespace) -> int:
    precision = DEFAULT_PRECISION if args.precision is None else args.precision
    values = tuple(v.strip() for v in args.values.split(",") if v.strip())
    spec = SeriesSpec(
        args.family,
        args.n,
        precision,
        a=args.a,
        delta=args.delta,
        ratio=args.ratio,
        b=args.b,
        values=values,
    )
    series = generate(spec)
    rendered = render_series(series)

    fmt = args.format or "json"
    if fmt == "json":
        text = json.dumps(rendered) + "\n"
    elif fmt == "csv":
        text = pd.DataFrame({"index": range(1, len(rendered) + 1), "cf": rendered}).to_csv(index=False, lineterminator="\n")
    else:
        text = ",".join(rendered) + "\n"
    _emit(args, text)
    return EXIT_OK


def _named_series(args: argparse.Namespace) -> tuple[list[tuple[str, list]], bool]:
    """Series to compare, and whether they are the shipped (published) ones."""
    if args.family:
        precision = DEFAULT_PRECISION if args.precision is None else args.precision
        corpus = family_corpus(args.family, n=args.n, precision=precision, seed=args.seed, count=args.count)
        return [(f"{args.family}-{i}", s) for i, s in enumerate(corpus, start=1)], False

    fixtures = load_series_fixtures()
    names = [n.strip().lower() for n in (args.series or "ts1,ts2,ts3").split(",") if n.strip()]
    missing = [n for n in names if n not in fixtures]
    if missing:
        raise ValueError(f"unknown series {', '.join(missing)}; shipped: {', '.join(sorted(fixtures))}")
    return [(n, fixtures[n]) for n in names], True


def cmd_compare(args: argparse.Namespace) -> int:
    named, shipped = _named_series(args)
    algorithms = ["emdp", "naive"] + (["oracle"] if args.with_oracle else [])
    caps = _caps(args)

    if args.ui:
        from .ui.app import ComparisonApp

        ComparisonApp(named, algorithms=algorithms, caps=caps).run()
        return EXIT_OK

    total = len(named) * len(algorithms)
    with tqdm(total=total, desc="compare", unit="plan", disable=total < 2 or not sys.stderr.isatty()) as bar:

        def progress_cb(i: int, n: int, msg: str) -> None:
            bar.set_postfix_str(msg)
            bar.update(1)

        rows = compare_series(named, algorithms=algorithms, caps=caps, progress_cb=progress_cb)

    reference = load_reference() if shipped else None
    df = comparison_frame(rows, reference=reference)

    fmt = args.format or "text"
    if fmt == "csv":
        _emit(args, frame_to_csv(df))
    elif fmt == "json":
        _emit(args, df.to_json(orient="records", indent=2) + "\n")
    elif args.output:
        _emit(args, frame_to_text(df))
    else:
        console.print(frame_to_rich(df, title="Dilution plans"))

    notes = reduction_lines(reduction_vs(rows))
    peak = max_peak_ratio(rows)
    if peak is not None:
        notes.append(f"max peak storage / n (emdp): {peak:.2f}")
    for name in dominance_failures(rows):
        notes.append(f"[yellow]emdp uses more samples than naive on {name}[/yellow]")
    if reference is not None:
        notes.append("[dim](published) columns are quoted figures, not recomputed[/dim]")

    notes_console = err_console if (fmt != "text" and not args.output) else console
    for line in notes:
        notes_console.print(line)

    return EXIT_INVALID if any(r.status == "invalid" for r in rows) else EXIT_OK


COMMANDS = {
    "plan": cmd_plan,
    "compare": cmd_compare,
    "oracle": cmd_oracle,
    "validate": cmd_validate,
    "gen-series": cmd_gen_series,
    "export-dot": cmd_export_dot,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.debug:
        set_debug(True)
    dbg("cli.start", command=args.command)

    try:
        return COMMANDS[args.command](args)
    except PlanFormatError as e:
        err_console.print(f"[red]invalid plan file[/red]: {escape(str(e))}")
        return EXIT_INVALID
    except (DilutionError, ValueError, OSError) as e:
        err_console.print(f"[red]error[/red]: {escape(str(e))}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
