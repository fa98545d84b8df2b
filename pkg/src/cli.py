"""
Command-line front end.

Exit codes: 0 success or a true/satisfiable answer, 1 a false/unsatisfiable
answer (or a failed demo), 2 usage and input errors, 3 budget, bound or
timeout aborts.
"""

import argparse
import json
import logging
import sys
import time
from itertools import islice
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .config import Settings, load_settings
from .demos import DEMOS, run_demo
from .errors import (
    BoundExceededError,
    CohesionError,
    ExpansionBudgetError,
    SolverTimeoutError,
)
from .formula import (
    Assists,
    Atom,
    Attempts,
    Bottom,
    Brings,
    Formula,
    Top,
    render,
)
from .models import model_check, validate
from .networks import (
    CohesionNetwork,
    format_coalition,
    may_rely,
    members,
    minimal_members,
    must_rely,
)
from .parser import parse, parse_group
from .reduction import expand_with_stats, is_biat
from .solver import Decision, countermodel, satisfiable
from .storage import ResultStorage, load_model_with_world, model_to_dict, resolve_class, save_model

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_ABORTED = 0, 1, 2, 3

DEFAULT_LISTING_LIMIT = 50


# Output helpers -------------------------------------------------------------

def _emit(args, payload: Dict, lines: List[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("\n".join(lines))


def _tree_lines(f: Formula, depth: int = 0) -> List[str]:
    pad = "  " * depth
    if isinstance(f, (Top, Bottom, Atom)):
        return [pad + render(f)]
    if isinstance(f, Brings):
        head = f"E{f.group}"
    elif isinstance(f, Attempts):
        head = f"A{f.group}"
    elif isinstance(f, Assists):
        head = f"H{f.benefactor}>{f.beneficiary}"
    else:
        head = type(f).__name__
    lines = [pad + head]
    for child in f.children():
        lines.extend(_tree_lines(child, depth + 1))
    return lines


def _tree_dict(f: Formula) -> Dict:
    node: Dict = {"kind": type(f).__name__}
    if isinstance(f, Atom):
        node["name"] = f.name
    if isinstance(f, (Brings, Attempts)):
        node["group"] = f.group.sorted_members()
    if isinstance(f, Assists):
        node["benefactor"] = f.benefactor.sorted_members()
        node["beneficiary"] = f.beneficiary.sorted_members()
    children = list(f.children())
    if children:
        node["children"] = [_tree_dict(c) for c in children]
    return node


def _network_dict(net: CohesionNetwork) -> Dict:
    return {
        "edges": [[format_coalition(a), format_coalition(b)] for a, b in net.sorted_edges()],
        "vertices": [format_coalition(v) for v in net.sorted_vertices()],
    }


# Shared setup ---------------------------------------------------------------

def _read_formula(args) -> Formula:
    if args.formula_file:
        text = Path(args.formula_file).read_text(encoding="utf-8").strip()
    elif args.formula is not None:
        text = args.formula
    else:
        raise _UsageError("a formula is required (positional text or --formula-file)")
    return parse(text)


class _UsageError(Exception):
    pass


def _decision(args, settings: Settings) -> Decision:
    return Decision(
        budget=settings.expansion_budget(),
        options=settings.enumeration_options(getattr(args, "literal_gamma", False)),
        minimal=getattr(args, "minimal", False),
        timeout=settings.timeout_secs,
    )


def _record(args, settings: Settings, verdict: str, elapsed: float, formula: str = "") -> None:
    if not args.record:
        return
    ResultStorage(settings.results_dir).save_result({
        "command": args.command,
        "formula": formula,
        "class": getattr(args, "cls", ""),
        "verdict": verdict,
        "elapsed": round(elapsed, 6),
    })


# Subcommands ----------------------------------------------------------------

def cmd_parse(args, settings: Settings) -> int:
    f = _read_formula(args)
    _emit(args, {"formula": render(f), "tree": _tree_dict(f)}, [render(f)] + _tree_lines(f))
    return EXIT_OK


def cmd_networks(args, settings: Settings) -> int:
    group = parse_group(args.agents)
    cls = resolve_class(args.cls, settings.allow_self_edges)
    options = settings.enumeration_options(args.literal_gamma)

    if args.minimal:
        listed = minimal_members(cls, group, options)
        complete = True
    else:
        listed = list(islice(members(cls, group, options), args.limit + 1))
        complete = len(listed) <= args.limit
        listed = listed[:args.limit]

    label = "minimal members" if args.minimal else "networks"
    if complete:
        summary = f"{cls} for {group}: {len(listed)} {label}"
    else:
        summary = f"{cls} for {group}: more than {args.limit} {label} (showing the first {args.limit})"
    lines = [summary] + [f"  {i}. {net}" for i, net in enumerate(listed, 1)]
    payload: Dict = {
        "class": str(cls),
        "group": group.sorted_members(),
        "minimal": args.minimal,
        "count": len(listed),
        "complete": complete,
        "networks": [_network_dict(n) for n in listed],
    }

    if args.reliance:
        may = may_rely(cls, group, options)
        must = must_rely(cls, group, options)
        lines.append("may rely on: " + ", ".join(
            f"{format_coalition(a)}->{format_coalition(b)}" for a, b in may))
        lines.append("must rely on: " + ", ".join(must))
        payload["may_rely"] = [[format_coalition(a), format_coalition(b)] for a, b in may]
        payload["must_rely"] = must

    _emit(args, payload, lines)
    return EXIT_OK


def cmd_expand(args, settings: Settings) -> int:
    f = _read_formula(args)
    cls = resolve_class(args.cls, settings.allow_self_edges)
    decision = _decision(args, settings)
    started = time.monotonic()
    result, stats = expand_with_stats(f, cls, decision.budget, decision.options, decision.minimal)
    _record(args, settings, "expanded", time.monotonic() - started, render(f))

    disjuncts = ", ".join(f"E{g}: {n}" for g, n in sorted(stats.disjuncts.items()))
    lines = [render(result), f"size: {stats.output_nodes} nodes"]
    if disjuncts:
        lines.append(f"disjuncts: {disjuncts}")
    _emit(args, {
        "formula": render(f),
        "class": str(cls),
        "expansion": render(result),
        "output_nodes": stats.output_nodes,
        "disjuncts": stats.disjuncts,
    }, lines)
    return EXIT_OK


def cmd_sat(args, settings: Settings) -> int:
    f = _read_formula(args)
    cls = resolve_class(args.cls, settings.allow_self_edges)
    started = time.monotonic()
    result = satisfiable(f, cls, _decision(args, settings))
    verdict = result.verdict.value
    _record(args, settings, verdict, time.monotonic() - started, render(f))

    lines = [verdict]
    payload: Dict = {"formula": render(f), "class": str(cls), "verdict": verdict, "stats": result.stats}
    if result.satisfiable:
        lines.append(f"witness: {len(result.model.worlds)} worlds, holds at {result.world}")
        payload["witness"] = model_to_dict(result.model, result.world)
        if args.witness:
            save_model(result.model, args.witness, result.world)
            lines.append(f"witness written to {args.witness}")
    _emit(args, payload, lines)
    return EXIT_OK if result.satisfiable else EXIT_FALSE


def cmd_valid(args, settings: Settings) -> int:
    f = _read_formula(args)
    cls = resolve_class(args.cls, settings.allow_self_edges)
    started = time.monotonic()
    found = countermodel(f, cls, _decision(args, settings))
    verdict = "valid" if found is None else "invalid"
    _record(args, settings, verdict, time.monotonic() - started, render(f))

    lines = [verdict]
    payload: Dict = {"formula": render(f), "class": str(cls), "verdict": verdict}
    if found is not None:
        model, world = found
        lines.append(f"countermodel: {len(model.worlds)} worlds, fails at {world}")
        payload["countermodel"] = model_to_dict(model, world)
        if args.countermodel:
            save_model(model, args.countermodel, world)
            lines.append(f"countermodel written to {args.countermodel}")
    _emit(args, payload, lines)
    return EXIT_OK if found is None else EXIT_FALSE


def cmd_check(args, settings: Settings) -> int:
    f = _read_formula(args)
    model, designated = load_model_with_world(args.model)
    world = args.world or designated
    if world is None:
        raise _UsageError("no --world given and the model file names no designated world")

    problems = validate(model)
    if problems:
        raise _UsageError("model violates frame conditions: " + "; ".join(str(p) for p in problems))

    checked = f
    if not is_biat(f):
        cls = resolve_class(args.cls, settings.allow_self_edges)
        decision = _decision(args, settings)
        checked, _ = expand_with_stats(f, cls, decision.budget, decision.options, decision.minimal)

    started = time.monotonic()
    holds = model_check(model, world, checked)
    verdict = "true" if holds else "false"
    _record(args, settings, verdict, time.monotonic() - started, render(f))
    _emit(args, {"formula": render(f), "world": world, "verdict": verdict}, [verdict])
    return EXIT_OK if holds else EXIT_FALSE


def cmd_demo(args, settings: Settings) -> int:
    report = run_demo(args.name, _decision(args, settings))
    verdict = "passed" if report.passed else "failed"
    _record(args, settings, verdict, report.elapsed)

    lines = [report.title]
    lines += [f"  {label}: {text}" for label, text in report.shown]
    for check in report.checks:
        status = "ok" if check.passed else "FAILED"
        lines.append(f"  [{status}] {check.description} (solver says {str(check.actual).lower()})")
    lines.append(f"{verdict} ({report.elapsed:.2f}s, solver-verified)")
    _emit(args, report.to_dict(), lines)
    return EXIT_OK if report.passed else EXIT_FALSE


def cmd_stats(args, settings: Settings) -> int:
    storage = ResultStorage(settings.results_dir)
    if args.clear:
        storage.clear_results()
    stats = storage.get_statistics()
    lines = [
        f"runs: {stats['total_runs']}",
        f"average elapsed: {stats['average_elapsed']:.3f}s",
    ]
    lines += [f"  {cmd}: {n}" for cmd, n in sorted(stats["command_counts"].items())]
    lines += [f"  {v}: {n}" for v, n in sorted(stats["verdict_counts"].items())]
    _emit(args, stats, lines)
    return EXIT_OK


# Argument parsing -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="structured output")
    common.add_argument("--record", action="store_true", help="append the verdict to the results log")
    common.add_argument("--timeout", type=float, help="solver timeout in seconds")
    common.add_argument("--bound", type=int, help="largest group size to enumerate")
    common.add_argument("--allow-self-edges", action="store_true", default=None,
                        help="admit edges from a coalition to itself")
    common.add_argument("-v", "--verbose", action="count", default=0,
                        help="log progress to stderr (-vv for debug)")

    def formula_args(p: argparse.ArgumentParser) -> None:
        source = p.add_mutually_exclusive_group()
        source.add_argument("formula", nargs="?", help="formula text, e.g. \"E{1,2} p -> p\"")
        source.add_argument("--formula-file", help="read the formula from a file")

    def class_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--class", dest="cls", default="c0",
                       help="class spec (c0, all-help-rest, c0+max-edges:2) or a class file")
        p.add_argument("--minimal", action="store_true",
                       help="range group agency over minimal networks only")
        p.add_argument("--literal-gamma", action="store_true",
                       help="enumerate every admissible vertex set, not only edge endpoints")

    parser = argparse.ArgumentParser(
        prog="cohesion",
        description="Cohesive group agency: networks, reduction and decision procedures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="parse and echo a formula tree")
    formula_args(p)

    p = sub.add_parser("networks", parents=[common], help="list the networks of a class")
    p.add_argument("--agents", required=True, help="comma-separated agents, e.g. 1,2,3")
    class_args(p)
    p.add_argument("--reliance", action="store_true", help="show may-rely edges and must-rely agents")
    p.add_argument("--limit", type=int, default=DEFAULT_LISTING_LIMIT,
                   help="list at most this many networks")

    p = sub.add_parser("expand", parents=[common], help="reduce group modalities")
    formula_args(p)
    class_args(p)

    p = sub.add_parser("sat", parents=[common], help="decide satisfiability")
    formula_args(p)
    class_args(p)
    p.add_argument("--witness", help="write the witness model to this file")

    p = sub.add_parser("valid", parents=[common], help="decide validity")
    formula_args(p)
    class_args(p)
    p.add_argument("--countermodel", help="write the countermodel to this file")

    p = sub.add_parser("check", parents=[common], help="model-check a formula")
    formula_args(p)
    class_args(p)
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("--world", help="world id (defaults to the file's designated world)")

    p = sub.add_parser("demo", parents=[common], help="run a worked example")
    p.add_argument("name", choices=sorted(DEMOS))

    p = sub.add_parser("stats", parents=[common], help="summarise the results log")
    p.add_argument("--clear", action="store_true", help="empty the results log first")

    return parser


COMMANDS = {
    "parse": cmd_parse,
    "networks": cmd_networks,
    "expand": cmd_expand,
    "sat": cmd_sat,
    "valid": cmd_valid,
    "check": cmd_check,
    "demo": cmd_demo,
    "stats": cmd_stats,
}


def _configure_logging(verbosity: int, settings: Settings) -> None:
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, settings.log_level.upper(), logging.WARNING)
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one command.

    Args:
        argv: Arguments without the program name (sys.argv[1:] when None)

    Returns:
        Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    if args.timeout is not None and args.timeout <= 0:
        print("[cli] --timeout must be positive", file=sys.stderr)
        return EXIT_USAGE
    if args.bound is not None and args.bound < 2:
        print("[cli] --bound must be at least 2", file=sys.stderr)
        return EXIT_USAGE

    try:
        settings = load_settings().with_overrides(
            timeout_secs=args.timeout,
            enumeration_bound=args.bound,
            allow_self_edges=args.allow_self_edges,
        )
    except CohesionError as e:
        print(e.tagged(), file=sys.stderr)
        return EXIT_USAGE

    _configure_logging(args.verbose, settings)
    logger.debug("running %s with %s", args.command, settings)

    try:
        return COMMANDS[args.command](args, settings)
    except (ExpansionBudgetError, SolverTimeoutError, BoundExceededError) as e:
        print(e.tagged(), file=sys.stderr)
        return EXIT_ABORTED
    except CohesionError as e:
        print(e.tagged(), file=sys.stderr)
        return EXIT_USAGE
    except RecursionError:
        logger.warning("recursion limit reached in %s", args.command)
        print("[cli] formula is nested too deeply", file=sys.stderr)
        return EXIT_ABORTED
    except _UsageError as e:
        print(f"[cli] {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"[cli] {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
