"""
Demos Module
Worked examples of cohesive group agency, each re-derived with the solver.

    piano         three agents lift a piano: every one helps the other two
    peanuts       Charlie and Lucy fail to kick the ball together
    monotonicity  group agency neither transfers to supergroups nor to subgroups

The formulas are written in the concrete syntax so a drifting expansion
rule makes a demo fail loudly.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

from .formula import render
from .networks import ALL_HELP_REST, C0, parse_class_spec
from .parser import parse
from .reduction import expand_with_stats
from .solver import Decision, equivalent, valid

logger = logging.getLogger(__name__)

PIANO_GOAL = "E{1,2,3} p"
PIANO_ASSISTS = "H{1}>{2,3} p & H{2}>{1,3} p & H{3}>{1,2} p"
PIANO_DISPLAYED = (
    "E{1} (A{2} p & A{3} p -> p) & E{2} (A{1} p & A{3} p -> p) & "
    "E{3} (A{1} p & A{2} p -> p) & A{1} p & A{2} p & A{3} p"
)

PEANUTS_CLAIM = "~E{Charlie,Lucy} k <-> (~H{Charlie}>{Lucy} k & ~H{Lucy}>{Charlie} k)"
PEANUTS_GROUP = "E{Charlie,Lucy} k"

MONOTONICITY_CLASS = "c0+singleton-benefactors+disjoint-endpoints"
MONOTONICITY_CLAIMS = (
    ("E{1,2} p -> E{1,2,3} p", False, "agency of {1,2} does not transfer to {1,2,3}"),
    ("E{1,2,3} p -> E{1,2} p", False, "agency of {1,2,3} does not transfer to {1,2}"),
    ("E{1,2} p -> p", True, "group agency is successful"),
)


@dataclass
class DemoCheck:
    description: str
    expected: bool
    actual: bool

    @property
    def passed(self) -> bool:
        return self.expected == self.actual


@dataclass
class DemoReport:
    """Formulas shown by a demo and the solver-verified claims about them."""

    name: str
    title: str
    shown: List[Tuple[str, str]] = field(default_factory=list)
    checks: List[DemoCheck] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> Dict:
        return {
            "demo": self.name,
            "title": self.title,
            "shown": [{"label": label, "formula": text} for label, text in self.shown],
            "checks": [
                {"claim": c.description, "expected": c.expected, "actual": c.actual, "passed": c.passed}
                for c in self.checks
            ],
            "passed": self.passed,
            "elapsed": round(self.elapsed, 6),
        }


def piano(decision: Decision = Decision()) -> DemoReport:
    report = DemoReport("piano", "Lifting a piano: the only admissible network is all-help-rest")
    goal = parse(PIANO_GOAL)
    expanded, _ = expand_with_stats(goal, ALL_HELP_REST, decision.budget, decision.options)
    report.shown = [
        ("group agency", PIANO_GOAL),
        ("as assistance", PIANO_ASSISTS),
        ("as individual agency", PIANO_DISPLAYED),
        ("expansion", render(expanded)),
    ]
    report.checks = [
        DemoCheck(f"{PIANO_GOAL} <-> {PIANO_ASSISTS}", True,
                  equivalent(goal, parse(PIANO_ASSISTS), ALL_HELP_REST, decision)),
        DemoCheck(f"{PIANO_GOAL} <-> {PIANO_DISPLAYED}", True,
                  equivalent(goal, parse(PIANO_DISPLAYED), ALL_HELP_REST, decision)),
    ]
    return report


def peanuts(decision: Decision = Decision()) -> DemoReport:
    report = DemoReport("peanuts", "Charlie and Lucy: no cohesive kick without assistance either way")
    expanded, _ = expand_with_stats(parse(PEANUTS_GROUP), C0, decision.budget, decision.options)
    report.shown = [
        ("claim", PEANUTS_CLAIM),
        (f"{PEANUTS_GROUP} under c0", render(expanded)),
    ]
    report.checks = [
        DemoCheck(f"valid under c0: {PEANUTS_CLAIM}", True,
                  valid(parse(PEANUTS_CLAIM), C0, decision)),
    ]
    return report


def monotonicity(decision: Decision = Decision()) -> DemoReport:
    report = DemoReport("monotonicity", f"Group agency is not monotone under {MONOTONICITY_CLASS}")
    cls = parse_class_spec(MONOTONICITY_CLASS)
    # c0-based classes are edge-monotone, so the minimal expansion is exact
    minimal = Decision(decision.budget, decision.options, True, decision.timeout)
    for text, expected, meaning in MONOTONICITY_CLAIMS:
        report.shown.append((meaning, text))
        report.checks.append(DemoCheck(f"valid: {text}", expected, valid(parse(text), cls, minimal)))
    return report


DEMOS: Dict[str, Callable[[Decision], DemoReport]] = {
    "piano": piano,
    "peanuts": peanuts,
    "monotonicity": monotonicity,
}


def run_demo(name: str, decision: Decision = Decision()) -> DemoReport:
    """
    Run one demo by name.

    Raises:
        KeyError: For an unknown demo name
    """
    started = time.monotonic()
    report = DEMOS[name](decision)
    report.elapsed = time.monotonic() - started
    logger.info("demo %s: %s in %.3fs", name, "passed" if report.passed else "FAILED", report.elapsed)
    return report
