"""
Reduction Module
Translation of group modalities into the individual-agent fragment.

    H{C1}>{C2} phi  ~>  E{C1} (A{C2} phi -> phi) & A{C2} phi
    E{G} phi        ~>  OR over networks of the class for G of
                        AND over edges (C1, C2) of H{C1}>{C2} phi
    A{G} phi        ~>  AND over i in G of A{i} phi

applied recursively and homomorphically on every other constructor.
Recursion terminates because network endpoints are strict subgroups of
the carrier.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .errors import ExpansionBudgetError
from .formula import (
    And,
    Assists,
    Atom,
    Attempts,
    Bottom,
    Brings,
    Formula,
    Group,
    Iff,
    Implies,
    Not,
    Or,
    Top,
    conjunction,
    disjunction,
    render,
    subformulas,
)
from .networks import (
    EnumerationOptions,
    NetworkClass,
    members,
    minimal_members,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExpansionBudget:
    """Limits that abort an expansion instead of letting it explode."""

    max_output_nodes: int = 1_000_000
    max_disjuncts_per_group: int = 10_000

    def __post_init__(self):
        if self.max_output_nodes <= 0 or self.max_disjuncts_per_group <= 0:
            raise ValueError("expansion budget values must be positive")


@dataclass
class ExpansionStats:
    """Measurements of one expansion."""

    output_nodes: int = 0
    disjuncts: Dict[str, int] = field(default_factory=dict)
    networks_seen: int = 0


def is_biat(f: Formula) -> bool:
    """True iff f has no assistance node and every modal group is a singleton."""
    for g in subformulas(f):
        if isinstance(g, Assists):
            return False
        if isinstance(g, (Brings, Attempts)) and not g.group.is_degenerate:
            return False
    return True


def _flatten_conjuncts(f: Formula, out: List[Formula]) -> None:
    if isinstance(f, And):
        _flatten_conjuncts(f.left, out)
        _flatten_conjuncts(f.right, out)
    else:
        out.append(f)


def canonical_conjunction(parts: List[Formula]) -> Formula:
    """Conjunction of the flattened, deduplicated parts sorted by their text."""
    leaves: List[Formula] = []
    for part in parts:
        _flatten_conjuncts(part, leaves)
    unique = {render(leaf): leaf for leaf in leaves}
    return conjunction(unique[text] for text in sorted(unique))


class _Expander:
    """One expansion run: memo table, size accounting and budget checks."""

    def __init__(self, cls: NetworkClass, budget: ExpansionBudget,
                 options: EnumerationOptions, minimal: bool):
        self.cls = cls
        self.budget = budget
        self.options = options
        self.minimal = minimal
        self.memo: Dict[Formula, Formula] = {}
        self.sizes: Dict[Formula, int] = {}
        self.stats = ExpansionStats()

    def size_of(self, f: Formula) -> int:
        sizes = self.sizes
        stack = [f]
        while stack:
            g = stack[-1]
            if g in sizes:
                stack.pop()
                continue
            pending = [c for c in g.children() if c not in sizes]
            if pending:
                stack.extend(pending)
            else:
                sizes[g] = 1 + sum(sizes[c] for c in g.children())
                stack.pop()
        return sizes[f]

    def _check(self, f: Formula) -> Formula:
        nodes = self.size_of(f)
        if nodes > self.budget.max_output_nodes:
            logger.warning("expansion aborted at %d nodes", nodes)
            raise ExpansionBudgetError("output size", nodes, self.budget.max_output_nodes)
        return f

    def expand(self, f: Formula) -> Formula:
        cached = self.memo.get(f)
        if cached is not None:
            return cached
        result = self._check(self._expand(f))
        self.memo[f] = result
        return result

    def _expand(self, f: Formula) -> Formula:
        if isinstance(f, (Top, Bottom, Atom)):
            return f
        if isinstance(f, Not):
            return Not(self.expand(f.body))
        if isinstance(f, (And, Or, Implies, Iff)):
            return type(f)(self.expand(f.left), self.expand(f.right))
        if isinstance(f, Assists):
            return self.expand_assists(f.benefactor, f.beneficiary, f.body)
        if isinstance(f, Brings):
            if f.group.is_degenerate:
                return Brings(f.group, self.expand(f.body))
            return self.expand_group_agency(f.group, f.body)
        if isinstance(f, Attempts):
            if f.group.is_degenerate:
                return Attempts(f.group, self.expand(f.body))
            return self.expand_group_attempt(f.group, f.body)
        raise TypeError(f"not a formula: {f!r}")

    def expand_assists(self, benefactor: Group, beneficiary: Group, body: Formula) -> Formula:
        attempt = Attempts(beneficiary, body)
        return self.expand(And(Brings(benefactor, Implies(attempt, body)), attempt))

    def expand_group_attempt(self, group: Group, body: Formula) -> Formula:
        # the single rule site for group attempts: every member tries
        inner = self.expand(body)
        return conjunction(Attempts(Group([i]), inner) for i in group)

    def expand_group_agency(self, group: Group, body: Formula) -> Formula:
        if self.minimal:
            networks = iter(minimal_members(self.cls, group, self.options))
        else:
            networks = members(self.cls, group, self.options)

        disjuncts: List[Formula] = []
        seen = set()
        running = 0
        for net in networks:
            self.stats.networks_seen += 1
            conj = canonical_conjunction([
                self.expand(Assists(Group(a), Group(b), body))
                for a, b in net.sorted_edges()
            ])
            if conj in seen:
                continue
            seen.add(conj)
            disjuncts.append(conj)
            if len(disjuncts) > self.budget.max_disjuncts_per_group:
                logger.warning("expansion of E%s aborted at %d disjuncts", group, len(disjuncts))
                raise ExpansionBudgetError(
                    f"disjuncts for E{group}", len(disjuncts), self.budget.max_disjuncts_per_group
                )
            running += self.size_of(conj) + 1
            if running > self.budget.max_output_nodes:
                logger.warning("expansion of E%s aborted at %d nodes", group, running)
                raise ExpansionBudgetError("output size", running, self.budget.max_output_nodes)

        self.stats.disjuncts[str(group)] = len(disjuncts)
        logger.debug("E%s expanded into %d disjuncts", group, len(disjuncts))
        return disjunction(disjuncts)


def expand_with_stats(f: Formula, cls: NetworkClass,
                      budget: ExpansionBudget = ExpansionBudget(),
                      options: EnumerationOptions = EnumerationOptions(),
                      minimal: bool = False) -> Tuple[Formula, ExpansionStats]:
    """
    Expand f and report measurements alongside the result.

    Args:
        f: Formula of the full language
        cls: Network class interpreting group agency
        budget: Size limits
        options: Enumeration options passed to the class
        minimal: Range the group-agency disjunction over minimal members only

    Returns:
        (BIAT formula, ExpansionStats)

    Raises:
        ExpansionBudgetError: When a limit is exceeded (with the partial size)
        BoundExceededError: When a group is beyond the enumeration bound
        NonMonotoneClassError: When minimal is requested for a non-monotone class
    """
    expander = _Expander(cls, budget, options, minimal)
    result = expander.expand(f)
    expander.stats.output_nodes = expander.size_of(result)
    logger.info("expanded %d-node formula into %d nodes under %s",
                expander.size_of(f), expander.stats.output_nodes, cls)
    return result, expander.stats


def expand(f: Formula, cls: NetworkClass,
           budget: ExpansionBudget = ExpansionBudget(),
           options: EnumerationOptions = EnumerationOptions()) -> Formula:
    """Reduce f to an equivalent formula with only singleton coalitions."""
    return expand_with_stats(f, cls, budget, options)[0]


def expand_minimal(f: Formula, cls: NetworkClass,
                   budget: ExpansionBudget = ExpansionBudget(),
                   options: EnumerationOptions = EnumerationOptions()) -> Formula:
    """As expand(), but group agency ranges over the class's minimal networks."""
    return expand_with_stats(f, cls, budget, options, minimal=True)[0]


def expansion_stats(f: Formula, cls: NetworkClass,
                    budget: ExpansionBudget = ExpansionBudget(),
                    options: EnumerationOptions = EnumerationOptions(),
                    minimal: bool = False) -> ExpansionStats:
    return expand_with_stats(f, cls, budget, options, minimal)[1]
