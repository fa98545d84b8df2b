"""
Solver Module
Satisfiability and validity for the individual-agent fragment, with
witness models, and full-language decisions through the reduction.

The procedure searches labelings of the subformula closure of the goal
that make the goal true and respect success (a true E{i} psi needs psi
true). A labeling is accepted when its modal atoms can be realised by
neighborhoods:

    (a) E{i} psi true             -> ~psi is satisfiable (no tautology)
    (b) E{i} psi true, E{i} chi false -> psi and chi are not equivalent
    (c) the same pairwise condition for A{i}

Every recursive goal has smaller modal depth than the atom that spawned
it. Witness models are assembled from the witnesses of the recursive
goals and are always re-checked by the model checker.
"""

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from itertools import count
from typing import Dict, List, Optional, Set, Tuple

from .errors import NonBiatFormulaError, SolverTimeoutError, WitnessValidationError
from .formula import (
    And,
    Atom,
    Attempts,
    Bottom,
    Brings,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Top,
    agent_sort_key,
    atom_names,
    agents,
    modal_depth,
    render,
    subformulas,
)
from .models import NeighborhoodModel, WorldSet, _Evaluator, model_check, validate
from .networks import EnumerationOptions, NetworkClass
from .reduction import ExpansionBudget, expand_with_stats, is_biat

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 30.0


class Verdict(Enum):
    SATISFIABLE = "satisfiable"
    UNSATISFIABLE = "unsatisfiable"


@dataclass
class SatResult:
    """Outcome of one satisfiability query."""

    verdict: Verdict
    model: Optional[NeighborhoodModel] = None
    world: Optional[str] = None
    stats: Dict[str, float] = field(default_factory=dict)

    @property
    def satisfiable(self) -> bool:
        return self.verdict is Verdict.SATISFIABLE


def desugar(f: Formula) -> Formula:
    """Rewrite into Top, atoms, Not, And and singleton E/A only."""
    memo: Dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        cached = memo.get(g)
        if cached is not None:
            return cached
        if isinstance(g, (Top, Atom)):
            out = g
        elif isinstance(g, Bottom):
            out = Not(Top())
        elif isinstance(g, Not):
            out = Not(go(g.body))
        elif isinstance(g, And):
            out = And(go(g.left), go(g.right))
        elif isinstance(g, Or):
            out = Not(And(Not(go(g.left)), Not(go(g.right))))
        elif isinstance(g, Implies):
            out = Not(And(go(g.left), Not(go(g.right))))
        elif isinstance(g, Iff):
            left, right = go(g.left), go(g.right)
            out = And(Not(And(left, Not(right))), Not(And(right, Not(left))))
        elif isinstance(g, Brings):
            out = Brings(g.group, go(g.body))
        elif isinstance(g, Attempts):
            out = Attempts(g.group, go(g.body))
        else:
            raise NonBiatFormulaError(f"cannot desugar {render(g)}")
        memo[g] = out
        return out

    return go(f)


def _agent_of(f: Formula) -> str:
    (agent,) = f.group.members
    return agent


@dataclass
class _Outcome:
    """Memoised result for one goal: None for unsatisfiable."""

    model: Optional[NeighborhoodModel]
    world: Optional[str]


class BiatSolver:
    """
    One satisfiability query: deadline, memo table and statistics.

    Instances are not shared between queries.
    """

    def __init__(self, timeout: float = DEFAULT_TIMEOUT):
        self.timeout = timeout
        self.deadline = time.monotonic() + timeout
        self.memo: Dict[Formula, _Outcome] = {}
        self.stats = {"labelings": 0, "goals": 0, "memo_hits": 0}

    # search ------------------------------------------------------------

    def _tick(self) -> None:
        self.stats["labelings"] += 1
        if self.stats["labelings"] % 256 == 0 and time.monotonic() > self.deadline:
            logger.warning("solver timeout after %(labelings)d labelings", self.stats)
            raise SolverTimeoutError(self.timeout, self.stats)

    def solve(self, goal: Formula) -> _Outcome:
        """Decide a core-syntax goal, returning its witness when satisfiable."""
        cached = self.memo.get(goal)
        if cached is not None:
            self.stats["memo_hits"] += 1
            return cached
        self.stats["goals"] += 1

        closure = subformulas(goal)
        depth = {g: modal_depth(g) for g in closure}
        variables = sorted(
            (g for g in closure if isinstance(g, (Atom, Brings, Attempts))),
            key=lambda g: (depth[g], render(g)),
        )
        labeling = self._search(goal, variables)
        if labeling is None:
            outcome = _Outcome(None, None)
        else:
            model = self._assemble(goal, closure, labeling)
            outcome = _Outcome(model, "w0")
        self.memo[goal] = outcome
        return outcome

    def satisfiable(self, goal: Formula) -> bool:
        return self.solve(goal).model is not None

    def _separable(self, psi: Formula, chi: Formula) -> Optional[Formula]:
        """The satisfiable goal telling psi and chi apart, or None if equivalent."""
        for candidate in (And(psi, Not(chi)), And(Not(psi), chi)):
            if self.satisfiable(candidate):
                return candidate
        return None

    def _search(self, goal: Formula, variables: List[Formula]) -> Optional[Dict[Formula, bool]]:
        assignment: Dict[Formula, bool] = {}

        def value(g: Formula, seen: Optional[Dict[Formula, Optional[bool]]] = None) -> Optional[bool]:
            # three-valued: None while some variable below g is unassigned
            if seen is None:
                seen = {}
            if g in seen:
                return seen[g]
            if isinstance(g, Top):
                result = True
            elif isinstance(g, Not):
                inner = value(g.body, seen)
                result = None if inner is None else not inner
            elif isinstance(g, And):
                left = value(g.left, seen)
                right = False if left is False else value(g.right, seen)
                if left is False or right is False:
                    result = False
                elif left is None or right is None:
                    result = None
                else:
                    result = True
            else:
                result = assignment.get(g)
            seen[g] = result
            return result

        def acceptable(var: Formula, truth: bool) -> bool:
            if not isinstance(var, (Brings, Attempts)):
                return True
            if isinstance(var, Brings) and truth:
                if value(var.body) is not True:
                    return False
                if not self.satisfiable(Not(var.body)):
                    return False
            agent = _agent_of(var)
            for other, other_truth in assignment.items():
                if other_truth == truth or type(other) is not type(var) or other is var:
                    continue
                if _agent_of(other) != agent:
                    continue
                if self._separable(var.body, other.body) is None:
                    return False
            return True

        def search(index: int) -> bool:
            self._tick()
            if value(goal) is False:
                return False
            if index == len(variables):
                return value(goal) is True
            var = variables[index]
            choices = (True, False) if isinstance(var, Atom) else (False, True)
            for truth in choices:
                if not acceptable(var, truth):
                    continue
                assignment[var] = truth
                if search(index + 1):
                    return True
                del assignment[var]
            return False

        if search(0):
            return dict(assignment)
        return None

    # witness assembly --------------------------------------------------

    def _obligation_goals(self, labeling: Dict[Formula, bool]) -> List[Formula]:
        goals: List[Formula] = []
        modal = [g for g in labeling if isinstance(g, (Brings, Attempts))]
        for var in modal:
            if isinstance(var, Brings) and labeling[var]:
                goals.append(Not(var.body))
        for var in modal:
            if not labeling[var]:
                continue
            for other in modal:
                if labeling[other] or type(other) is not type(var):
                    continue
                if _agent_of(other) != _agent_of(var):
                    continue
                separating = self._separable(var.body, other.body)
                goals.append(separating)
        unique: Dict[Formula, None] = {}
        for g in goals:
            unique.setdefault(g, None)
        return list(unique)

    def _assemble(self, goal: Formula, closure: Set[Formula],
                  labeling: Dict[Formula, bool]) -> NeighborhoodModel:
        closure_atoms = sorted(atom_names(goal))
        closure_agents = sorted(agents(goal), key=agent_sort_key)

        def truth_at_root(g: Formula) -> bool:
            if isinstance(g, Top):
                return True
            if isinstance(g, Not):
                return not truth_at_root(g.body)
            if isinstance(g, And):
                return truth_at_root(g.left) and truth_at_root(g.right)
            return labeling[g]

        components: List[Tuple[NeighborhoodModel, Dict[str, str]]] = []
        names = count(1)
        for sub_goal in self._obligation_goals(labeling):
            sub_model = self.memo[sub_goal].model
            sub_model = _extend(sub_model, closure_atoms, closure_agents)
            renaming = {w: f"w{next(names)}" for w in sub_model.worlds}
            components.append((sub_model, renaming))

        worlds = ["w0"] + [renaming[w] for m, renaming in components for w in m.worlds]

        # extension of every closure formula in the assembled model
        evaluators = [_Evaluator(m) for m, _ in components]
        extension: Dict[Formula, WorldSet] = {}
        for g in closure:
            ws = {"w0"} if truth_at_root(g) else set()
            for (m, renaming), evaluator in zip(components, evaluators):
                ws.update(renaming[w] for w in evaluator.truth_set(g))
            extension[g] = frozenset(ws)

        valuation: Dict[str, Set[str]] = {}
        for p in closure_atoms:
            valuation[p] = {"w0"} if labeling.get(Atom(p)) else set()
        for m, renaming in components:
            for p, ws in m.valuation.items():
                valuation.setdefault(p, set()).update(renaming[w] for w in ws)

        all_agents = set(closure_agents)
        for m, _ in components:
            all_agents.update(m.agents)
        e_table = {a: {} for a in all_agents}
        a_table = {a: {} for a in all_agents}

        for g, truth in labeling.items():
            if truth and isinstance(g, (Brings, Attempts)):
                table = e_table if isinstance(g, Brings) else a_table
                table[_agent_of(g)].setdefault("w0", set()).add(extension[g.body])

        for (m, renaming), evaluator in zip(components, evaluators):
            local = {g: evaluator.truth_set(g) for g in closure}
            for agent in m.agents:
                for w in m.worlds:
                    for table, nbhds in ((e_table, m.nbhd_e(agent, w)), (a_table, m.nbhd_a(agent, w))):
                        lifted = {extension[g] for g in closure if local[g] in nbhds}
                        if lifted:
                            table[agent][renaming[w]] = lifted

        def freeze(table):
            return {
                agent: {w: frozenset(sets) for w, sets in per_world.items()}
                for agent, per_world in table.items()
            }

        return NeighborhoodModel(
            worlds=tuple(worlds),
            valuation={p: frozenset(ws) for p, ws in valuation.items()},
            e_neighborhoods=freeze(e_table),
            a_neighborhoods=freeze(a_table),
        )


def _extend(model: NeighborhoodModel, atom_list, agent_list) -> NeighborhoodModel:
    """Give a model empty valuations/neighborhoods for symbols it does not mention."""
    valuation = dict(model.valuation)
    for p in atom_list:
        valuation.setdefault(p, frozenset())
    e_table = dict(model.e_neighborhoods)
    a_table = dict(model.a_neighborhoods)
    for agent in agent_list:
        e_table.setdefault(agent, {})
        a_table.setdefault(agent, {})
    return NeighborhoodModel(model.worlds, valuation, e_table, a_table)


def sat(f: Formula, timeout: float = DEFAULT_TIMEOUT) -> SatResult:
    """
    Decide satisfiability of a BIAT formula.

    Args:
        f: Formula with singleton coalitions only and no assistance nodes
        timeout: Seconds before SolverTimeoutError

    Returns:
        SatResult; when satisfiable it carries a validated witness model
        and the world (always "w0") where f holds

    Raises:
        NonBiatFormulaError: For group modalities or assistance nodes
        SolverTimeoutError: When the deadline passes
        WitnessValidationError: If the witness fails re-validation
    """
    if not is_biat(f):
        raise NonBiatFormulaError(
            f"not a BIAT formula: {render(f)}; expand it under a network class first"
        )
    started = time.monotonic()
    solver = BiatSolver(timeout)
    outcome = solver.solve(desugar(f))
    stats = dict(solver.stats, elapsed=round(time.monotonic() - started, 6))
    logger.info("sat query: %s", stats)

    if outcome.model is None:
        return SatResult(Verdict.UNSATISFIABLE, stats=stats)

    problems = validate(outcome.model)
    if problems:
        raise WitnessValidationError(
            "witness model violates frame conditions: " + "; ".join(str(p) for p in problems)
        )
    if not model_check(outcome.model, outcome.world, f):
        raise WitnessValidationError(f"witness model does not satisfy {render(f)}")
    return SatResult(Verdict.SATISFIABLE, outcome.model, outcome.world, stats)


@dataclass(frozen=True)
class Decision:
    """Settings shared by the full-language decision functions."""

    budget: ExpansionBudget = ExpansionBudget()
    options: EnumerationOptions = EnumerationOptions()
    minimal: bool = False
    timeout: float = DEFAULT_TIMEOUT


def satisfiable(f: Formula, cls: NetworkClass, decision: Decision = Decision()) -> SatResult:
    """Decide satisfiability of a full-language formula under a network class."""
    reduced, _ = expand_with_stats(f, cls, decision.budget, decision.options, decision.minimal)
    return sat(reduced, decision.timeout)


def countermodel(f: Formula, cls: NetworkClass,
                 decision: Decision = Decision()) -> Optional[Tuple[NeighborhoodModel, str]]:
    """
    Find a model falsifying f (after expansion), or None when f is valid.

    Returns:
        (model, world) where the expansion of ~f holds, or None
    """
    result = satisfiable(Not(f), cls, decision)
    if not result.satisfiable:
        return None
    return result.model, result.world


def valid(f: Formula, cls: NetworkClass, decision: Decision = Decision()) -> bool:
    """True iff the expansion of ~f is unsatisfiable."""
    return countermodel(f, cls, decision) is None


def equivalent(f: Formula, g: Formula, cls: NetworkClass,
               decision: Decision = Decision()) -> bool:
    """True iff f <-> g is valid under the class."""
    return valid(Iff(f, g), cls, decision)
