"""
Models Module
Finite neighborhood models for the individual-agent fragment: frame
validation, model checking, truth sets and seeded random generation.

E{i} phi holds at w iff the truth set of phi is one of agent i's
E-neighborhoods at w; A{i} phi likewise with the A-neighborhoods.
Frames must satisfy the T-condition (every E-neighborhood of w contains
w) and the no-unit condition (the full world set is never an
E-neighborhood).
"""

import logging
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence

from .errors import (
    ModelParameterError,
    NonBiatFormulaError,
    UnknownAgentError,
    UnknownAtomError,
    UnknownWorldError,
)
from .formula import (
    And,
    Assists,
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
    render,
)

logger = logging.getLogger(__name__)

WorldSet = FrozenSet[str]
Neighborhoods = Mapping[str, Mapping[str, FrozenSet[WorldSet]]]


@dataclass(frozen=True)
class NeighborhoodModel:
    """
    An immutable finite neighborhood model.

    Attributes:
        worlds: World ids in a fixed order
        valuation: Atom name -> worlds where it is true
        e_neighborhoods: Agent -> world -> set of E-neighborhoods
        a_neighborhoods: Agent -> world -> set of A-neighborhoods
    """

    worlds: tuple
    valuation: Mapping[str, WorldSet] = field(default_factory=dict)
    e_neighborhoods: Neighborhoods = field(default_factory=dict)
    a_neighborhoods: Neighborhoods = field(default_factory=dict)

    @property
    def world_set(self) -> WorldSet:
        return frozenset(self.worlds)

    @property
    def agents(self) -> List[str]:
        return sorted(set(self.e_neighborhoods) | set(self.a_neighborhoods), key=agent_sort_key)

    def nbhd_e(self, agent: str, world: str) -> FrozenSet[WorldSet]:
        return self._lookup(self.e_neighborhoods, agent, world)

    def nbhd_a(self, agent: str, world: str) -> FrozenSet[WorldSet]:
        return self._lookup(self.a_neighborhoods, agent, world)

    def _lookup(self, table: Neighborhoods, agent: str, world: str) -> FrozenSet[WorldSet]:
        if agent not in self.e_neighborhoods and agent not in self.a_neighborhoods:
            raise UnknownAgentError(f"agent {agent!r} has no neighborhoods in the model")
        # missing entries are empty neighborhood sets
        return table.get(agent, {}).get(world, frozenset())


def build_model(worlds: Sequence[str],
                valuation: Optional[Mapping[str, Iterable[str]]] = None,
                e: Optional[Mapping[str, Mapping[str, Iterable[Iterable[str]]]]] = None,
                a: Optional[Mapping[str, Mapping[str, Iterable[Iterable[str]]]]] = None) -> NeighborhoodModel:
    """
    Build a model from plain Python containers.

    Args:
        worlds: World ids
        valuation: Atom -> worlds
        e: Agent -> world -> list of E-neighborhoods (each a list of worlds)
        a: Agent -> world -> list of A-neighborhoods

    Returns:
        NeighborhoodModel with every container frozen
    """
    def freeze(table):
        return {
            agent: {w: frozenset(frozenset(x) for x in sets) for w, sets in per_world.items()}
            for agent, per_world in (table or {}).items()
        }

    return NeighborhoodModel(
        worlds=tuple(worlds),
        valuation={p: frozenset(ws) for p, ws in (valuation or {}).items()},
        e_neighborhoods=freeze(e),
        a_neighborhoods=freeze(a),
    )


# Frame validation -----------------------------------------------------------

@dataclass(frozen=True)
class FrameViolation:
    """One failed frame or well-formedness condition."""

    condition: str
    agent: Optional[str] = None
    world: Optional[str] = None
    neighborhood: Optional[WorldSet] = None
    detail: str = ""

    def __str__(self) -> str:
        parts = [self.condition]
        if self.agent is not None:
            parts.append(f"agent {self.agent}")
        if self.world is not None:
            parts.append(f"world {self.world}")
        if self.neighborhood is not None:
            parts.append("neighborhood {" + ",".join(sorted(self.neighborhood)) + "}")
        if self.detail:
            parts.append(self.detail)
        return ": ".join([parts[0], ", ".join(parts[1:])]) if len(parts) > 1 else parts[0]


def validate(model: NeighborhoodModel) -> List[FrameViolation]:
    """
    Check well-formedness and the frame conditions.

    Args:
        model: Candidate model

    Returns:
        Violations (condition "T", "no-unit", "unknown-world", "no-worlds"
        or "duplicate-world"); empty iff the model is valid
    """
    violations: List[FrameViolation] = []
    worlds = model.world_set

    if not model.worlds:
        violations.append(FrameViolation("no-worlds", detail="a model needs at least one world"))
    if len(worlds) != len(model.worlds):
        violations.append(FrameViolation("duplicate-world", detail="world ids must be unique"))

    for atom_name in sorted(model.valuation):
        stray = model.valuation[atom_name] - worlds
        if stray:
            violations.append(FrameViolation(
                "unknown-world", detail=f"valuation of {atom_name} mentions {sorted(stray)}"
            ))

    for kind, table in (("E", model.e_neighborhoods), ("A", model.a_neighborhoods)):
        for agent in sorted(table):
            for world in sorted(table[agent]):
                if world not in worlds:
                    violations.append(FrameViolation(
                        "unknown-world", agent, world, detail=f"{kind}-neighborhoods of an unknown world"
                    ))
                for x in sorted(table[agent][world], key=sorted):
                    if not x <= worlds:
                        violations.append(FrameViolation(
                            "unknown-world", agent, world, x, detail=f"{kind}-neighborhood outside the model"
                        ))
                    if kind != "E":
                        continue
                    if world not in x:
                        violations.append(FrameViolation("T", agent, world, x))
                    if x == worlds:
                        violations.append(FrameViolation("no-unit", agent, world, x))

    return violations


# Model checking -------------------------------------------------------------

class _Evaluator:
    """Memoised truth-set computation for one model."""

    def __init__(self, model: NeighborhoodModel):
        self.model = model
        self.memo: Dict[Formula, WorldSet] = {}

    def truth_set(self, f: Formula) -> WorldSet:
        cached = self.memo.get(f)
        if cached is None:
            cached = self._compute(f)
            self.memo[f] = cached
        return cached

    def _compute(self, f: Formula) -> WorldSet:
        m = self.model
        everything = m.world_set
        if isinstance(f, Top):
            return everything
        if isinstance(f, Bottom):
            return frozenset()
        if isinstance(f, Atom):
            if f.name not in m.valuation:
                raise UnknownAtomError(f"atom {f.name!r} is not in the model's valuation")
            return m.valuation[f.name]
        if isinstance(f, Not):
            return everything - self.truth_set(f.body)
        if isinstance(f, And):
            return self.truth_set(f.left) & self.truth_set(f.right)
        if isinstance(f, Or):
            return self.truth_set(f.left) | self.truth_set(f.right)
        if isinstance(f, Implies):
            return (everything - self.truth_set(f.left)) | self.truth_set(f.right)
        if isinstance(f, Iff):
            left, right = self.truth_set(f.left), self.truth_set(f.right)
            return everything - (left ^ right)
        if isinstance(f, (Brings, Attempts)):
            if not f.group.is_degenerate:
                raise NonBiatFormulaError(
                    f"group modality in {render(f)}: expand it under a network class first"
                )
            (agent,) = f.group.members
            body = self.truth_set(f.body)
            lookup = m.nbhd_e if isinstance(f, Brings) else m.nbhd_a
            return frozenset(w for w in m.worlds if body in lookup(agent, w))
        if isinstance(f, Assists):
            raise NonBiatFormulaError(
                f"assistance in {render(f)}: expand it under a network class first"
            )
        raise TypeError(f"not a formula: {f!r}")


def truth_set(model: NeighborhoodModel, f: Formula) -> WorldSet:
    """
    The set of worlds where a BIAT formula holds.

    Raises:
        NonBiatFormulaError: For group modalities or assistance nodes
        UnknownAgentError / UnknownAtomError: For symbols the model lacks
    """
    return _Evaluator(model).truth_set(f)


def model_check(model: NeighborhoodModel, world: str, f: Formula) -> bool:
    """
    Decide whether f holds at a world.

    Args:
        model: A model passing validate()
        world: World id
        f: BIAT formula

    Returns:
        Truth value of f at world

    Raises:
        UnknownWorldError: When world is not in the model
    """
    if world not in model.world_set:
        raise UnknownWorldError(f"world {world!r} is not in the model")
    return world in truth_set(model, f)


# Random models --------------------------------------------------------------

def _all_subsets(worlds: Sequence[str]) -> List[WorldSet]:
    return [
        frozenset(c)
        for r in range(len(worlds) + 1)
        for c in combinations(worlds, r)
    ]


def random_model(seed: int, n_worlds: int, atoms: Sequence[str], agents: Sequence[str],
                 density: float = 0.3) -> NeighborhoodModel:
    """
    Generate a valid model deterministically from a seed.

    Each candidate neighborhood is included with probability `density`;
    E-candidates violating the T or no-unit condition are discarded.

    Args:
        seed: Random seed
        n_worlds: Number of worlds (at least 1)
        atoms: Atom names to valuate
        agents: Agent ids to give neighborhoods
        density: Inclusion probability in [0, 1]

    Returns:
        NeighborhoodModel with worlds w0..w{n-1}
    """
    if n_worlds < 1:
        raise ModelParameterError("n_worlds must be at least 1")
    if not 0.0 <= density <= 1.0:
        raise ModelParameterError("density must lie in [0, 1]")

    rng = random.Random(seed)
    worlds = tuple(f"w{i}" for i in range(n_worlds))
    everything = frozenset(worlds)
    candidates = _all_subsets(worlds)

    valuation = {
        p: frozenset(w for w in worlds if rng.random() < 0.5)
        for p in atoms
    }
    e_table: Dict[str, Dict[str, FrozenSet[WorldSet]]] = {}
    a_table: Dict[str, Dict[str, FrozenSet[WorldSet]]] = {}
    for agent in agents:
        e_table[agent] = {}
        a_table[agent] = {}
        for w in worlds:
            e_sets = [x for x in candidates if rng.random() < density]
            a_sets = [x for x in candidates if rng.random() < density]
            e_table[agent][w] = frozenset(x for x in e_sets if w in x and x != everything)
            a_table[agent][w] = frozenset(a_sets)

    return NeighborhoodModel(worlds, valuation, e_table, a_table)
