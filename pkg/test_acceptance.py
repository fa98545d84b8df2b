"""
End-to-end checks: the worked examples, the axiom suite and the
agreement between solver, expansion and model checker.
"""

import random
import time

import pytest

from src.cli import EXIT_OK, run
from src.formula import (
    TRUE,
    And,
    Assists,
    Atom,
    Attempts,
    Brings,
    Formula,
    Group,
    Iff,
    Implies,
    Not,
    Or,
    conjunction,
    modal_depth,
)
from src.models import model_check, random_model, truth_set, validate
from src.networks import ALL_HELP_REST, C0, parse_class_spec
from src.parser import parse
from src.reduction import expand, expand_minimal, is_biat
from src.solver import Decision, equivalent, sat, satisfiable, valid

p, q = Atom("p"), Atom("q")
BODIES = [p, q, And(p, q), Implies(p, q), Not(p)]
EQUIVALENT_PAIRS = [
    (p, Not(Not(p))),
    (And(p, q), And(q, p)),
    (Implies(p, q), Or(Not(p), q)),
]

G1, G2, G3 = Group.of(1), Group.of(2), Group.of(3)
G12, G123 = Group.of(1, 2), Group.of(1, 2, 3)


def two_agent_cohagen(body: Formula) -> Formula:
    h12, h21 = Assists(G1, G2, body), Assists(G2, G1, body)
    return Iff(Brings(G12, body), Or(Or(h12, h21), And(h12, h21)))


def three_agent_cohagen(body: Formula) -> Formula:
    helps = [Assists(Group([i]), Group(G123.members - {i}), body) for i in G123]
    return Iff(Brings(G123, body), conjunction(helps))


def individual_instances():
    for g in (G1, G2):
        yield Not(Brings(g, TRUE))
        for body in BODIES:
            yield Implies(Brings(g, body), body)
        for left, right in EQUIVALENT_PAIRS:
            yield Iff(Brings(g, left), Brings(g, right))
            yield Iff(Attempts(g, left), Attempts(g, right))


def two_agent_instances():
    """Instances over agents 1 and 2, read under c0."""
    yield from individual_instances()
    for body in BODIES:
        for a, b in ((G1, G2), (G2, G1)):
            yield Iff(Assists(a, b, body), And(Brings(a, Implies(Attempts(b, body), body)), Attempts(b, body)))
        yield two_agent_cohagen(body)
        yield Iff(Attempts(G12, body), And(Attempts(G1, body), Attempts(G2, body)))
        yield Implies(Brings(G12, body), body)
    yield Not(Brings(G12, TRUE))
    for left, right in EQUIVALENT_PAIRS:
        yield Iff(Brings(G12, left), Brings(G12, right))


def three_agent_instances():
    """Instances over agents 1 to 3, read under all-help-rest."""
    for body in BODIES:
        yield three_agent_cohagen(body)
        yield Iff(Attempts(G123, body), conjunction(Attempts(g, body) for g in (G1, G2, G3)))
        yield Implies(Brings(G123, body), body)
    yield Not(Brings(G123, TRUE))


# Worked examples -------------------------------------------------------------

def test_two_agent_networks_listed_quickly(capsys):
    started = time.monotonic()
    assert run(["networks", "--agents", "1,2", "--class", "c0"]) == EXIT_OK
    assert time.monotonic() - started < 1.0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].endswith(": 3 networks")
    assert lines[1:] == ["  1. {1}->{2}", "  2. {2}->{1}", "  3. {1}->{2}, {2}->{1}"]


def test_piano_reproduction():
    started = time.monotonic()
    displayed = parse(
        "E{1} (A{2} p & A{3} p -> p) & E{2} (A{1} p & A{3} p -> p) & "
        "E{3} (A{1} p & A{2} p -> p) & A{1} p & A{2} p & A{3} p"
    )
    assert equivalent(expand(parse("E{1,2,3} p"), ALL_HELP_REST), displayed, ALL_HELP_REST)
    assert time.monotonic() - started < 10.0


def test_peanuts_reproduction():
    started = time.monotonic()
    claim = parse("~E{Charlie,Lucy} k <-> (~H{Charlie}>{Lucy} k & ~H{Lucy}>{Charlie} k)")
    assert valid(claim, C0)
    assert time.monotonic() - started < 10.0


def test_assistance_without_individual_success_is_consistent():
    f = expand(parse("H{1}>{2} p & ~E{1} p & ~E{2} p"), C0)
    result = sat(f)
    assert result.satisfiable
    assert validate(result.model) == []
    assert model_check(result.model, result.world, f)


# Axioms ----------------------------------------------------------------------

@pytest.mark.slow
def test_axiom_suite_is_valid():
    started = time.monotonic()
    failures = [f for f in two_agent_instances() if not valid(f, C0)]
    failures += [f for f in three_agent_instances() if not valid(f, ALL_HELP_REST)]
    assert failures == []
    assert time.monotonic() - started < 120.0


@pytest.mark.parametrize("group, cls", [(G12, C0), (G123, ALL_HELP_REST)])
def test_group_success_and_no_tautology(group, cls):
    assert valid(Implies(Brings(group, p), p), cls)
    assert not satisfiable(Brings(group, TRUE), cls).satisfiable
    assert not sat(expand(Brings(group, TRUE), cls)).satisfiable


ABSORPTION_POOL = [
    "c0+singleton-benefactors+disjoint-endpoints+max-edges:1",
    "c0+singleton-benefactors+disjoint-endpoints+max-edges:2",
    "c0+singleton-benefactors+singleton-beneficiaries+max-edges:2",
    "c0+singleton-benefactors+singleton-beneficiaries+max-edges:3",
    "c0+singleton-benefactors+singleton-beneficiaries+disjoint-endpoints+max-edges:2",
    "c0+singleton-benefactors+singleton-beneficiaries+disjoint-endpoints+max-edges:3",
]


def test_absorption_for_two_agents():
    f = parse("E{1,2} p")
    assert equivalent(expand(f, C0), expand_minimal(f, C0), C0)


@pytest.mark.slow
@pytest.mark.parametrize("spec", random.Random(2024).sample(ABSORPTION_POOL, 5))
def test_absorption_for_three_agents(spec):
    cls = parse_class_spec(spec)
    f = parse("E{1,2,3} p")
    assert equivalent(expand(f, cls), expand_minimal(f, cls), cls, Decision(timeout=120.0))


def operands(f: Formula, node) -> list:
    stack, found = [f], []
    while stack:
        g = stack.pop()
        if isinstance(g, node):
            stack.extend((g.left, g.right))
        else:
            found.append(g)
    return found


def test_absorption_for_the_unbounded_benefactor_class():
    cls = parse_class_spec("c0+singleton-benefactors+disjoint-endpoints")
    f = parse("E{1,2,3} p")
    full, minimal = expand(f, cls), expand_minimal(f, cls)
    assert is_biat(full) and is_biat(minimal)
    full_sets = {frozenset(operands(d, And)) for d in operands(full, Or)}
    minimal_sets = {frozenset(operands(d, And)) for d in operands(minimal, Or)}
    assert len(full_sets) > 400
    assert minimal_sets <= full_sets
    # each network's conjunction already contains a minimal network's
    assert all(any(m <= d for m in minimal_sets) for d in full_sets)


# Soundness and agreement ------------------------------------------------------

@pytest.mark.slow
def test_axioms_hold_on_random_models():
    instances = [expand(f, C0) for f in two_agent_instances()]
    violations = []
    for seed in range(200):
        model = random_model(seed, 1 + seed % 4, ["p", "q"], ["1", "2"], density=0.3)
        assert validate(model) == []
        for f in instances:
            if truth_set(model, f) != model.world_set:
                violations.append((seed, f))
    assert violations == []


def random_biat(rng: random.Random, depth: int, leaves: int = 4) -> Formula:
    if leaves <= 1 or rng.random() < 0.25:
        return rng.choice([p, q])
    kind = rng.choice(["not", "and", "or", "implies", "E", "A"] if depth > 0 else ["not", "and", "or", "implies"])
    if kind == "not":
        return Not(random_biat(rng, depth, leaves - 1))
    if kind in ("E", "A"):
        node = Brings if kind == "E" else Attempts
        return node(rng.choice([G1, G2]), random_biat(rng, depth - 1, leaves - 1))
    half = max(1, leaves // 2)
    node = {"and": And, "or": Or, "implies": Implies}[kind]
    return node(random_biat(rng, depth, half), random_biat(rng, depth, leaves - half))


@pytest.mark.slow
def test_solver_agrees_with_the_model_checker():
    rng = random.Random(7)
    models = [random_model(seed, 1 + seed % 4, ["p", "q"], ["1", "2"], density=0.4) for seed in range(100)]
    disagreements = []
    for _ in range(100):
        f = random_biat(rng, 2, leaves=rng.randint(2, 7))
        assert is_biat(f) and modal_depth(f) <= 2
        result = sat(f)
        if result.satisfiable:
            if not model_check(result.model, result.world, f):
                disagreements.append(f)
        elif any(truth_set(m, f) for m in models):
            disagreements.append(f)
    assert disagreements == []


def test_contradictions_are_refuted_by_sampling():
    f = parse("E{1} p & ~p")
    assert not sat(f).satisfiable
    for seed in range(100):
        assert truth_set(random_model(seed, 3, ["p"], ["1"], density=0.5), f) == frozenset()


# Termination -------------------------------------------------------------------

def test_nested_group_agency_terminates():
    f = parse("E{1,2,3} E{1,2} p -> p")
    reduced = expand(f, ALL_HELP_REST)
    assert is_biat(reduced)
    assert valid(f, ALL_HELP_REST, Decision(timeout=60.0))


def test_pair_benefactors_recurse_into_subgroups():
    cls = parse_class_spec("c0+singleton-beneficiaries+disjoint-endpoints+max-edges:2")
    reduced = expand_minimal(parse("E{1,2,3} p"), cls)
    assert is_biat(reduced)
    # {1,2}->{3} needs the agency of {1,2}, expanded once more
    assert modal_depth(reduced) == 3
