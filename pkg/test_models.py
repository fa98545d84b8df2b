"""Neighborhood models: validation, model checking and random generation."""

import pytest

from src.errors import (
    ModelParameterError,
    NonBiatFormulaError,
    UnknownAgentError,
    UnknownAtomError,
    UnknownWorldError,
)
from src.models import build_model, model_check, random_model, truth_set, validate
from src.parser import parse

ONE_WORLD = build_model(["w0"], {"p": ["w0"]}, e={"1": {}}, a={"1": {}})
TWO_WORLDS = build_model(
    ["w0", "w1"],
    {"p": ["w0"], "q": ["w0", "w1"]},
    e={"1": {"w0": [["w0"]]}},
    a={"1": {"w1": [["w0", "w1"]]}},
)


def conditions(model):
    return {v.condition for v in validate(model)}


def test_empty_neighborhoods_make_agency_false():
    assert validate(ONE_WORLD) == []
    assert model_check(ONE_WORLD, "w0", parse("p"))
    assert not model_check(ONE_WORLD, "w0", parse("E{1} p"))
    assert not model_check(ONE_WORLD, "w0", parse("A{1} p"))


def test_agency_holds_when_the_truth_set_is_a_neighborhood():
    assert validate(TWO_WORLDS) == []
    assert model_check(TWO_WORLDS, "w0", parse("E{1} p"))
    assert not model_check(TWO_WORLDS, "w1", parse("E{1} p"))
    assert model_check(TWO_WORLDS, "w1", parse("A{1} q"))
    assert model_check(TWO_WORLDS, "w1", parse("A{1} true"))
    assert not model_check(TWO_WORLDS, "w0", parse("A{1} q"))


def test_success_holds_on_valid_frames():
    for w in TWO_WORLDS.worlds:
        assert model_check(TWO_WORLDS, w, parse("E{1} p -> p"))


def test_truth_sets_follow_the_connectives():
    m = TWO_WORLDS
    assert truth_set(m, parse("true")) == m.world_set
    assert truth_set(m, parse("false")) == frozenset()
    assert truth_set(m, parse("~p")) == m.world_set - truth_set(m, parse("p"))
    assert truth_set(m, parse("p & q")) == truth_set(m, parse("p")) & truth_set(m, parse("q"))
    assert truth_set(m, parse("p | ~q")) == {"w0"}
    assert truth_set(m, parse("q -> p")) == {"w0"}
    assert truth_set(m, parse("p <-> q")) == {"w0"}


def test_equivalent_bodies_have_equal_truth_sets():
    m = TWO_WORLDS
    assert truth_set(m, parse("E{1} (p & q)")) == truth_set(m, parse("E{1} (q & p)"))
    assert truth_set(m, parse("E{1} p")) == truth_set(m, parse("E{1} ~~p"))


def test_t_condition_violation_is_reported():
    m = build_model(["w0", "w1"], {}, e={"1": {"w0": [["w1"]]}})
    violations = validate(m)
    assert [v.condition for v in violations] == ["T"]
    assert violations[0].agent == "1"
    assert violations[0].world == "w0"
    assert "T" in str(violations[0])


def test_no_unit_violation_is_reported():
    m = build_model(["w0", "w1"], {}, e={"1": {"w0": [["w0", "w1"]]}})
    assert conditions(m) == {"no-unit"}


def test_attempts_are_unconstrained():
    m = build_model(["w0", "w1"], {}, a={"1": {"w0": [["w1"], ["w0", "w1"], []]}})
    assert validate(m) == []


def test_malformed_models_are_reported():
    assert "no-worlds" in conditions(build_model([]))
    assert "duplicate-world" in conditions(build_model(["w0", "w0"]))
    assert "unknown-world" in conditions(build_model(["w0"], {"p": ["w9"]}))
    assert "unknown-world" in conditions(build_model(["w0"], e={"1": {"w0": [["w0", "w9"]]}}))


def test_unknown_symbols_raise():
    with pytest.raises(UnknownWorldError):
        model_check(ONE_WORLD, "w7", parse("p"))
    with pytest.raises(UnknownAtomError):
        model_check(ONE_WORLD, "w0", parse("r"))
    with pytest.raises(UnknownAgentError):
        model_check(ONE_WORLD, "w0", parse("E{2} p"))


def test_group_modalities_must_be_expanded_first():
    with pytest.raises(NonBiatFormulaError):
        model_check(ONE_WORLD, "w0", parse("E{1,2} p"))
    with pytest.raises(NonBiatFormulaError):
        model_check(ONE_WORLD, "w0", parse("H{1}>{1} p"))


def test_random_models_are_deterministic():
    assert random_model(7, 3, ["p", "q"], ["1", "2"]) == random_model(7, 3, ["p", "q"], ["1", "2"])


def test_random_models_with_zero_density_have_no_neighborhoods():
    m = random_model(3, 3, ["p"], ["1", "2"], density=0.0)
    for agent in ("1", "2"):
        for w in m.worlds:
            assert m.nbhd_e(agent, w) == frozenset()
            assert m.nbhd_a(agent, w) == frozenset()


@pytest.mark.parametrize("seed", range(25))
def test_random_models_are_valid(seed):
    m = random_model(seed, 1 + seed % 4, ["p", "q"], ["1", "2"], density=0.5)
    assert validate(m) == []
    for w in m.worlds:
        assert model_check(m, w, parse("E{1} p -> p"))
        assert not model_check(m, w, parse("E{2} true"))


def test_random_model_parameters_are_checked():
    with pytest.raises(ModelParameterError):
        random_model(0, 0, ["p"], ["1"])
    with pytest.raises(ModelParameterError):
        random_model(0, 2, ["p"], ["1"], density=1.5)
