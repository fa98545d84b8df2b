"""Cohesion networks: admissibility, classes, enumeration and reliance."""

from itertools import combinations, islice

import pytest

from src.errors import (
    BoundExceededError,
    DegenerateGroupError,
    InvalidNetworkClassError,
    NonMonotoneClassError,
)
from src.formula import Group
from src.networks import (
    ALL_HELP_REST,
    C0,
    CohesionNetwork,
    EnumerationOptions,
    FilteredClass,
    NetworkFilter,
    beneficiaries,
    benefactors,
    canonicalize,
    check_c0,
    coalition,
    count_members,
    edge_universe,
    is_cohesive,
    is_edge_monotone,
    is_witness,
    make_explicit_class,
    may_rely,
    members,
    minimal_members,
    must_rely,
    parse_class_spec,
    piano_network,
)

G12 = Group.of(1, 2)
G123 = Group.of(1, 2, 3)
c1, c2, c3 = coalition(1), coalition(2), coalition(3)
c12, c13, c23 = coalition(1, 2), coalition(1, 3), coalition(2, 3)

FILTERED = "c0+singleton-benefactors+disjoint-endpoints"


def edge_sets(nets):
    return [net.edges for net in nets]


def violated(net, **kwargs):
    return {v.constraint for v in check_c0(net, **kwargs)}


def test_two_agents_have_exactly_three_networks():
    nets = list(members(C0, G12))
    assert edge_sets(nets) == [
        frozenset({(c1, c2)}),
        frozenset({(c2, c1)}),
        frozenset({(c1, c2), (c2, c1)}),
    ]
    assert all(check_c0(n) == [] for n in nets)


def test_network_count_does_not_depend_on_agent_names():
    assert count_members(C0, Group(["Charlie", "Lucy"])) == 3


def test_piano_network_is_admissible():
    piano = piano_network(G123)
    assert piano.edges == {(c1, c23), (c2, c13), (c3, c12)}
    assert check_c0(piano) == []


def test_mixed_size_network_is_admissible():
    net = CohesionNetwork.from_edges(G123, [(c1, c2), (c12, c3)])
    assert check_c0(net) == []


def test_carrier_as_vertex_violates_constraint_3():
    net = CohesionNetwork.from_edges(G12, [(c1, c2)], vertices=[c1, c2, c12])
    assert violated(net) == {"3"}


def test_each_constraint_is_reported():
    assert "1" in violated(CohesionNetwork.from_edges(G12, [(c1, coalition(1, 9))]))
    assert "2" in violated(CohesionNetwork.from_edges(G12, [(c1, c2)], vertices=[c1]))
    assert "4" in violated(CohesionNetwork.from_edges(G12, [(c1, c2)], vertices=[c1, c2, frozenset()]))
    assert violated(CohesionNetwork.from_edges(G123, [(c1, c2)])) == {"5"}
    assert violated(CohesionNetwork.from_edges(G12, [(c1, c2), (c1, c1)])) == {"self-edge"}
    assert violated(CohesionNetwork.from_edges(G12, [(c1, c2), (c1, c1)]), allow_self_edges=True) == set()
    assert "degenerate-carrier" in violated(CohesionNetwork.from_edges(Group.of(1), [(c1, c1)]))


def test_all_help_rest_has_only_the_piano_network():
    nets = list(members(ALL_HELP_REST, G123))
    assert nets == [piano_network(G123)]


def test_filtered_three_agent_count_matches_brute_force():
    cls = parse_class_spec(FILTERED)
    universe = edge_universe(G123, cls.filters)
    assert len(universe) == 9

    expected = 0
    for k in range(1, len(universe) + 1):
        for chosen in combinations(universe, k):
            covered = set().union(*(a | b for a, b in chosen))
            if covered == {"1", "2", "3"}:
                expected += 1

    assert expected == 502
    nets = list(members(cls, G123))
    assert len(nets) == expected
    assert all(check_c0(n) == [] for n in nets)
    assert all(len(a) == 1 and not a & b for n in nets for a, b in n.edges)


def test_enumeration_is_deterministic():
    cls = parse_class_spec(FILTERED)
    assert edge_sets(members(cls, G123)) == edge_sets(members(cls, G123))


def test_max_edges_filter_limits_network_size():
    cls = parse_class_spec("c0+max-edges:1")
    nets = list(members(cls, G123))
    assert nets
    assert all(len(n.edges) == 1 for n in nets)
    # 3 singleton-to-pair edges and 9 pair-to-coalition edges reach all three agents
    assert len(nets) == 12


def test_max_edges_enumeration_keeps_the_unfiltered_order():
    two = edge_sets(members(parse_class_spec("c0+max-edges:2"), G123))
    three = edge_sets(members(parse_class_spec("c0+max-edges:3"), G123))
    assert two == [edges for edges in three if len(edges) <= 2]


def test_max_edges_enumeration_is_lazy_for_four_agents():
    nets = members(parse_class_spec("c0+max-edges:4"), Group.of(1, 2, 3, 4))
    first = list(islice(nets, 50))
    assert len(first) == 50
    assert all(len(n.edges) <= 4 and check_c0(n) == [] for n in first)


def test_members_rejects_degenerate_groups_and_large_groups():
    with pytest.raises(DegenerateGroupError):
        list(members(C0, Group.of(1)))
    with pytest.raises(BoundExceededError) as info:
        list(members(C0, Group.of(1, 2, 3, 4, 5)))
    assert info.value.bound == 4


def test_canonicalize_drops_isolated_vertices():
    net = CohesionNetwork.from_edges(G123, [(c1, c23)], vertices=[c1, c23, c3])
    canonical = canonicalize(net)
    assert canonical.vertices == {c1, c23}
    assert canonical.edges == net.edges
    assert canonicalize(canonical) == canonical

    fixed = CohesionNetwork.from_edges(G12, [(c1, c2)])
    assert canonicalize(fixed) == fixed


def test_literal_gamma_keeps_three_networks_for_two_agents():
    options = EnumerationOptions(literal_gamma=True)
    assert count_members(C0, G12, options) == 3


def test_literal_gamma_adds_isolated_vertices():
    options = EnumerationOptions(literal_gamma=True)
    nets = list(members(ALL_HELP_REST, G123, options))
    # the piano network uses all six strict subgroups already
    assert len(nets) == 1
    assert len(nets[0].vertices) == 6


def test_minimal_members_of_two_agents():
    minimal = minimal_members(C0, G12)
    assert edge_sets(minimal) == [frozenset({(c1, c2)}), frozenset({(c2, c1)})]
    for net in members(C0, G12):
        assert any(m.edges <= net.edges for m in minimal)


def test_minimal_members_of_three_agents_are_irredundant():
    minimal = minimal_members(C0, G123)
    assert minimal
    for net in minimal:
        assert check_c0(net) == []
        assert len(net.edges) <= 3
        for edge in net.edges:
            rest = CohesionNetwork.from_edges(G123, net.edges - {edge})
            assert "5" in violated(rest)


def test_minimal_members_of_singleton_class():
    assert minimal_members(ALL_HELP_REST, G123) == [piano_network(G123)]


def explicit_non_monotone():
    padded = CohesionNetwork.from_edges(G123, [(c1, c23), (c2, c1)])
    return make_explicit_class({G123.members: [padded, piano_network(G123)]})


def test_non_monotone_explicit_class_is_rejected_for_minimal_members():
    cls = explicit_non_monotone()
    assert not is_edge_monotone(cls, G123)
    with pytest.raises(NonMonotoneClassError):
        minimal_members(cls, G123)


def test_explicit_class_lists_its_networks_only():
    cls = explicit_non_monotone()
    assert len(list(members(cls, G123))) == 2
    assert list(members(cls, G12)) == []


def test_explicit_class_rejects_inadmissible_networks():
    bad = CohesionNetwork.from_edges(G123, [(c1, c2)])
    with pytest.raises(InvalidNetworkClassError):
        make_explicit_class({G123.members: [bad]})


def test_class_specs():
    cls = parse_class_spec("c0+singleton-benefactors+max-edges:2")
    assert isinstance(cls, FilteredClass)
    assert str(cls) == "c0+singleton-benefactors+max-edges:2"
    assert cls.filters[1] == NetworkFilter("max-edges", 2)
    assert parse_class_spec("all-help-rest") == ALL_HELP_REST
    for spec in ["", "c1", "c0+sideways", "c0+max-edges:x", "c0+max-edges:0", "c0+disjoint-endpoints:3"]:
        with pytest.raises(InvalidNetworkClassError):
            parse_class_spec(spec)


def test_benefactors_and_beneficiaries():
    piano = piano_network(G123)
    assert benefactors(piano) == {c1, c2, c3}
    assert beneficiaries(piano) == {c12, c13, c23}


def test_witnesses_and_cohesion():
    net = CohesionNetwork.from_edges(G12, [(c1, c2)])
    assert is_witness(net, [(c1, c2), (c2, c1)])
    assert not is_witness(net, [(c2, c1)])

    found = is_cohesive(C0, G12, [(["1"], ["2"])])
    assert found is not None and found.edges == {(c1, c2)}
    assert is_cohesive(C0, G12, []) is None
    assert is_cohesive(ALL_HELP_REST, G123, [(c1, c23), (c2, c13)]) is None


def test_reliance():
    assert may_rely(C0, G12) == [(c1, c2), (c2, c1)]
    assert must_rely(C0, G12) == ["1", "2"]
    assert may_rely(ALL_HELP_REST, G123) == [(c1, c23), (c2, c13), (c3, c12)]
    assert must_rely(ALL_HELP_REST, G123) == ["1", "2", "3"]


def test_may_rely_respects_max_edges():
    cls = parse_class_spec("c0+singleton-benefactors+singleton-beneficiaries+max-edges:2")
    edges = may_rely(cls, G123)
    assert set(edges) == {(a, b) for a in (c1, c2, c3) for b in (c1, c2, c3) if a != b}
