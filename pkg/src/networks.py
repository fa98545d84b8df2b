"""
Networks Module
Cohesion networks, their admissibility constraints, and classes of
admissible networks with deterministic enumeration.

A cohesion network for a non-degenerate group G is a pair <Gamma, =>>
where Gamma is a set of non-empty strict subgroups of G and => is a
directed edge relation on Gamma covering every agent of G. Each edge
(C1, C2) prescribes a pro-social behaviour from benefactor C1 towards
beneficiary C2.
"""

import logging
from dataclasses import dataclass, field
from itertools import chain, combinations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Set, Tuple, Union

from .errors import (
    BoundExceededError,
    DegenerateGroupError,
    InvalidNetworkClassError,
    NonMonotoneClassError,
)
from .formula import Group, agent_sort_key

logger = logging.getLogger(__name__)

Coalition = FrozenSet[str]
Edge = Tuple[Coalition, Coalition]


def coalition(*names) -> Coalition:
    return frozenset(str(n) for n in names)


def coalition_key(c: Coalition) -> Tuple:
    """Order coalitions by size, then lexicographically by member names."""
    return (len(c), tuple(agent_sort_key(m) for m in sorted(c, key=agent_sort_key)))


def edge_key(edge: Edge) -> Tuple:
    return (coalition_key(edge[0]), coalition_key(edge[1]))


def format_coalition(c: Coalition) -> str:
    return "{" + ",".join(sorted(c, key=agent_sort_key)) + "}"


@dataclass(frozen=True)
class CohesionNetwork:
    """A candidate social fabric <vertices, edges> for the carrier group."""

    carrier: Group
    vertices: FrozenSet[Coalition]
    edges: FrozenSet[Edge]

    @classmethod
    def from_edges(cls, carrier: Group, edges: Iterable[Edge],
                   vertices: Optional[Iterable[Coalition]] = None) -> "CohesionNetwork":
        """
        Build a network; vertices default to the edge endpoints.

        Args:
            carrier: The group G the network is for
            edges: Pairs (benefactor, beneficiary) of coalitions
            vertices: Explicit Gamma, when the literal reading is wanted

        Returns:
            CohesionNetwork (not checked; see check_c0)
        """
        edges = frozenset((frozenset(a), frozenset(b)) for a, b in edges)
        if vertices is None:
            vertices = endpoints(edges)
        return cls(carrier, frozenset(frozenset(v) for v in vertices), edges)

    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges, key=edge_key)

    def sorted_vertices(self) -> List[Coalition]:
        return sorted(self.vertices, key=coalition_key)

    def covered_agents(self) -> FrozenSet[str]:
        return frozenset(chain.from_iterable(a | b for a, b in self.edges))

    def __str__(self) -> str:
        return ", ".join(
            f"{format_coalition(a)}->{format_coalition(b)}" for a, b in self.sorted_edges()
        )


def endpoints(edges: Iterable[Edge]) -> FrozenSet[Coalition]:
    return frozenset(chain.from_iterable(edges))


def benefactors(net: CohesionNetwork) -> FrozenSet[Coalition]:
    """Coalitions occurring as the source of some edge."""
    return frozenset(a for a, _ in net.edges)


def beneficiaries(net: CohesionNetwork) -> FrozenSet[Coalition]:
    """Coalitions occurring as the target of some edge."""
    return frozenset(b for _, b in net.edges)


# Admissibility --------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    """One violated admissibility constraint, named by its number or label."""

    constraint: str
    message: str

    def __str__(self) -> str:
        return f"constraint {self.constraint}: {self.message}"


def check_c0(net: CohesionNetwork, allow_self_edges: bool = False) -> List[Violation]:
    """
    Check a candidate network against the five admissibility constraints.

    Constraints: (1) vertices are subsets of the carrier; (2) edges join
    vertices; (3) the carrier itself is not a vertex; (4) the empty
    coalition is not a vertex; (5) every agent of the carrier occurs in
    some edge endpoint. Self-loops are reported as "self-edge" unless
    allowed, and a singleton carrier as "degenerate-carrier".

    Args:
        net: Any candidate structure
        allow_self_edges: Accept edges (C, C)

    Returns:
        List of violations, empty iff the network is admissible
    """
    violations: List[Violation] = []
    carrier = net.carrier.members

    if net.carrier.is_degenerate:
        violations.append(Violation(
            "degenerate-carrier",
            f"{net.carrier} is a singleton; cohesion networks are for non-degenerate groups",
        ))

    for v in sorted(net.vertices, key=coalition_key):
        if not v <= carrier:
            outsiders = format_coalition(v - carrier)
            violations.append(Violation("1", f"vertex {format_coalition(v)} has outsiders {outsiders}"))

    for a, b in sorted(net.edges, key=edge_key):
        for end in (a, b):
            if end not in net.vertices:
                violations.append(Violation(
                    "2", f"edge {format_coalition(a)}->{format_coalition(b)} "
                         f"uses {format_coalition(end)} which is not a vertex",
                ))
        if a == b and not allow_self_edges:
            violations.append(Violation("self-edge", f"self-loop on {format_coalition(a)}"))

    if carrier in net.vertices:
        violations.append(Violation("3", f"the carrier {net.carrier} is a vertex"))

    if frozenset() in net.vertices:
        violations.append(Violation("4", "the empty coalition is a vertex"))

    missing = carrier - net.covered_agents()
    if missing:
        violations.append(Violation(
            "5", f"agents {format_coalition(missing)} occur in no edge"
        ))

    return violations


def canonicalize(net: CohesionNetwork) -> CohesionNetwork:
    """Drop isolated vertices: Gamma becomes exactly the set of edge endpoints."""
    return CohesionNetwork(net.carrier, endpoints(net.edges), net.edges)


def is_witness(net: CohesionNetwork, realised: Iterable[Edge]) -> bool:
    """True iff every pro-social behaviour the network prescribes is realised."""
    realised = {(frozenset(a), frozenset(b)) for a, b in realised}
    return net.edges <= realised


# Classes --------------------------------------------------------------------

FILTER_KINDS = ("disjoint-endpoints", "singleton-benefactors", "singleton-beneficiaries", "max-edges")


@dataclass(frozen=True)
class NetworkFilter:
    """A restriction of a class; every filter kind is edge-monotone."""

    kind: str
    limit: Optional[int] = None

    @classmethod
    def parse(cls, text: str) -> "NetworkFilter":
        """Parse "disjoint-endpoints" or "max-edges:N"."""
        name, _, arg = text.strip().partition(":")
        if name not in FILTER_KINDS:
            raise InvalidNetworkClassError(
                f"unknown filter {text!r}; expected one of {', '.join(FILTER_KINDS)}"
            )
        if name == "max-edges":
            try:
                limit = int(arg)
            except ValueError:
                raise InvalidNetworkClassError(f"max-edges needs a number, got {text!r}") from None
            if limit < 1:
                raise InvalidNetworkClassError("max-edges must be at least 1")
            return cls(name, limit)
        if arg:
            raise InvalidNetworkClassError(f"filter {name} takes no argument")
        return cls(name)

    def accepts_edge(self, edge: Edge) -> bool:
        a, b = edge
        if self.kind == "disjoint-endpoints":
            return not (a & b)
        if self.kind == "singleton-benefactors":
            return len(a) == 1
        if self.kind == "singleton-beneficiaries":
            return len(b) == 1
        return True

    def accepts(self, net: CohesionNetwork) -> bool:
        if self.kind == "max-edges":
            return len(net.edges) <= self.limit
        return all(self.accepts_edge(e) for e in net.edges)

    def __str__(self) -> str:
        return f"{self.kind}:{self.limit}" if self.limit is not None else self.kind


BUILTIN_NAMES = ("c0", "all-help-rest")


@dataclass(frozen=True)
class BuiltinClass:
    """c0 (every admissible network) or all-help-rest (the piano fabric)."""

    name: str

    def __post_init__(self):
        if self.name not in BUILTIN_NAMES:
            raise InvalidNetworkClassError(
                f"unknown builtin class {self.name!r}; expected one of {', '.join(BUILTIN_NAMES)}"
            )

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class FilteredClass:
    base: "NetworkClass"
    filters: Tuple[NetworkFilter, ...]

    def __str__(self) -> str:
        return "+".join([str(self.base)] + [str(f) for f in self.filters])


@dataclass(frozen=True)
class ExplicitClass:
    """Networks listed per group; groups without an entry admit no network."""

    networks: Mapping[FrozenSet[str], Tuple[CohesionNetwork, ...]] = field(hash=False)

    def __str__(self) -> str:
        return f"explicit({len(self.networks)} groups)"


NetworkClass = Union[BuiltinClass, FilteredClass, ExplicitClass]

C0 = BuiltinClass("c0")
ALL_HELP_REST = BuiltinClass("all-help-rest")


def make_explicit_class(networks: Mapping[FrozenSet[str], Iterable[CohesionNetwork]],
                        allow_self_edges: bool = False) -> ExplicitClass:
    """
    Build an explicit class, checking every listed network against c0.

    Raises:
        InvalidNetworkClassError: When a listed network is not admissible
            for its group
    """
    checked: Dict[FrozenSet[str], Tuple[CohesionNetwork, ...]] = {}
    for key, nets in networks.items():
        nets = tuple(nets)
        for net in nets:
            if net.carrier.members != key:
                raise InvalidNetworkClassError(
                    f"network {net} is listed under {format_coalition(key)} "
                    f"but is for {net.carrier}"
                )
            problems = check_c0(net, allow_self_edges)
            if problems:
                raise InvalidNetworkClassError(
                    f"network {net} for {net.carrier} is not admissible: "
                    + "; ".join(str(p) for p in problems)
                )
        checked[frozenset(key)] = nets
    return ExplicitClass(checked)


def parse_class_spec(spec: str) -> NetworkClass:
    """
    Parse a builtin class name with optional "+filter" suffixes.

    Example: "c0+singleton-benefactors+disjoint-endpoints+max-edges:2".
    """
    parts = [p for p in spec.strip().split("+") if p]
    if not parts:
        raise InvalidNetworkClassError("empty class specification")
    base = BuiltinClass(parts[0])
    if len(parts) == 1:
        return base
    return FilteredClass(base, tuple(NetworkFilter.parse(p) for p in parts[1:]))


@dataclass(frozen=True)
class EnumerationOptions:
    """Knobs for enumerating class members."""

    bound: int = 4
    allow_self_edges: bool = False
    literal_gamma: bool = False


def _flatten(cls: NetworkClass) -> Tuple[Union[BuiltinClass, ExplicitClass], Tuple[NetworkFilter, ...]]:
    filters: Tuple[NetworkFilter, ...] = ()
    while isinstance(cls, FilteredClass):
        filters = cls.filters + filters
        cls = cls.base
    return cls, filters


def _require_non_degenerate(group: Group) -> None:
    if group.is_degenerate:
        raise DegenerateGroupError(
            f"{group} is degenerate: cohesion networks exist only for groups of two or more agents"
        )


def _strict_subcoalitions(group: Group) -> List[Coalition]:
    members = group.sorted_members()
    subs = [
        frozenset(c)
        for r in range(1, len(members))
        for c in combinations(members, r)
    ]
    return sorted(subs, key=coalition_key)


def edge_universe(group: Group, filters: Iterable[NetworkFilter] = (),
                  allow_self_edges: bool = False) -> List[Edge]:
    """
    All candidate edges between strict non-empty subgroups, in canonical order.

    Args:
        group: Carrier group
        filters: Per-edge filters to apply
        allow_self_edges: Include (C, C) pairs

    Returns:
        Edges ordered by (benefactor, beneficiary) coalition order
    """
    filters = tuple(filters)
    vertices = _strict_subcoalitions(group)
    universe = []
    for a in vertices:
        for b in vertices:
            if a == b and not allow_self_edges:
                continue
            if all(f.accepts_edge((a, b)) for f in filters):
                universe.append((a, b))
    return universe


def _max_edges(filters: Iterable[NetworkFilter]) -> Optional[int]:
    limits = [f.limit for f in filters if f.kind == "max-edges"]
    return min(limits) if limits else None


def _agent_masks(group: Group, universe: List[Edge]) -> Tuple[List[int], int]:
    index = {name: i for i, name in enumerate(group.sorted_members())}
    masks = []
    for a, b in universe:
        m = 0
        for name in a | b:
            m |= 1 << index[name]
        masks.append(m)
    return masks, (1 << len(index)) - 1


def _decode(universe: List[Edge], mask: int) -> List[Edge]:
    return [universe[i] for i in range(len(universe)) if mask >> i & 1]


def _literal_variants(net: CohesionNetwork) -> Iterator[CohesionNetwork]:
    """Every admissible Gamma containing the endpoints, smallest first."""
    spare = [c for c in _strict_subcoalitions(net.carrier) if c not in net.vertices]
    for r in range(len(spare) + 1):
        for extra in combinations(spare, r):
            yield CohesionNetwork(net.carrier, net.vertices | frozenset(extra), net.edges)


def piano_network(group: Group) -> CohesionNetwork:
    """The all-help-rest fabric: each agent helps the group of all the others."""
    edges = [
        (frozenset({i}), group.members - {i})
        for i in group.sorted_members()
    ]
    return CohesionNetwork.from_edges(group, edges)


def _masks_up_to(width: int, limit: int) -> Iterator[int]:
    """Non-zero masks below 2**width with at most limit bits, ascending."""
    end = 1 << width
    mask = 1
    while mask < end:
        if bin(mask).count("1") <= limit:
            yield mask
            mask += 1
        else:
            # no mask in [mask, mask + lowest bit) has fewer set bits
            mask += mask & -mask


def _c0_masks(group: Group, filters: Tuple[NetworkFilter, ...],
              options: EnumerationOptions) -> Tuple[List[Edge], Iterator[int]]:
    if len(group) > options.bound:
        raise BoundExceededError(len(group), options.bound)
    universe = edge_universe(group, filters, options.allow_self_edges)
    agent_masks, full = _agent_masks(group, universe)
    limit = _max_edges(filters)

    def covers(mask: int) -> bool:
        seen = 0
        for i, m in enumerate(agent_masks):
            if mask >> i & 1:
                seen |= m
        return seen == full

    if limit is None:
        candidates: Iterable[int] = range(1, 1 << len(universe))
    else:
        candidates = _masks_up_to(len(universe), limit)

    return universe, (mask for mask in candidates if covers(mask))


def members(cls: NetworkClass, group: Group,
            options: EnumerationOptions = EnumerationOptions()) -> Iterator[CohesionNetwork]:
    """
    Lazily enumerate the admissible networks of a class for a group.

    c0 is enumerated as bitmasks over the ordered edge universe, so the
    order is deterministic; per-edge filters shrink the universe first.

    Args:
        cls: Network class
        group: Non-degenerate carrier group
        options: Bound, self-edge and literal-Gamma settings

    Returns:
        Iterator of networks, each passing check_c0

    Raises:
        DegenerateGroupError: For a singleton group
        BoundExceededError: When c0 enumeration is asked for a group above the bound
    """
    _require_non_degenerate(group)
    base, filters = _flatten(cls)

    if isinstance(base, BuiltinClass) and base.name == "c0":
        universe, masks = _c0_masks(group, filters, options)
        logger.debug("enumerating %s for %s over %d candidate edges", cls, group, len(universe))
        nets = (CohesionNetwork.from_edges(group, _decode(universe, m)) for m in masks)
        per_network_filters: Tuple[NetworkFilter, ...] = ()
    elif isinstance(base, BuiltinClass):
        nets = iter([piano_network(group)])
        per_network_filters = filters
    else:
        listed = base.networks.get(group.members, ())
        if not options.literal_gamma:
            listed = tuple(canonicalize(n) for n in listed)
        nets = iter(listed)
        per_network_filters = filters

    for net in nets:
        if not all(f.accepts(net) for f in per_network_filters):
            continue
        if options.literal_gamma and not isinstance(base, ExplicitClass):
            yield from _literal_variants(net)
        else:
            yield net


def count_members(cls: NetworkClass, group: Group,
                  options: EnumerationOptions = EnumerationOptions(),
                  limit: Optional[int] = None) -> int:
    """Count members, stopping early once `limit` is passed."""
    count = 0
    for _ in members(cls, group, options):
        count += 1
        if limit is not None and count > limit:
            break
    return count


def _is_c0_based(cls: NetworkClass) -> bool:
    base, _ = _flatten(cls)
    return isinstance(base, BuiltinClass) and base.name == "c0"


def is_edge_monotone(cls: NetworkClass, group: Group,
                     options: EnumerationOptions = EnumerationOptions()) -> bool:
    """
    Whether the class is closed under coverage-preserving edge deletion at group.

    c0 and its filtered restrictions are monotone by construction; other
    classes are verified exhaustively over their (small) member lists, and
    a class with at most one member is accepted as trivially minimal.
    """
    if _is_c0_based(cls):
        return True
    listed = list(members(cls, group, EnumerationOptions(options.bound, options.allow_self_edges)))
    if len(listed) <= 1:
        return True
    present = {n.edges for n in listed}
    carrier = group.members
    for net in listed:
        for edge in net.edges:
            rest = net.edges - {edge}
            if rest and carrier <= frozenset(chain.from_iterable(a | b for a, b in rest)):
                if rest not in present:
                    logger.debug("class %s not monotone at %s: %s minus one edge is missing",
                                 cls, group, net)
                    return False
    return True


def _irredundant_covers(universe: List[Edge], agent_masks: List[int], full: int,
                        limit: int) -> List[int]:
    """Edge subsets covering `full` in which every edge covers a private agent."""
    found: List[int] = []

    def extend(start: int, chosen: List[int], seen: int) -> None:
        if seen == full:
            for i in chosen:
                others = 0
                for j in chosen:
                    if j != i:
                        others |= agent_masks[j]
                if others == full:
                    return
            found.append(sum(1 << i for i in chosen))
            return
        if len(chosen) == limit:
            return
        for i in range(start, len(universe)):
            if agent_masks[i] & ~seen:
                chosen.append(i)
                extend(i + 1, chosen, seen | agent_masks[i])
                chosen.pop()

    extend(0, [], 0)
    return sorted(found)


def minimal_members(cls: NetworkClass, group: Group,
                    options: EnumerationOptions = EnumerationOptions()) -> List[CohesionNetwork]:
    """
    Members whose edge sets are subset-minimal among the class's members.

    For c0-based classes these are the irredundant covers (each edge covers
    an agent no other edge covers), so at most |G| edges each.

    Raises:
        NonMonotoneClassError: When the class is not edge-monotone at group
    """
    _require_non_degenerate(group)
    if not is_edge_monotone(cls, group, options):
        raise NonMonotoneClassError(
            f"class {cls} is not closed under coverage-preserving edge deletion at {group}"
        )

    _, filters = _flatten(cls)
    if _is_c0_based(cls):
        if len(group) > options.bound:
            raise BoundExceededError(len(group), options.bound)
        universe = edge_universe(group, filters, options.allow_self_edges)
        agent_masks, full = _agent_masks(group, universe)
        limit = min(len(group), _max_edges(filters) or len(group))
        masks = _irredundant_covers(universe, agent_masks, full, limit)
        return [CohesionNetwork.from_edges(group, _decode(universe, m)) for m in masks]

    listed = list(members(cls, group, EnumerationOptions(options.bound, options.allow_self_edges)))
    minimal: List[CohesionNetwork] = []
    seen: Set[FrozenSet[Edge]] = set()
    for net in listed:
        if net.edges in seen:
            continue
        if any(other.edges < net.edges for other in listed):
            continue
        seen.add(net.edges)
        minimal.append(net)
    return minimal


# Reliance -------------------------------------------------------------------

def is_cohesive(cls: NetworkClass, group: Group, realised: Iterable[Edge],
                options: EnumerationOptions = EnumerationOptions()) -> Optional[CohesionNetwork]:
    """
    Find a member of the class that the realised behaviours witness.

    Args:
        cls: Network class
        group: Non-degenerate group
        realised: Pro-social behaviours (benefactor, beneficiary) that took place

    Returns:
        A witnessing network, or None when the group is not cohesive
    """
    realised = {(frozenset(a), frozenset(b)) for a, b in realised}
    if is_edge_monotone(cls, group, options):
        candidates: Iterable[CohesionNetwork] = minimal_members(cls, group, options)
    else:
        candidates = members(cls, group, options)
    for net in candidates:
        if is_witness(net, realised):
            return net
    return None


def may_rely(cls: NetworkClass, group: Group,
             options: EnumerationOptions = EnumerationOptions()) -> List[Edge]:
    """
    Pro-social behaviours occurring in at least one admissible network.

    Returns:
        Edges in canonical order
    """
    _require_non_degenerate(group)
    _, filters = _flatten(cls)
    if _is_c0_based(cls):
        minimal = minimal_members(cls, group, options)
        if not minimal:
            return []
        universe = edge_universe(group, filters, options.allow_self_edges)
        limit = _max_edges(filters)
        if limit is None:
            # the full universe is itself a member
            return universe
        return [
            e for e in universe
            if any(len(m.edges | {e}) <= limit for m in minimal)
        ]
    found: Set[Edge] = set()
    for net in members(cls, group, options):
        found |= net.edges
    return sorted(found, key=edge_key)


def must_rely(cls: NetworkClass, group: Group,
              options: EnumerationOptions = EnumerationOptions()) -> List[str]:
    """
    Agents occurring in an edge endpoint of every admissible network.

    By coverage (constraint 5) this is the whole group for every class.
    """
    _require_non_degenerate(group)
    if is_edge_monotone(cls, group, options):
        nets: Iterable[CohesionNetwork] = minimal_members(cls, group, options)
    else:
        nets = members(cls, group, options)
    required = set(group.members)
    for net in nets:
        required &= net.covered_agents()
    return sorted(required, key=agent_sort_key)
