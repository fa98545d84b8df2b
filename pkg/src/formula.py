"""
Formula Module
Syntax trees for the language of cohesive group agency and their
structural utilities (rendering, subformulas, modal depth, agents).

The tree houses the definable connectives (Or, Implies, Iff, Top, Bottom)
as first-class nodes so the usual textbook examples render readably; the
solver desugars them (see solver.desugar).
"""

import re
from dataclasses import dataclass, fields
from typing import Dict, FrozenSet, Iterable, Iterator, List, Set, Tuple

from .errors import InvalidAtomError, InvalidGroupError

AGENT_PATTERN = re.compile(r"[A-Za-z0-9_]+")
RESERVED_WORDS = frozenset({"true", "false", "E", "A", "H"})


def agent_sort_key(name: str) -> Tuple:
    """Order agent names numerically when they are numerals, then by text."""
    if name.isdigit():
        return (0, int(name), name)
    return (1, 0, name)


class Group:
    """
    A non-empty finite set of agent identifiers.

    Groups are immutable and hashable; singletons are degenerate groups.
    """

    __slots__ = ("members", "_hash")

    def __init__(self, members: Iterable[str]):
        members = frozenset(members)
        if not members:
            raise InvalidGroupError("a group must contain at least one agent")
        for name in members:
            if not isinstance(name, str) or not AGENT_PATTERN.fullmatch(name):
                raise InvalidGroupError(f"invalid agent identifier {name!r}")
            if name in RESERVED_WORDS:
                raise InvalidGroupError(f"{name!r} is a reserved word")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "_hash", hash(("Group", members)))

    def __setattr__(self, key, value):
        raise AttributeError("Group is immutable")

    @classmethod
    def of(cls, *names) -> "Group":
        """Build a group from positional agent names (ints are converted)."""
        return cls(str(name) for name in names)

    @property
    def is_degenerate(self) -> bool:
        return len(self.members) == 1

    def sorted_members(self) -> List[str]:
        return sorted(self.members, key=agent_sort_key)

    def sort_key(self) -> Tuple:
        """Order groups by size, then by their sorted member names."""
        return (len(self.members), tuple(agent_sort_key(m) for m in self.sorted_members()))

    def __iter__(self) -> Iterator[str]:
        return iter(self.sorted_members())

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, name) -> bool:
        return name in self.members

    def __eq__(self, other) -> bool:
        return isinstance(other, Group) and self.members == other.members

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Group") -> bool:
        return self.sort_key() < other.sort_key()

    def __repr__(self) -> str:
        return f"Group({{{', '.join(self.sorted_members())}}})"

    def __str__(self) -> str:
        return "{" + ",".join(self.sorted_members()) + "}"


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def children(self) -> Tuple["Formula", ...]:
        return ()

    def __str__(self) -> str:
        return render(self)

    # Convenience constructors used heavily by the reduction and the tests
    def __invert__(self) -> "Formula":
        return Not(self)

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def implies(self, other: "Formula") -> "Formula":
        return Implies(self, other)

    def iff(self, other: "Formula") -> "Formula":
        return Iff(self, other)


def _cached_hash(self) -> int:
    cached = self.__dict__.get("_hash")
    if cached is None:
        values = tuple(getattr(self, f.name) for f in fields(self))
        cached = hash((type(self).__name__,) + values)
        self.__dict__["_hash"] = cached
    return cached


def _node(cls):
    """Make cls a frozen dataclass whose (deep) hash is computed once."""
    cls = dataclass(frozen=True)(cls)
    cls.__hash__ = _cached_hash
    return cls


@_node
class Top(Formula):
    pass


@_node
class Bottom(Formula):
    pass


@_node
class Atom(Formula):
    name: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not AGENT_PATTERN.fullmatch(self.name):
            raise InvalidAtomError(f"invalid atom name {self.name!r}")
        if self.name in RESERVED_WORDS:
            raise InvalidAtomError(f"{self.name!r} is a reserved word")


@_node
class Not(Formula):
    body: Formula

    def children(self):
        return (self.body,)


@_node
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@_node
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@_node
class Implies(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@_node
class Iff(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@_node
class Brings(Formula):
    """E_G body: the group brings it about that body."""

    group: Group
    body: Formula

    def children(self):
        return (self.body,)


@_node
class Attempts(Formula):
    """A_G body: the group tries to bring it about that body."""

    group: Group
    body: Formula

    def children(self):
        return (self.body,)


@_node
class Assists(Formula):
    """H_{benefactor -> beneficiary} body: successful assistance."""

    benefactor: Group
    beneficiary: Group
    body: Formula

    def children(self):
        return (self.body,)


MODAL_TYPES = (Brings, Attempts, Assists)
BINARY_TYPES = (And, Or, Implies, Iff)

TRUE = Top()
FALSE = Bottom()


def E(group, body: Formula) -> Brings:
    """Shorthand: E(1, p) or E((1, 2), p) or E(Group, p)."""
    return Brings(_as_group(group), body)


def A(group, body: Formula) -> Attempts:
    """Shorthand for Attempts, accepting the same group forms as E."""
    return Attempts(_as_group(group), body)


def H(benefactor, beneficiary, body: Formula) -> Assists:
    """Shorthand for Assists."""
    return Assists(_as_group(benefactor), _as_group(beneficiary), body)


def _as_group(value) -> Group:
    if isinstance(value, Group):
        return value
    if isinstance(value, (str, int)):
        return Group.of(value)
    return Group.of(*value)


def _balanced(op, items: List[Formula]) -> Formula:
    # depth grows with log(len(items)); up to three items nest to the left
    while len(items) > 1:
        paired = [op(items[i], items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            paired.append(items[-1])
        items = paired
    return items[0]


def conjunction(items: Iterable[Formula]) -> Formula:
    """Balanced conjunction; Top for no items."""
    items = list(items)
    if not items:
        return TRUE
    return _balanced(And, items)


def disjunction(items: Iterable[Formula]) -> Formula:
    """Balanced disjunction; Bottom for no items."""
    items = list(items)
    if not items:
        return FALSE
    return _balanced(Or, items)


# Rendering ------------------------------------------------------------------

# Binding strength, loosest first
_PREC_IFF, _PREC_IMP, _PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3, 4, 5

_BINARY = {
    Iff: ("<->", _PREC_IFF),
    Implies: ("->", _PREC_IMP),
    Or: ("|", _PREC_OR),
    And: ("&", _PREC_AND),
}


def render(f: Formula) -> str:
    """
    Print a formula in canonical concrete syntax with minimal parentheses.

    `&` and `|` associate to the left, `->` and `<->` to the right.

    Args:
        f: Formula to print

    Returns:
        Text that parse() maps back to a structurally equal tree
    """
    return _render(f, 0)


def _render(f: Formula, context: int) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "~" + _render(f.body, _PREC_UNARY)
    if isinstance(f, Brings):
        return f"E{f.group} " + _render(f.body, _PREC_UNARY)
    if isinstance(f, Attempts):
        return f"A{f.group} " + _render(f.body, _PREC_UNARY)
    if isinstance(f, Assists):
        return f"H{f.benefactor}>{f.beneficiary} " + _render(f.body, _PREC_UNARY)

    symbol, prec = _BINARY[type(f)]
    if isinstance(f, (And, Or)):
        left_ctx, right_ctx = prec, prec + 1
    else:
        left_ctx, right_ctx = prec + 1, prec
    text = f"{_render(f.left, left_ctx)} {symbol} {_render(f.right, right_ctx)}"
    return f"({text})" if prec < context else text


# Structural utilities -------------------------------------------------------

def subformulas(f: Formula) -> Set[Formula]:
    """
    Reflexive-transitive closure of f under immediate subterms.

    Args:
        f: Formula

    Returns:
        Set of all subformulas, including f itself
    """
    seen: Set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        stack.extend(g.children())
    return seen


def modal_depth(f: Formula) -> int:
    """Nesting depth of E/A/H operators; 0 for purely boolean formulas."""
    memo: Dict[Formula, int] = {}

    def depth(g: Formula) -> int:
        if g in memo:
            return memo[g]
        inner = max((depth(c) for c in g.children()), default=0)
        result = inner + 1 if isinstance(g, MODAL_TYPES) else inner
        memo[g] = result
        return result

    return depth(f)


def size(f: Formula) -> int:
    """Number of nodes of the tree (shared subtrees counted once per occurrence)."""
    memo: Dict[Formula, int] = {}

    def count(g: Formula) -> int:
        if g not in memo:
            memo[g] = 1 + sum(count(c) for c in g.children())
        return memo[g]

    return count(f)


def groups(f: Formula) -> Set[Group]:
    """All groups occurring in modal operators of f."""
    found: Set[Group] = set()
    for g in subformulas(f):
        if isinstance(g, (Brings, Attempts)):
            found.add(g.group)
        elif isinstance(g, Assists):
            found.update((g.benefactor, g.beneficiary))
    return found


def agents(f: Formula) -> FrozenSet[str]:
    """All agent identifiers mentioned by f."""
    return frozenset(a for grp in groups(f) for a in grp.members)


def atom_names(f: Formula) -> FrozenSet[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Atom))
