"""
Parser Module
Concrete syntax for the language of cohesive group agency.

Precedence, tightest first: `~` and the modal prefixes, `&`, `|`, `->`
(right-associative), `<->` (right-associative).
"""

from functools import lru_cache

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import (
    UnexpectedCharacters,
    UnexpectedEOF,
    UnexpectedInput,
    UnexpectedToken,
    VisitError,
)

from .errors import EmptyGroupError, FormulaSyntaxError, UnknownTokenError
from .formula import (
    FALSE,
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
)

FORMULA_GRAMMAR = r"""
    ?start: iff

    ?iff: implies
        | implies "<->" iff              -> iff

    ?implies: disj
        | disj "->" implies              -> implies

    ?disj: conj
        | disj "|" conj                  -> or_

    ?conj: unary
        | conj "&" unary                 -> and_

    ?unary: "~" unary                    -> not_
        | "E" group unary                -> brings
        | "A" group unary                -> attempts
        | "H" group ">" group unary      -> assists
        | primary

    ?primary: TRUE                       -> top
        | FALSE                          -> bottom
        | IDENT                          -> atom
        | "(" iff ")"

    group: LBRACE (IDENT ("," IDENT)*)? RBRACE

    TRUE: "true"
    FALSE: "false"
    LBRACE: "{"
    RBRACE: "}"
    IDENT: /(?!(?:true|false|E|A|H)(?![A-Za-z0-9_]))[A-Za-z0-9_]+/

    %import common.WS
    %ignore WS
"""


@v_args(inline=True)
class _TreeToFormula(Transformer):
    """Turns the lark parse tree into formula nodes."""

    def top(self, _token):
        return TRUE

    def bottom(self, _token):
        return FALSE

    def atom(self, token):
        return Atom(str(token))

    def not_(self, body):
        return Not(body)

    def and_(self, left, right):
        return And(left, right)

    def or_(self, left, right):
        return Or(left, right)

    def implies(self, left, right):
        return Implies(left, right)

    def iff(self, left, right):
        return Iff(left, right)

    def brings(self, group, body):
        return Brings(group, body)

    def attempts(self, group, body):
        return Attempts(group, body)

    def assists(self, benefactor, beneficiary, body):
        return Assists(benefactor, beneficiary, body)

    def group(self, lbrace: Token, *rest):
        names = [str(t) for t in rest if isinstance(t, Token) and t.type == "IDENT"]
        if not names:
            raise EmptyGroupError(
                "empty group: a group needs at least one agent",
                position=lbrace.start_pos,
                column=lbrace.column,
            )
        return Group(names)


@lru_cache(maxsize=1)
def _parser() -> Lark:
    return Lark(FORMULA_GRAMMAR, parser="lalr", propagate_positions=False)


def parse(text: str) -> Formula:
    """
    Parse formula text.

    Args:
        text: Formula in the concrete grammar, e.g. "H{1}>{2,3} p"

    Returns:
        The formula tree

    Raises:
        EmptyGroupError: For a group literal with no agents (`E{} p`)
        UnknownTokenError: For characters outside the grammar
        FormulaSyntaxError: For any other syntax error, with its position
    """
    try:
        tree = _parser().parse(text)
    except UnexpectedCharacters as e:
        raise UnknownTokenError(
            f"unknown token {text[e.pos_in_stream:e.pos_in_stream + 1]!r}",
            position=e.pos_in_stream,
            column=e.column,
        ) from None
    except UnexpectedEOF:
        raise FormulaSyntaxError("unexpected end of formula", position=len(text)) from None
    except UnexpectedToken as e:
        if e.token.type == "$END":
            raise FormulaSyntaxError("unexpected end of formula", position=len(text)) from None
        raise FormulaSyntaxError(
            f"unexpected {e.token!s:.20}", position=e.token.start_pos, column=e.token.column
        ) from None
    except UnexpectedInput as e:
        raise FormulaSyntaxError(f"syntax error: {e}", position=getattr(e, "pos_in_stream", None)) from None

    try:
        return _TreeToFormula().transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, FormulaSyntaxError):
            raise e.orig_exc from None
        raise


def parse_group(text: str) -> Group:
    """
    Parse a comma-separated agent list, with or without braces ("1,2" or "{1,2}").

    Raises:
        EmptyGroupError: When no agent is listed
        FormulaSyntaxError: For malformed agent names
    """
    stripped = text.strip()
    if stripped.startswith("{") and stripped.endswith("}"):
        stripped = stripped[1:-1]
    names = [part.strip() for part in stripped.split(",") if part.strip()]
    if not names:
        raise EmptyGroupError("empty group: a group needs at least one agent")
    try:
        return Group(names)
    except ValueError as e:
        raise FormulaSyntaxError(str(e)) from None
