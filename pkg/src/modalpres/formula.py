"""Graded modal formulas: AST, parser, printer, fragments and satisfaction."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Union

from .kripke import PointedModel, TreeModel


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownPropositionError(ValueError):
    pass


def _cached_hash(self):
    # formulas are hashed constantly as dict keys; deep trees make that costly
    h = self.__dict__.get("_hash")
    if h is None:
        h = hash((type(self).__name__,) + tuple(getattr(self, f) for f in self.__dataclass_fields__))
        object.__setattr__(self, "_hash", h)
    return h


@dataclass(frozen=True)
class Prop:
    __hash__ = _cached_hash

    name: str


@dataclass(frozen=True)
class Not:
    __hash__ = _cached_hash

    child: "Formula"


@dataclass(frozen=True)
class And:
    __hash__ = _cached_hash

    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    __hash__ = _cached_hash

    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Diamond:
    __hash__ = _cached_hash

    grade: int
    child: "Formula"

    def __post_init__(self):
        if not isinstance(self.grade, int) or self.grade < 1:
            raise ValueError(f"diamond grade must be an integer >= 1, got {self.grade!r}")


@dataclass(frozen=True)
class Top:
    __hash__ = _cached_hash


@dataclass(frozen=True)
class Bottom:
    __hash__ = _cached_hash


Formula = Union[Prop, Not, And, Or, Diamond, Top, Bottom]
FORMULA_TYPES = (Prop, Not, And, Or, Diamond, Top, Bottom)
TRUE = Top()
FALSE = Bottom()


def conjunction(parts: Iterable[Formula]) -> Formula:
    """Right-folded conjunction; the empty conjunction is ``true``."""
    parts = list(parts)
    if not parts:
        return TRUE
    return reduce(lambda acc, f: And(f, acc), reversed(parts))


def disjunction(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return FALSE
    return reduce(lambda acc, f: Or(f, acc), reversed(parts))


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"(<>)|<\s*(\d+)\s*>|([A-Za-z_][A-Za-z0-9_]*)|(.)")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m.group(1):
            tokens.append(("DIA", 1, pos))
        elif m.group(2) is not None:
            grade = int(m.group(2))
            if grade < 1:
                raise FormulaSyntaxError("diamond grade must be at least 1", pos)
            tokens.append(("DIA", grade, pos))
        elif m.group(3):
            tokens.append(("IDENT", m.group(3), pos))
        else:
            ch = m.group(4)
            if ch not in "~&|()":
                raise FormulaSyntaxError(f"unexpected character {ch!r}", pos)
            tokens.append((ch, ch, pos))
        pos = m.end()
    tokens.append(("EOF", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def formula(self):
        node = self.conj()
        while self.peek()[0] == "|":
            self.take()
            node = Or(node, self.conj())
        return node

    def conj(self):
        node = self.unary()
        while self.peek()[0] == "&":
            self.take()
            node = And(node, self.unary())
        return node

    def unary(self):
        kind, value, pos = self.peek()
        if kind == "~":
            self.take()
            return Not(self.unary())
        if kind == "DIA":
            self.take()
            return Diamond(value, self.unary())
        return self.atom()

    def atom(self):
        kind, value, pos = self.take()
        if kind == "IDENT":
            if value == "true":
                return TRUE
            if value == "false":
                return FALSE
            return Prop(value)
        if kind == "(":
            node = self.formula()
            kind2, _, pos2 = self.take()
            if kind2 != ")":
                raise FormulaSyntaxError("expected ')'", pos2)
            return node
        if kind == "EOF":
            raise FormulaSyntaxError("unexpected end of input", pos)
        raise FormulaSyntaxError(f"unexpected token {value!r}", pos)


def parse_formula(text: str) -> Formula:
    parser = _Parser(text)
    node = parser.formula()
    kind, value, pos = parser.peek()
    if kind != "EOF":
        raise FormulaSyntaxError(f"unexpected token {value!r}", pos)
    return node


# -- printing --------------------------------------------------------------

_PREC = {Or: 1, And: 2}


def format_formula(f: Formula) -> str:
    """Print ``f`` in the concrete grammar with minimal parentheses.

    Binary bodies of unary operators are parenthesized, ``<>`` is used for
    grade 1, and ``parse_formula(format_formula(f)) == f``.
    """
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, (Not, Diamond)):
        body = format_formula(f.child)
        if isinstance(f.child, (And, Or)):
            body = f"({body})"
        op = "~" if isinstance(f, Not) else ("<>" if f.grade == 1 else f"<{f.grade}>")
        return op + body
    prec = _PREC[type(f)]
    sym = " | " if isinstance(f, Or) else " & "
    left = format_formula(f.left)
    if isinstance(f.left, (And, Or)) and _PREC[type(f.left)] < prec:
        left = f"({left})"
    right = format_formula(f.right)
    if isinstance(f.right, (And, Or)) and _PREC[type(f.right)] <= prec:
        right = f"({right})"
    return left + sym + right


# -- structure -------------------------------------------------------------


def children(f: Formula) -> tuple:
    if isinstance(f, (Not, Diamond)):
        return (f.child,)
    if isinstance(f, (And, Or)):
        return (f.left, f.right)
    return ()


def subformulas(f: Formula) -> list[Formula]:
    """Distinct subformulas in post-order (children before parents)."""
    seen: dict[Formula, None] = {}

    def walk(g):
        if g in seen:
            return
        for c in children(g):
            walk(c)
        seen[g] = None

    walk(f)
    return list(seen)


def props_of(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Prop)}


def depth(f: Formula) -> int:
    if isinstance(f, Diamond):
        return 1 + depth(f.child)
    return max((depth(c) for c in children(f)), default=0)


def max_grade(f: Formula) -> int:
    return max((g.grade for g in subformulas(f) if isinstance(g, Diamond)), default=0)


@dataclass(frozen=True)
class FragmentReport:
    in_ML: bool
    in_exists_GML: bool
    in_exists_pos_GML: bool
    in_exists_ML: bool
    in_exists_pos_ML: bool
    depth: int


def classify(f: Formula) -> FragmentReport:
    subs = subformulas(f)
    nots = [g for g in subs if isinstance(g, Not)]
    graded = any(isinstance(g, Diamond) and g.grade > 1 for g in subs)
    existential = all(isinstance(g.child, Prop) for g in nots)
    positive = not nots
    return FragmentReport(
        in_ML=not graded,
        in_exists_GML=existential,
        in_exists_pos_GML=positive,
        in_exists_ML=existential and not graded,
        in_exists_pos_ML=positive and not graded,
        depth=depth(f),
    )


# -- semantics -------------------------------------------------------------


def extension(f: Formula, m: PointedModel, cache: dict | None = None) -> frozenset:
    """Set of worlds of ``m`` where ``f`` holds.

    ``cache`` maps subformulas to extensions and may be shared between calls
    on the same model.
    """
    if isinstance(m, TreeModel):
        m = m.base
    ext: dict[Formula, frozenset] = {} if cache is None else cache
    if f in ext:
        return ext[f]
    for name in props_of(f):
        if name not in m.signature:
            raise UnknownPropositionError(f"proposition {name!r} is not in the model signature")
    succ = m.successors
    for g in subformulas(f):
        if g in ext:
            continue
        if isinstance(g, Prop):
            ext[g] = m.valuation[g.name]
        elif isinstance(g, Top):
            ext[g] = m.worlds
        elif isinstance(g, Bottom):
            ext[g] = frozenset()
        elif isinstance(g, Not):
            ext[g] = m.worlds - ext[g.child]
        elif isinstance(g, And):
            ext[g] = ext[g.left] & ext[g.right]
        elif isinstance(g, Or):
            ext[g] = ext[g.left] | ext[g.right]
        else:
            inner = ext[g.child]
            ext[g] = frozenset(
                w for w in m.worlds if sum(1 for v in succ[w] if v in inner) >= g.grade
            )
    return ext[f]


def check(f: Formula, m: PointedModel, world: str | None = None) -> bool:
    if isinstance(f, str):
        f = parse_formula(f)
    if isinstance(m, TreeModel):
        m = m.base
    return (m.point if world is None else world) in extension(f, m)
