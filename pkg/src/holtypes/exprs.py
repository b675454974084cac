"""Expression nodes of the abstract syntax tree.

Every node carries a unique integer id and a type slot that the
inference pipeline fills in (the "improved" AST).  Nodes are otherwise
immutable by convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

INTEGRAL = "integral"
BOOLEAN = "boolean"


@dataclass
class Span:
    line: int
    column: int
    end_line: int
    end_column: int

    @classmethod
    def point(cls, line, column):
        return cls(line, column, line, column)

    def to(self, other):
        return Span(self.line, self.column, other.end_line, other.end_column)


@dataclass
class Expr:
    node_id: int
    span: Span = field(default_factory=lambda: Span(0, 0, 0, 0), repr=False)
    type_slot: object = field(default=None, repr=False)

    @property
    def kind(self):
        return type(self).__name__


@dataclass
class ConstExpr(Expr):
    literal: str = ""
    literal_kind: str = INTEGRAL  # INTEGRAL or BOOLEAN


@dataclass
class VarExpr(Expr):
    name: str = ""


@dataclass
class AppExpr(Expr):
    head: str = ""
    args: list[Expr] = field(default_factory=list)


@dataclass
class IfExpr(Expr):
    # Kept for model completeness; the parser lowers if/then/else to an
    # application of the builtin If, so inference never sees this kind.
    cond: Expr = None
    then: Expr = None
    otherwise: Expr = None


@dataclass
class LambdaExpr(Expr):
    params: list[str] = field(default_factory=list)
    param_ids: list[int] = field(default_factory=list)
    body: Expr = None


@dataclass
class CaseExpr(Expr):
    scrutinee: Expr = None
    branches: list[tuple[Expr, Expr]] = field(default_factory=list)


@dataclass
class LetInExpr(Expr):
    pattern: Expr = None
    bound: Expr = None
    body: Expr = None


@dataclass
class ListExpr(Expr):
    elems: list[Expr] = field(default_factory=list)


@dataclass
class SetExpr(Expr):
    elems: list[Expr] = field(default_factory=list)


PATTERN_KINDS = (VarExpr, ConstExpr, AppExpr, ListExpr, SetExpr)


def children(e):
    """Immediate sub-expressions of ``e`` in source order."""
    if isinstance(e, AppExpr):
        return list(e.args)
    if isinstance(e, IfExpr):
        return [e.cond, e.then, e.otherwise]
    if isinstance(e, LambdaExpr):
        return [e.body]
    if isinstance(e, CaseExpr):
        out = [e.scrutinee]
        for pat, body in e.branches:
            out.append(pat)
            out.append(body)
        return out
    if isinstance(e, LetInExpr):
        return [e.pattern, e.bound, e.body]
    if isinstance(e, (ListExpr, SetExpr)):
        return list(e.elems)
    return []


def walk(e):
    """Yield ``e`` and every descendant, pre-order."""
    yield e
    for c in children(e):
        yield from walk(c)


def equal_modulo_ids(a, b):
    """Structural equality ignoring node ids, spans, and type slots."""
    if type(a) is not type(b):
        return False
    if isinstance(a, ConstExpr):
        return a.literal == b.literal and a.literal_kind == b.literal_kind
    if isinstance(a, VarExpr):
        return a.name == b.name
    if isinstance(a, AppExpr):
        if a.head != b.head or len(a.args) != len(b.args):
            return False
    if isinstance(a, LambdaExpr):
        if a.params != b.params:
            return False
    if isinstance(a, CaseExpr):
        if len(a.branches) != len(b.branches):
            return False
    if isinstance(a, (ListExpr, SetExpr)) and len(a.elems) != len(b.elems):
        return False
    ca, cb = children(a), children(b)
    return len(ca) == len(cb) and all(equal_modulo_ids(x, y) for x, y in zip(ca, cb))


def is_pattern(e):
    """True when every node of ``e`` is a kind allowed in patterns."""
    return all(isinstance(n, PATTERN_KINDS) for n in walk(e))
