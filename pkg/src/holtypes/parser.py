"""Lexer and recursive-descent parser for theory files.

A theory file is a sequence of ``datatype`` and ``fun``/``primrec``
declarations.  Declared types and equations appear inside double-quoted
strings and are re-lexed with their file position preserved, so
diagnostics point at the real location.

Expression syntax (tightest binding first):

    application by juxtaposition (arguments are atoms)
    xs ! i                 (left-assoc)
    x # xs                 (right-assoc)
    * div                  (left-assoc)
    + -                    (left-assoc)
    = <                    (left-assoc)

``if/then/else`` lowers to an application of the builtin ``If``; the
empty list ``[]`` and empty set ``{}`` lower to the nullary constructors
``Nil`` and ``EmptySet``.  ``(* ... *)`` comments nest.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ArityMismatchError, DuplicateNameError, ParseError
from .exprs import (
    AppExpr,
    BOOLEAN,
    ConstExpr,
    CaseExpr,
    Expr,
    INTEGRAL,
    LambdaExpr,
    LetInExpr,
    ListExpr,
    SetExpr,
    Span,
    VarExpr,
    walk,
)
from .types import Constructed, Fun, Prim, PRIMITIVE_NAMES, Tuple, TypeExpr, Var

KEYWORDS = frozenset(
    ["fun", "primrec", "datatype", "where", "if", "then", "else", "case", "of", "let", "in", "div"]
)

BUILTIN_CTOR_NAMES = frozenset(["Cons", "Nil", "Some", "None", "EmptySet"])

_SYMBOLS = ["=>", "::", "=", "<", "+", "-", "*", "#", "!", "|", "(", ")", "[", "]", "{", "}", ",", "."]

_OP_HEADS = frozenset(["=", "<", "+", "-", "*", "div", "#", "!"])


@dataclass
class Token:
    kind: str  # IDENT TYVAR NUMBER STRING LAMBDA SYM EOF
    value: str
    line: int
    column: int
    end_line: int = 0
    end_column: int = 0
    # For STRING tokens: position of the first content character.
    content_line: int = 0
    content_column: int = 0

    def span(self):
        return Span(self.line, self.column, self.end_line, self.end_column)


def _is_ident_start(ch):
    return ch.isalpha() or ch == "_"


def _is_ident_char(ch):
    return ch.isalnum() or ch in "_'@"


def tokenize(text, line=1, column=1):
    """Lex ``text`` into tokens, starting at the given file position."""
    tokens = []
    i = 0
    n = len(text)

    def advance_pos(lexeme, ln, col):
        for ch in lexeme:
            if ch == "\n":
                ln += 1
                col = 1
            else:
                col += 1
        return ln, col

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            line, column = advance_pos(ch, line, column)
            i += 1
            continue
        if text.startswith("(*", i):
            depth = 1
            j = i + 2
            while j < n and depth:
                if text.startswith("(*", j):
                    depth += 1
                    j += 2
                elif text.startswith("*)", j):
                    depth -= 1
                    j += 2
                else:
                    j += 1
            if depth:
                raise ParseError(line, column, "unterminated comment")
            line, column = advance_pos(text[i:j], line, column)
            i = j
            continue
        start_line, start_col = line, column
        if ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            if j >= n:
                raise ParseError(line, column, "unterminated string")
            content = text[i + 1 : j]
            cl, cc = advance_pos('"', line, column)
            line, column = advance_pos(text[i : j + 1], line, column)
            tokens.append(
                Token("STRING", content, start_line, start_col, line, column,
                      content_line=cl, content_column=cc)
            )
            i = j + 1
            continue
        if text.startswith("\\<lambda>", i):
            lexeme = "\\<lambda>"
            line, column = advance_pos(lexeme, line, column)
            tokens.append(Token("LAMBDA", lexeme, start_line, start_col, line, column))
            i += len(lexeme)
            continue
        if ch == "%":
            line, column = advance_pos(ch, line, column)
            tokens.append(Token("LAMBDA", "%", start_line, start_col, line, column))
            i += 1
            continue
        if ch == "'":
            j = i + 1
            if j >= n or not _is_ident_start(text[j]):
                raise ParseError(line, column, "expected a type variable name after '")
            while j < n and _is_ident_char(text[j]):
                j += 1
            lexeme = text[i:j]
            line, column = advance_pos(lexeme, line, column)
            tokens.append(Token("TYVAR", lexeme[1:], start_line, start_col, line, column))
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            lexeme = text[i:j]
            line, column = advance_pos(lexeme, line, column)
            tokens.append(Token("NUMBER", lexeme, start_line, start_col, line, column))
            i = j
            continue
        if _is_ident_start(ch):
            j = i
            while j < n and _is_ident_char(text[j]):
                j += 1
            lexeme = text[i:j]
            line, column = advance_pos(lexeme, line, column)
            tokens.append(Token("IDENT", lexeme, start_line, start_col, line, column))
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                line, column = advance_pos(sym, line, column)
                tokens.append(Token("SYM", sym, start_line, start_col, line, column))
                i += len(sym)
                break
        else:
            raise ParseError(line, column, f"unexpected character {ch!r}")
    tokens.append(Token("EOF", "", line, column, line, column))
    return tokens


@dataclass
class DatatypeDecl:
    name: str
    type_params: list[str]
    ctors: list[tuple[str, list[TypeExpr]]]
    span: Span = field(default_factory=lambda: Span(0, 0, 0, 0), repr=False)


@dataclass
class FunctionSpec:
    name: str
    declared_type: Fun
    equations: list[tuple[list[Expr], Expr]]
    span: Span = field(default_factory=lambda: Span(0, 0, 0, 0), repr=False)

    @property
    def param_types(self):
        return list(self.declared_type.parts[:-1])

    @property
    def return_type(self):
        return self.declared_type.parts[-1]


@dataclass
class TheoryFile:
    datatypes: list[DatatypeDecl]
    functions: list[FunctionSpec]

    def all_exprs(self):
        for f in self.functions:
            for patterns, rhs in f.equations:
                for p in patterns:
                    yield from walk(p)
                yield from walk(rhs)

    def all_node_ids(self):
        """Every node id in the theory, lambda parameter slots included."""
        for e in self.all_exprs():
            yield e.node_id
            if isinstance(e, LambdaExpr):
                yield from e.param_ids


class _TokenStream:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    @property
    def cur(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def match_sym(self, *values):
        if self.cur.kind == "SYM" and self.cur.value in values:
            return self.next()
        return None

    def match_kw(self, *words):
        if self.cur.kind == "IDENT" and self.cur.value in words:
            return self.next()
        return None

    def expect_sym(self, value, what=None):
        tok = self.match_sym(value)
        if tok is None:
            raise ParseError(
                self.cur.line, self.cur.column,
                f"expected {what or value!r}, found {self.cur.value or self.cur.kind!r}",
            )
        return tok

    def expect_ident(self, what="identifier"):
        if self.cur.kind != "IDENT":
            raise ParseError(
                self.cur.line, self.cur.column,
                f"expected {what}, found {self.cur.value or self.cur.kind!r}",
            )
        return self.next()

    def at_eof(self):
        return self.cur.kind == "EOF"


# ---------------------------------------------------------------------------
# Types


def _parse_type_primary(ts):
    tok = ts.cur
    if tok.kind == "TYVAR":
        ts.next()
        name = tok.value
        counter = None
        if ts.cur.kind == "SYM" and ts.cur.value == "#":
            ts.next()
            num = ts.cur
            if num.kind != "NUMBER":
                raise ParseError(num.line, num.column, "expected a counter after '#'")
            ts.next()
            counter = int(num.value)
        return [Var(name, counter)], False
    if tok.kind == "IDENT":
        ts.next()
        if tok.value in PRIMITIVE_NAMES:
            return [Prim(tok.value)], False
        return [Constructed((), tok.value)], False
    if tok.kind == "SYM" and tok.value == "(":
        ts.next()
        parts = [_parse_type_expr(ts)]
        while ts.match_sym(","):
            parts.append(_parse_type_expr(ts))
        ts.expect_sym(")")
        return parts, True
    raise ParseError(tok.line, tok.column, f"expected a type, found {tok.value or tok.kind!r}")


def _parse_type_postfix(ts):
    parts, grouped = _parse_type_primary(ts)
    first = True
    while ts.cur.kind == "IDENT" and ts.cur.value not in KEYWORDS:
        ctor = ts.next().value
        if first and grouped:
            parts = [Constructed(tuple(parts), ctor)]
        else:
            if len(parts) != 1:
                break
            parts = [Constructed((parts[0],), ctor)]
        first = False
    if len(parts) == 1:
        return parts[0]
    if len(parts) == 2:
        return Tuple(parts[0], parts[1])
    raise ParseError(ts.cur.line, ts.cur.column, "tuple types are binary; did you mean a constructor application?")


def _parse_type_expr(ts):
    parts = [_parse_type_postfix(ts)]
    while ts.match_sym("=>"):
        parts.append(_parse_type_postfix(ts))
    if len(parts) == 1:
        return parts[0]
    return Fun(tuple(parts))


def parse_type(text, line=1, column=1):
    """Parse a type expression from concrete syntax."""
    ts = _TokenStream(tokenize(text, line, column))
    try:
        t = _parse_type_expr(ts)
    except ValueError as err:
        raise ParseError(ts.cur.line, ts.cur.column, str(err)) from None
    if not ts.at_eof():
        tok = ts.cur
        raise ParseError(tok.line, tok.column, f"unexpected {tok.value!r} after type")
    return t


# ---------------------------------------------------------------------------
# Expressions


class _ExprParser:
    """Parses the expression language inside equation strings."""

    def __init__(self, ts, ids, known_ctors):
        self.ts = ts
        self.ids = ids
        self.known_ctors = known_ctors

    def fresh(self):
        return self.ids.fresh()

    # -- patterns ----------------------------------------------------------

    def parse_pattern(self):
        left = self.parse_pattern_app()
        if self.ts.cur.kind == "SYM" and self.ts.cur.value == "#":
            op = self.ts.next()
            right = self.parse_pattern()
            return AppExpr(self.fresh(), left.span.to(right.span), head="#", args=[left, right])
        return left

    def parse_pattern_app(self):
        tok = self.ts.cur
        if tok.kind == "IDENT" and tok.value not in KEYWORDS and tok.value not in ("True", "False"):
            head = self.ts.next()
            args = []
            while self._at_pattern_atom():
                args.append(self.parse_pattern_atom())
            if args:
                span = head.span().to(args[-1].span)
                return AppExpr(self.fresh(), span, head=head.value, args=args)
            return self._name_pattern(head)
        return self.parse_pattern_atom()

    def _at_pattern_atom(self):
        tok = self.ts.cur
        if tok.kind in ("IDENT", "NUMBER"):
            return tok.kind == "NUMBER" or tok.value not in KEYWORDS
        return tok.kind == "SYM" and tok.value in ("(", "[", "{")

    def _name_pattern(self, tok):
        # A bare constructor name in a pattern is a nullary construction,
        # not a variable binding.
        if tok.value in self.known_ctors:
            return AppExpr(self.fresh(), tok.span(), head=tok.value, args=[])
        return VarExpr(self.fresh(), tok.span(), name=tok.value)

    def _name_expr(self, tok):
        if tok.value in self.known_ctors:
            return AppExpr(self.fresh(), tok.span(), head=tok.value, args=[])
        return VarExpr(self.fresh(), tok.span(), name=tok.value)

    def parse_pattern_atom(self):
        tok = self.ts.cur
        if tok.kind == "NUMBER":
            self.ts.next()
            return ConstExpr(self.fresh(), tok.span(), literal=tok.value, literal_kind=INTEGRAL)
        if tok.kind == "IDENT":
            if tok.value in ("True", "False"):
                self.ts.next()
                return ConstExpr(self.fresh(), tok.span(), literal=tok.value, literal_kind=BOOLEAN)
            if tok.value in KEYWORDS:
                raise ParseError(tok.line, tok.column, f"{tok.value!r} is not valid in a pattern")
            self.ts.next()
            return self._name_pattern(tok)
        if tok.kind == "SYM" and tok.value == "(":
            self.ts.next()
            inner = self.parse_pattern()
            close = self.ts.expect_sym(")")
            inner.span = tok.span().to(close.span())
            return inner
        if tok.kind == "SYM" and tok.value == "[":
            return self._bracketed_pattern("[", "]", ListExpr, "Nil")
        if tok.kind == "SYM" and tok.value == "{":
            return self._bracketed_pattern("{", "}", SetExpr, "EmptySet")
        raise ParseError(tok.line, tok.column, f"expected a pattern, found {tok.value or tok.kind!r}")

    def _bracketed_pattern(self, open_sym, close_sym, node_cls, empty_ctor):
        open_tok = self.ts.expect_sym(open_sym)
        elems = []
        if not (self.ts.cur.kind == "SYM" and self.ts.cur.value == close_sym):
            elems.append(self.parse_pattern())
            while self.ts.match_sym(","):
                elems.append(self.parse_pattern())
        close = self.ts.expect_sym(close_sym)
        span = open_tok.span().to(close.span())
        if not elems:
            return AppExpr(self.fresh(), span, head=empty_ctor, args=[])
        return node_cls(self.fresh(), span, elems=elems)

    # -- expressions -------------------------------------------------------

    def parse_expr(self):
        tok = self.ts.cur
        if tok.kind == "LAMBDA":
            return self.parse_lambda()
        if tok.kind == "IDENT" and tok.value == "let":
            return self.parse_let()
        if tok.kind == "IDENT" and tok.value == "case":
            return self.parse_case()
        if tok.kind == "IDENT" and tok.value == "if":
            return self.parse_if()
        return self.parse_cmp()

    def parse_lambda(self):
        lam = self.ts.next()
        params = []
        while self.ts.cur.kind == "IDENT" and self.ts.cur.value not in KEYWORDS:
            params.append(self.ts.next().value)
        if not params:
            raise ParseError(self.ts.cur.line, self.ts.cur.column, "lambda needs at least one parameter")
        self.ts.expect_sym(".", "'.' after lambda parameters")
        body = self.parse_expr()
        param_ids = [self.fresh() for _ in params]
        return LambdaExpr(self.fresh(), lam.span().to(body.span),
                          params=params, param_ids=param_ids, body=body)

    def parse_let(self):
        kw = self.ts.next()
        pattern = self.parse_pattern()
        self.ts.expect_sym("=", "'=' in let binding")
        bound = self.parse_expr()
        if not self.ts.match_kw("in"):
            raise ParseError(self.ts.cur.line, self.ts.cur.column, "expected 'in'")
        body = self.parse_expr()
        return LetInExpr(self.fresh(), kw.span().to(body.span),
                         pattern=pattern, bound=bound, body=body)

    def parse_case(self):
        kw = self.ts.next()
        scrutinee = self.parse_expr()
        if not self.ts.match_kw("of"):
            raise ParseError(self.ts.cur.line, self.ts.cur.column, "expected 'of'")
        branches = []
        while True:
            pattern = self.parse_pattern()
            self.ts.expect_sym("=>", "'=>' in case branch")
            body = self.parse_expr()
            branches.append((pattern, body))
            if not self.ts.match_sym("|"):
                break
        span = kw.span().to(branches[-1][1].span)
        return CaseExpr(self.fresh(), span, scrutinee=scrutinee, branches=branches)

    def parse_if(self):
        kw = self.ts.next()
        cond = self.parse_expr()
        if not self.ts.match_kw("then"):
            raise ParseError(self.ts.cur.line, self.ts.cur.column, "expected 'then'")
        then = self.parse_expr()
        if not self.ts.match_kw("else"):
            raise ParseError(self.ts.cur.line, self.ts.cur.column, "expected 'else'")
        otherwise = self.parse_expr()
        # One inference path for both spellings: If is an ordinary builtin.
        span = kw.span().to(otherwise.span)
        return AppExpr(self.fresh(), span, head="If", args=[cond, then, otherwise])

    def _binop(self, parse_operand, ops):
        left = parse_operand()
        while True:
            tok = self.ts.cur
            is_sym = tok.kind == "SYM" and tok.value in ops
            is_kw = tok.kind == "IDENT" and tok.value in ops
            if not (is_sym or is_kw):
                return left
            self.ts.next()
            right = parse_operand()
            left = AppExpr(self.fresh(), left.span.to(right.span), head=tok.value, args=[left, right])

    def parse_cmp(self):
        return self._binop(self.parse_add, ("=", "<"))

    def parse_add(self):
        return self._binop(self.parse_mul, ("+", "-"))

    def parse_mul(self):
        return self._binop(self.parse_cons, ("*", "div"))

    def parse_cons(self):
        left = self.parse_index()
        if self.ts.cur.kind == "SYM" and self.ts.cur.value == "#":
            self.ts.next()
            right = self.parse_cons()
            return AppExpr(self.fresh(), left.span.to(right.span), head="#", args=[left, right])
        return left

    def parse_index(self):
        return self._binop(self.parse_app, ("!",))

    def parse_app(self):
        tok = self.ts.cur
        if tok.kind == "IDENT" and tok.value not in KEYWORDS and tok.value not in ("True", "False"):
            head = self.ts.next()
            args = []
            while self._at_atom():
                args.append(self.parse_atom())
            if args:
                return AppExpr(self.fresh(), head.span().to(args[-1].span),
                               head=head.value, args=args)
            return self._name_expr(head)
        atom = self.parse_atom()
        if self._at_atom():
            nxt = self.ts.cur
            raise ParseError(nxt.line, nxt.column, "application head must be an identifier")
        return atom

    def _at_atom(self):
        tok = self.ts.cur
        if tok.kind == "NUMBER" or tok.kind == "LAMBDA":
            return True
        if tok.kind == "IDENT":
            return tok.value not in KEYWORDS
        return tok.kind == "SYM" and tok.value in ("(", "[", "{")

    def parse_atom(self):
        tok = self.ts.cur
        if tok.kind == "NUMBER":
            self.ts.next()
            return ConstExpr(self.fresh(), tok.span(), literal=tok.value, literal_kind=INTEGRAL)
        if tok.kind == "IDENT":
            if tok.value in ("True", "False"):
                self.ts.next()
                return ConstExpr(self.fresh(), tok.span(), literal=tok.value, literal_kind=BOOLEAN)
            if tok.value in KEYWORDS:
                raise ParseError(tok.line, tok.column, f"unexpected keyword {tok.value!r}")
            self.ts.next()
            return self._name_expr(tok)
        if tok.kind == "LAMBDA":
            return self.parse_lambda()
        if tok.kind == "SYM" and tok.value == "(":
            self.ts.next()
            inner = self.parse_expr()
            if self.ts.cur.kind == "SYM" and self.ts.cur.value == ",":
                raise ParseError(self.ts.cur.line, self.ts.cur.column,
                                 "tuple expressions are not supported")
            close = self.ts.expect_sym(")")
            inner.span = tok.span().to(close.span())
            return inner
        if tok.kind == "SYM" and tok.value == "[":
            return self._bracketed_expr("[", "]", ListExpr, "Nil")
        if tok.kind == "SYM" and tok.value == "{":
            return self._bracketed_expr("{", "}", SetExpr, "EmptySet")
        raise ParseError(tok.line, tok.column, f"expected an expression, found {tok.value or tok.kind!r}")

    def _bracketed_expr(self, open_sym, close_sym, node_cls, empty_ctor):
        open_tok = self.ts.expect_sym(open_sym)
        elems = []
        if not (self.ts.cur.kind == "SYM" and self.ts.cur.value == close_sym):
            elems.append(self.parse_expr())
            while self.ts.match_sym(","):
                elems.append(self.parse_expr())
        close = self.ts.expect_sym(close_sym)
        span = open_tok.span().to(close.span())
        if not elems:
            return AppExpr(self.fresh(), span, head=empty_ctor, args=[])
        return node_cls(self.fresh(), span, elems=elems)


class _IdAllocator:
    def __init__(self):
        self.next_id = 0

    def fresh(self):
        nid = self.next_id
        self.next_id += 1
        return nid


# ---------------------------------------------------------------------------
# Theory files


def _validate_declared_type(t, tok):
    for v in _collect_vars(t):
        if v.counter is not None:
            raise ParseError(tok.line, tok.column,
                             "modification suffixes ('#') are reserved for the inference engine")


def _collect_vars(t):
    from .types import free_type_vars

    return free_type_vars(t)


def _parse_datatype(ts, ids, known_ctors, declared):
    kw = ts.next()  # 'datatype'
    type_params = []
    if ts.cur.kind == "TYVAR":
        tok = ts.next()
        type_params.append(tok.value)
    elif ts.cur.kind == "SYM" and ts.cur.value == "(":
        ts.next()
        while True:
            tok = ts.cur
            if tok.kind != "TYVAR":
                raise ParseError(tok.line, tok.column, "expected a type variable")
            type_params.append(ts.next().value)
            if not ts.match_sym(","):
                break
        ts.expect_sym(")")
    name_tok = ts.expect_ident("datatype name")
    name = name_tok.value
    if name in declared:
        raise DuplicateNameError(name)
    declared.add(name)
    ts.expect_sym("=", "'=' after datatype name")
    ctors = []
    param_set = set(type_params)
    while True:
        ctor_tok = ts.expect_ident("constructor name")
        if ctor_tok.value in declared or ctor_tok.value in known_ctors:
            raise DuplicateNameError(ctor_tok.value)
        arg_types = []
        while True:
            tok = ts.cur
            if tok.kind == "STRING":
                ts.next()
                arg_types.append(parse_type(tok.value, tok.content_line, tok.content_column))
            elif tok.kind == "TYVAR":
                ts.next()
                arg_types.append(Var(tok.value))
            elif tok.kind == "IDENT" and tok.value not in KEYWORDS:
                ts.next()
                if tok.value in PRIMITIVE_NAMES:
                    arg_types.append(Prim(tok.value))
                else:
                    try:
                        arg_types.append(Constructed((), tok.value))
                    except ValueError:
                        raise ParseError(
                            tok.line, tok.column,
                            f"quote compound argument types: \"... {tok.value}\"",
                        ) from None
            else:
                break
        for at in arg_types:
            _validate_declared_type(at, ctor_tok)
            for v in _collect_vars(at):
                if v.name not in param_set:
                    raise ParseError(
                        ctor_tok.line, ctor_tok.column,
                        f"type variable '{v.name} not among the datatype parameters",
                    )
        ctors.append((ctor_tok.value, arg_types))
        declared.add(ctor_tok.value)
        known_ctors.add(ctor_tok.value)
        if not ts.match_sym("|"):
            break
    return DatatypeDecl(name, type_params, ctors, kw.span().to(ts.tokens[ts.pos - 1].span()))


def _parse_equation(text, line, column, ids, known_ctors):
    ts = _TokenStream(tokenize(text, line, column))
    ep = _ExprParser(ts, ids, known_ctors)
    head = ts.expect_ident("function name")
    patterns = []
    while not (ts.cur.kind == "SYM" and ts.cur.value == "="):
        if ts.at_eof():
            raise ParseError(ts.cur.line, ts.cur.column, "expected '=' in equation")
        patterns.append(ep.parse_pattern_atom())
    ts.expect_sym("=")
    rhs = ep.parse_expr()
    if not ts.at_eof():
        tok = ts.cur
        raise ParseError(tok.line, tok.column, f"unexpected {tok.value!r} after equation")
    return head.value, patterns, rhs


def _parse_function(ts, ids, known_ctors, declared):
    kw = ts.next()  # 'fun' or 'primrec'
    name_tok = ts.expect_ident("function name")
    name = name_tok.value
    if name in declared:
        raise DuplicateNameError(name)
    ts.expect_sym("::", "'::' after function name")
    type_tok = ts.cur
    if type_tok.kind != "STRING":
        raise ParseError(type_tok.line, type_tok.column, "expected a quoted type")
    ts.next()
    declared_type = parse_type(type_tok.value, type_tok.content_line, type_tok.content_column)
    _validate_declared_type(declared_type, type_tok)
    if not isinstance(declared_type, Fun):
        raise ParseError(type_tok.line, type_tok.column,
                         f"function {name!r} needs a function type")
    if not ts.match_kw("where"):
        raise ParseError(ts.cur.line, ts.cur.column, "expected 'where'")
    declared.add(name)
    n_params = len(declared_type.parts) - 1
    equations = []
    while True:
        eq_tok = ts.cur
        if eq_tok.kind != "STRING":
            raise ParseError(eq_tok.line, eq_tok.column, "expected a quoted equation")
        ts.next()
        head, patterns, rhs = _parse_equation(
            eq_tok.value, eq_tok.content_line, eq_tok.content_column, ids, known_ctors
        )
        if head != name:
            raise ParseError(eq_tok.line, eq_tok.column,
                             f"equation head {head!r} does not match function {name!r}")
        if len(patterns) != n_params:
            raise ArityMismatchError(name, n_params, len(patterns),
                                     eq_tok.line, eq_tok.column)
        equations.append((patterns, rhs))
        if not ts.match_sym("|"):
            break
    return FunctionSpec(name, declared_type, equations,
                        kw.span().to(ts.tokens[ts.pos - 1].span()))


def parse_theory(text):
    """Parse a theory file into declarations with fresh node ids."""
    ts = _TokenStream(tokenize(text))
    ids = _IdAllocator()
    known_ctors = set(BUILTIN_CTOR_NAMES)
    declared = set()
    datatypes = []
    functions = []
    while not ts.at_eof():
        tok = ts.cur
        if tok.kind == "IDENT" and tok.value == "datatype":
            datatypes.append(_parse_datatype(ts, ids, known_ctors, declared))
        elif tok.kind == "IDENT" and tok.value in ("fun", "primrec"):
            functions.append(_parse_function(ts, ids, known_ctors, declared))
        else:
            raise ParseError(tok.line, tok.column,
                             f"expected 'datatype', 'fun' or 'primrec', found {tok.value or tok.kind!r}")
    return TheoryFile(datatypes, functions)
