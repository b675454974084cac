"""Renderers for typed specifications: plain source text, annotated text
with a type on every sub-expression, a JSON dump, and C++ type strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import RenderError
from .exprs import (
    AppExpr,
    CaseExpr,
    ConstExpr,
    IfExpr,
    LambdaExpr,
    LetInExpr,
    ListExpr,
    SetExpr,
    VarExpr,
)
from .types import (
    BOTTOM,
    Bottom,
    Constructed,
    Fun,
    Prim,
    Tuple,
    Var,
    format_type,
)

JSON_SCHEMA_VERSION = 1

# Binding levels, loosest first: prefix forms, comparisons, additive,
# multiplicative, cons, indexing, application, atoms.
_OP_LEVELS = {"=": 1, "<": 1, "+": 2, "-": 2, "*": 3, "div": 3, "#": 4, "!": 5}
_RIGHT_ASSOC = frozenset(["#"])
_PREFIX_LEVEL = 0
_APP_LEVEL = 6
_ATOM_LEVEL = 7


def format_expr(e, level=0):
    """Render an expression back into parseable source text."""
    text, own = _format(e)
    if own < level:
        return f"({text})"
    return text


def _format(e):
    if isinstance(e, ConstExpr):
        return e.literal, _ATOM_LEVEL
    if isinstance(e, VarExpr):
        return e.name, _ATOM_LEVEL
    if isinstance(e, AppExpr):
        if not e.args:
            return e.head, _ATOM_LEVEL
        if e.head in _OP_LEVELS and len(e.args) == 2:
            lvl = _OP_LEVELS[e.head]
            if e.head in _RIGHT_ASSOC:
                left = format_expr(e.args[0], lvl + 1)
                right = format_expr(e.args[1], lvl)
            else:
                left = format_expr(e.args[0], lvl)
                right = format_expr(e.args[1], lvl + 1)
            return f"{left} {e.head} {right}", lvl
        args = " ".join(format_expr(a, _ATOM_LEVEL) for a in e.args)
        return f"{e.head} {args}", _APP_LEVEL
    if isinstance(e, IfExpr):
        parts = (format_expr(e.cond, 1), format_expr(e.then, 1), format_expr(e.otherwise, 0))
        return f"if {parts[0]} then {parts[1]} else {parts[2]}", _PREFIX_LEVEL
    if isinstance(e, LambdaExpr):
        params = " ".join(e.params)
        return f"\\<lambda>{params}. {format_expr(e.body, 0)}", _PREFIX_LEVEL
    if isinstance(e, CaseExpr):
        scrut = format_expr(e.scrutinee, 1)
        branches = " | ".join(
            f"{format_expr(p, 1)} => {format_expr(b, 1)}" for p, b in e.branches
        )
        return f"case {scrut} of {branches}", _PREFIX_LEVEL
    if isinstance(e, LetInExpr):
        pat = format_expr(e.pattern, 1)
        bound = format_expr(e.bound, 1)
        return f"let {pat} = {bound} in {format_expr(e.body, 0)}", _PREFIX_LEVEL
    if isinstance(e, ListExpr):
        return "[" + ", ".join(format_expr(x, 0) for x in e.elems) + "]", _ATOM_LEVEL
    if isinstance(e, SetExpr):
        return "{" + ", ".join(format_expr(x, 0) for x in e.elems) + "}", _ATOM_LEVEL
    raise RenderError(f"cannot render {e!r}")


def annotated_type(t):
    """Render a type with constructed types parenthesized as ``('a )list``."""
    if isinstance(t, Var):
        return format_type(t)
    if isinstance(t, Prim):
        return t.name
    if isinstance(t, Bottom):
        return "<error>"
    if isinstance(t, Fun):
        return "(" + " => ".join(annotated_type(p) for p in t.parts) + ")"
    if isinstance(t, Tuple):
        return f"({annotated_type(t.left)}, {annotated_type(t.right)})"
    if isinstance(t, Constructed):
        if not t.args:
            return t.ctor
        inner = ", ".join(annotated_type(a) for a in t.args)
        return f"({inner} ){t.ctor}"
    raise RenderError(f"cannot render {t!r}")


def _annotate(e, types):
    t = annotated_type(types.get(e.node_id, BOTTOM))
    if isinstance(e, ConstExpr):
        return f"({e.literal} :: {t})"
    if isinstance(e, VarExpr):
        return f"({e.name} :: {t})"
    if isinstance(e, AppExpr):
        if not e.args:
            return f"({e.head} :: {t})"
        if e.head in _OP_LEVELS and len(e.args) == 2:
            inner = f"{_annotate(e.args[0], types)} {e.head} {_annotate(e.args[1], types)}"
        else:
            inner = e.head + " " + " ".join(_annotate(a, types) for a in e.args)
        return f"(({inner}) :: {t})"
    if isinstance(e, LambdaExpr):
        params = " ".join(e.params)
        return f"(\\<lambda>{params}.{_annotate(e.body, types)} :: {t})"
    if isinstance(e, ListExpr):
        inner = "[" + ", ".join(_annotate(x, types) for x in e.elems) + "]"
        return f"({inner} :: {t})"
    if isinstance(e, SetExpr):
        inner = "{" + ", ".join(_annotate(x, types) for x in e.elems) + "}"
        return f"({inner} :: {t})"
    if isinstance(e, CaseExpr):
        branches = " | ".join(
            f"{_annotate(p, types)} => {_annotate(b, types)}" for p, b in e.branches
        )
        inner = f"case {_annotate(e.scrutinee, types)} of {branches}"
        return f"(({inner}) :: {t})"
    if isinstance(e, LetInExpr):
        inner = (f"let {_annotate(e.pattern, types)} = {_annotate(e.bound, types)} "
                 f"in {_annotate(e.body, types)}")
        return f"(({inner}) :: {t})"
    raise RenderError(f"cannot annotate {e!r}")


def emit_annotated(typed_spec):
    """The specification with every sub-expression printed as
    ``(expr :: type)``."""
    spec = typed_spec.spec
    lines = [spec.name]
    for patterns, rhs in spec.equations:
        pats = " ".join(_annotate(p, typed_spec.node_types) for p in patterns)
        lhs = f"{spec.name} {pats}".rstrip()
        lines.append(f"{lhs} = {_annotate(rhs, typed_spec.node_types)}")
    return "\n".join(lines)


def _node_doc(e, types):
    doc = {"node_id": e.node_id, "kind": e.kind}
    if isinstance(e, ConstExpr):
        doc["literal"] = e.literal
        doc["literal_kind"] = e.literal_kind
    elif isinstance(e, VarExpr):
        doc["name"] = e.name
    elif isinstance(e, AppExpr):
        doc["head"] = e.head
    elif isinstance(e, LambdaExpr):
        doc["params"] = list(e.params)
    doc["type"] = format_type(types.get(e.node_id, BOTTOM))
    doc["span"] = {
        "line": e.span.line,
        "column": e.span.column,
        "end_line": e.span.end_line,
        "end_column": e.span.end_column,
    }
    from .exprs import children

    doc["children"] = [_node_doc(c, types) for c in children(e)]
    return doc


def emit_json(typed_spec):
    """A machine-readable dump of one typed specification.

    Key order is fixed, so re-serialising a parsed document reproduces
    the text byte for byte.
    """
    spec = typed_spec.spec
    doc = {
        "schema_version": JSON_SCHEMA_VERSION,
        "function": spec.name,
        "declared_type": format_type(spec.declared_type),
        "equations": [
            {
                "patterns": [_node_doc(p, typed_spec.node_types) for p in patterns],
                "rhs": _node_doc(rhs, typed_spec.node_types),
            }
            for patterns, rhs in spec.equations
        ],
        "diagnostics": [
            {"node_id": d.node_id, "kind": d.kind, "message": d.message}
            for d in typed_spec.diagnostics
        ],
    }
    return json.dumps(doc, indent=2)


_DEFAULT_HEADS = {
    "nat": "std::uint64_t",
    "bool": "bool",
    "list": "std::deque<{0}>",
    "option": "std::optional<{0}>",
    "set": "std::set<{0}>",
}


@dataclass
class CppTypeMap:
    """Rendering templates per type head; positional placeholders take
    the rendered type arguments."""

    heads: dict[str, str] = field(default_factory=lambda: dict(_DEFAULT_HEADS))
    function_template: str = "std::function<{ret}({args})>"

    def with_overrides(self, **heads):
        merged = dict(self.heads)
        merged.update(heads)
        return CppTypeMap(merged, self.function_template)


def _collect_vars_in_order(t, order):
    if isinstance(t, Var):
        if t not in order:
            order[t] = f"T{len(order) + 1}"
    elif isinstance(t, Fun):
        for p in t.parts:
            _collect_vars_in_order(p, order)
    elif isinstance(t, Tuple):
        _collect_vars_in_order(t.left, order)
        _collect_vars_in_order(t.right, order)
    elif isinstance(t, Constructed):
        for a in t.args:
            _collect_vars_in_order(a, order)


def render_cpp_type(t, cpp_map=None, var_names=None):
    """Render a type as a C++ type string.

    Type variables become template parameter names (T1, T2, ...) in
    first-occurrence order; pass a shared ``var_names`` dict to keep the
    naming consistent across the types of one signature.
    """
    if isinstance(t, Bottom):
        raise RenderError("cannot render the error type")
    cpp_map = cpp_map if cpp_map is not None else CppTypeMap()
    names = var_names if var_names is not None else {}
    _collect_vars_in_order(t, names)

    def go(t):
        if isinstance(t, Var):
            return names[t]
        if isinstance(t, Prim):
            if t.name not in cpp_map.heads:
                raise RenderError(f"no C++ mapping for primitive {t.name!r}")
            return cpp_map.heads[t.name]
        if isinstance(t, Fun):
            ret = go(t.parts[-1])
            args = ", ".join(go(p) for p in t.parts[:-1])
            return cpp_map.function_template.format(ret=ret, args=args)
        if isinstance(t, Tuple):
            if "tuple" not in cpp_map.heads:
                raise RenderError("no C++ mapping for tuple types")
            return cpp_map.heads["tuple"].format(go(t.left), go(t.right))
        if isinstance(t, Constructed):
            if t.ctor not in cpp_map.heads:
                raise RenderError(f"no C++ mapping for type constructor {t.ctor!r}")
            return cpp_map.heads[t.ctor].format(*(go(a) for a in t.args))
        if isinstance(t, Bottom):
            raise RenderError("cannot render the error type")
        raise RenderError(f"cannot render {t!r}")

    return go(t)


def render_cpp_signature(spec, cpp_map=None):
    """One C++ declaration line for a function's declared type."""
    names = {}
    _collect_vars_in_order(spec.declared_type, names)
    ret = render_cpp_type(spec.return_type, cpp_map, names)
    params = ", ".join(render_cpp_type(p, cpp_map, names) for p in spec.param_types)
    return f"{ret} {spec.name}({params});"
