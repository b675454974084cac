"""The inference pipeline: pattern type extraction, bottom-up inference,
and top-down completion, run per function equation.

Each equation is processed in three stages: its patterns are bound to the
declared parameter types and decomposed, the right-hand side is inferred
bottom-up with unification, and the declared return type is pushed back
down to complete types that bottom-up inference left abstract.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    ConflictError,
    OccursError,
    UnificationError,
    UnknownNameError,
)
from .exprs import (
    AppExpr,
    CaseExpr,
    ConstExpr,
    INTEGRAL,
    LambdaExpr,
    LetInExpr,
    ListExpr,
    SetExpr,
    VarExpr,
    walk,
)
from .registry import SolverRegistry
from .types import (
    BOTTOM,
    Bottom,
    Constructed,
    Fun,
    LAMBDA_NAMESPACE,
    Prim,
    TypeContext,
    Var,
    apply_subst,
    apply_subst_ctx,
    format_type,
    list_of,
    set_of,
)
from .unify import Relation, compare, reduce, unify_abs, unify_app

MISMATCH = "mismatch"
OCCURS = "occurs"
CONFLICT = "conflict"
UNKNOWN_NAME = "unknown-name"
UNSUPPORTED = "unsupported"


@dataclass
class Diagnostic:
    node_id: int
    kind: str
    message: str


def _kind_for(err):
    if isinstance(err, OccursError):
        return OCCURS
    if isinstance(err, ConflictError):
        return CONFLICT
    if isinstance(err, UnknownNameError):
        return UNKNOWN_NAME
    return MISMATCH


@dataclass
class TypedSpec:
    """A function specification together with its inferred node types."""

    spec: object
    node_types: dict[int, object]
    diagnostics: list[Diagnostic]

    def type_of(self, node_id):
        return self.node_types.get(node_id)

    def bottom_nodes(self):
        return sorted(nid for nid, t in self.node_types.items() if isinstance(t, Bottom))

    def is_clean(self):
        return not self.diagnostics


class InferenceSession:
    """Mutable state for inferring one theory: the context, the error
    list, the lambda placeholder counter, and rule tracing."""

    def __init__(self, registry, trace=False):
        self.registry = registry
        self.ctx = TypeContext()
        self.errors: list[Diagnostic] = []
        self.lambda_counter = 0
        self.trace: list[str] | None = [] if trace else None
        self.td_replacements: list[tuple[int, object, object]] = []
        self._app_parts: dict[int, list] = {}

    def diagnose(self, node_id, kind, message):
        self.errors.append(Diagnostic(node_id, kind, message))

    def diagnose_unification(self, node_id, err):
        self.diagnose(node_id, _kind_for(err), str(err))

    def apply_substitution(self, subst):
        # Rewrite in place: callers hold references to the context across
        # substitution steps.
        self.ctx.node_types = apply_subst_ctx(subst, self.ctx).node_types
        self._app_parts = {
            nid: [apply_subst(subst, p) for p in parts]
            for nid, parts in self._app_parts.items()
        }

    def set_app_parts(self, node_id, parts):
        self._app_parts[node_id] = list(parts)

    def app_parts(self, node_id):
        return self._app_parts.get(node_id)

    def fresh_placeholder(self):
        v = Var(f"{LAMBDA_NAMESPACE}{self.lambda_counter}")
        self.lambda_counter += 1
        return v

    def trace_rule(self, rule, node_id, before, after):
        if self.trace is not None:
            b = format_type(before) if before is not None else "-"
            a = format_type(after) if after is not None else "-"
            self.trace.append(f"{rule} @ {node_id} : {b} ⟶ {a}")


def _poison(sess, e):
    """Mark a pattern node and everything below it as failed."""
    for node in walk(e):
        sess.ctx.set_type(node.node_id, BOTTOM)
        if isinstance(node, VarExpr):
            sess.ctx.bind(node.name, node.node_id)


def extract_pattern_types(sess, pattern):
    """Walk a pattern whose own type is already in the context, assigning
    types to its parameters by decomposing the constructor's scheme."""
    ctx = sess.ctx
    expected = ctx.type_of(pattern.node_id)
    if isinstance(expected, Bottom):
        _poison(sess, pattern)
        return
    if isinstance(pattern, VarExpr):
        ctx.bind(pattern.name, pattern.node_id)
        return
    if isinstance(pattern, ConstExpr):
        return
    if isinstance(pattern, AppExpr):
        try:
            inst = sess.registry.instantiate(pattern.head)
        except UnknownNameError as err:
            sess.diagnose_unification(pattern.node_id, err)
            _poison(sess, pattern)
            return
        if pattern.args:
            if not isinstance(inst, Fun) or len(inst.parts) - 1 != len(pattern.args):
                sess.diagnose(pattern.node_id, MISMATCH,
                              f"constructor {pattern.head!r} does not take {len(pattern.args)} argument(s)")
                _poison(sess, pattern)
                return
            ret = inst.parts[-1]
        else:
            ret = inst
        subst = None
        for left, right in ((ret, expected), (expected, ret)):
            if compare(left, right).holds():
                try:
                    subst = reduce(left, right)
                    break
                except UnificationError:
                    continue
        if subst is None:
            sess.diagnose(pattern.node_id, MISMATCH,
                          f"pattern {pattern.head!r} has type {ret}, expected {expected}")
            _poison(sess, pattern)
            return
        sess.apply_substitution(subst)
        for arg, part in zip(pattern.args, inst.parts[:-1] if pattern.args else ()):
            t = apply_subst(subst, part)
            ctx.set_type(arg.node_id, t)
            sess.trace_rule("EX-App", arg.node_id, None, t)
            extract_pattern_types(sess, arg)
        return
    if isinstance(pattern, (ListExpr, SetExpr)):
        ctor = "list" if isinstance(pattern, ListExpr) else "set"
        rule = "List-TD" if ctor == "list" else "Set-TD"
        if not (isinstance(expected, Constructed) and expected.ctor == ctor):
            sess.diagnose(pattern.node_id, MISMATCH,
                          f"{ctor} pattern cannot have type {expected}")
            _poison(sess, pattern)
            return
        for elem in pattern.elems:
            elem_type = ctx.type_of(pattern.node_id).args[0]
            ctx.set_type(elem.node_id, elem_type)
            sess.trace_rule(rule, elem.node_id, None, elem_type)
            extract_pattern_types(sess, elem)
        return
    ctx.set_type(pattern.node_id, BOTTOM)
    sess.diagnose(pattern.node_id, UNSUPPORTED,
                  f"{pattern.kind} is not valid in a pattern")


def _unify_against(sess, node, target_of):
    """Unify one node's type with a target read afresh from the context
    (both directions), degrading the node to the error type on failure."""
    sigma = sess.ctx.type_of(node.node_id)
    tau = target_of()
    if isinstance(sigma, Bottom) or isinstance(tau, Bottom):
        return
    if sigma == tau:
        return
    for left, right in ((sigma, tau), (tau, sigma)):
        if compare(left, right).holds():
            try:
                subst = reduce(left, right)
            except UnificationError as err:
                sess.diagnose_unification(node.node_id, err)
                sess.ctx.set_type(node.node_id, BOTTOM)
                return
            sess.apply_substitution(subst)
            return
    sess.diagnose(node.node_id, MISMATCH,
                  f"type {sigma} does not agree with {tau}")
    sess.ctx.set_type(node.node_id, BOTTOM)


def bottom_up(sess, e):
    """Infer the type of ``e`` from its sub-expressions, unifying the
    inferred and positional types of applications and lambdas."""
    ctx = sess.ctx

    if isinstance(e, AppExpr):
        for arg in e.args:
            bottom_up(sess, arg)
        binder = ctx.resolve(e.head)
        if binder is not None:
            # The head is pattern- or lambda-bound: it has its actual
            # type and is not freshened.
            head_type = ctx.type_of(binder)
        elif e.head in sess.registry:
            head_type = sess.registry.instantiate(e.head)
        else:
            sess.diagnose(e.node_id, UNKNOWN_NAME,
                          f"unknown function or constructor: {e.head!r}")
            ctx.set_type(e.node_id, BOTTOM)
            return
        if isinstance(head_type, Bottom) or any(
            isinstance(ctx.type_of(a.node_id), Bottom) for a in e.args
        ):
            ctx.set_type(e.node_id, BOTTOM)
            return
        if not e.args:
            ctx.set_type(e.node_id, head_type)
            sess.set_app_parts(e.node_id, [head_type])
            sess.trace_rule("App-BU", e.node_id, None, head_type)
            return
        n_args = len(e.args)
        if not isinstance(head_type, Fun):
            sess.diagnose(e.node_id, MISMATCH,
                          f"{e.head!r} of type {head_type} is applied to arguments")
            ctx.set_type(e.node_id, BOTTOM)
            return
        if n_args > len(head_type.parts) - 1:
            sess.diagnose(e.node_id, MISMATCH,
                          f"{e.head!r} takes {len(head_type.parts) - 1} argument(s), got {n_args}")
            ctx.set_type(e.node_id, BOTTOM)
            return
        if n_args == len(head_type.parts) - 1:
            result = head_type.parts[-1]
            rule = "App-BU"
        else:
            result = Fun(head_type.parts[n_args:])
            rule = "Currying"
        ctx.set_type(e.node_id, result)
        sess.trace_rule(rule, e.node_id, None, result)
        unify_app(sess, e, head_type)
        return

    if isinstance(e, (ListExpr, SetExpr)):
        make = list_of if isinstance(e, ListExpr) else set_of
        rule = "List-BU" if isinstance(e, ListExpr) else "Set-BU"
        if not e.elems:
            # The parser lowers empty literals to Nil/EmptySet; cover
            # hand-built nodes the same way.
            name = "Nil" if isinstance(e, ListExpr) else "EmptySet"
            ctx.set_type(e.node_id, sess.registry.instantiate(name))
            sess.trace_rule(rule, e.node_id, None, ctx.type_of(e.node_id))
            return
        for elem in e.elems:
            bottom_up(sess, elem)
        first = ctx.type_of(e.elems[0].node_id)
        if isinstance(first, Bottom):
            ctx.set_type(e.node_id, BOTTOM)
            return
        ctx.set_type(e.node_id, make(first))
        sess.trace_rule(rule, e.node_id, None, ctx.type_of(e.node_id))
        for elem in e.elems[1:]:
            _unify_against(sess, elem,
                           lambda: ctx.type_of(e.node_id).args[0])
        return

    if isinstance(e, LetInExpr):
        bottom_up(sess, e.bound)
        ctx.push_scope()
        ctx.set_type(e.pattern.node_id, ctx.type_of(e.bound.node_id))
        sess.trace_rule("Let-BU", e.pattern.node_id, None, ctx.type_of(e.pattern.node_id))
        extract_pattern_types(sess, e.pattern)
        bottom_up(sess, e.body)
        ctx.pop_scope()
        ctx.set_type(e.node_id, ctx.type_of(e.body.node_id))
        return

    if isinstance(e, CaseExpr):
        bottom_up(sess, e.scrutinee)
        for pat, body in e.branches:
            ctx.push_scope()
            ctx.set_type(pat.node_id, ctx.type_of(e.scrutinee.node_id))
            extract_pattern_types(sess, pat)
            bottom_up(sess, body)
            ctx.pop_scope()
        first_body = e.branches[0][1]
        ctx.set_type(e.node_id, ctx.type_of(first_body.node_id))
        sess.trace_rule("Case-BU", e.node_id, None, ctx.type_of(e.node_id))
        for _, body in e.branches[1:]:
            _unify_against(sess, body, lambda: ctx.type_of(e.node_id))
        return

    if isinstance(e, LambdaExpr):
        ctx.push_scope()
        for name, pid in zip(e.params, e.param_ids):
            placeholder = sess.fresh_placeholder()
            ctx.set_type(pid, placeholder)
            ctx.bind(name, pid)
        bottom_up(sess, e.body)
        param_types = [ctx.type_of(pid) for pid in e.param_ids]
        body_type = ctx.type_of(e.body.node_id)
        ctx.pop_scope()
        if isinstance(body_type, Bottom) or any(isinstance(p, Bottom) for p in param_types):
            ctx.set_type(e.node_id, BOTTOM)
            return
        ctx.set_type(e.node_id, Fun(tuple(param_types) + (body_type,)))
        sess.trace_rule("Abs-BU", e.node_id, None, ctx.type_of(e.node_id))
        unify_abs(sess, e)
        return

    if isinstance(e, VarExpr):
        binder = ctx.resolve(e.name)
        if binder is not None:
            ctx.set_type(e.node_id, ctx.type_of(binder))
            sess.trace_rule("Exp-BU", e.node_id, None, ctx.type_of(e.node_id))
        elif e.name in sess.registry:
            t = sess.registry.instantiate(e.name)
            ctx.set_type(e.node_id, t)
            sess.trace_rule("Exp-BU", e.node_id, None, t)
        else:
            sess.diagnose(e.node_id, UNKNOWN_NAME, f"unbound name: {e.name!r}")
            ctx.set_type(e.node_id, BOTTOM)
        return

    if isinstance(e, ConstExpr):
        t = Prim("nat") if e.literal_kind == INTEGRAL else Prim("bool")
        ctx.set_type(e.node_id, t)
        sess.trace_rule("Const-BU", e.node_id, None, t)
        return

    ctx.set_type(e.node_id, BOTTOM)
    sess.diagnose(e.node_id, UNSUPPORTED, f"cannot infer a type for {e.kind}")


def _td_replace(sess, node, new, rule, strict):
    """Replace a node's type when the current one is more abstract than
    the pushed one; a failed comparison leaves the node untouched."""
    cur = sess.ctx.type_of(node.node_id)
    if cur is None or isinstance(cur, Bottom) or isinstance(new, Bottom):
        return
    if cur == new:
        return
    rel = compare(cur, new)
    if rel is Relation.INCOMPARABLE:
        return
    if strict and rel is not Relation.MORE_ABSTRACT_STRICT:
        return
    sess.ctx.set_type(node.node_id, new)
    sess.td_replacements.append((node.node_id, cur, new))
    sess.trace_rule(rule, node.node_id, cur, new)


def top_down(sess, e):
    """Push the expected type of ``e`` (already in the context) down into
    its sub-expressions, making abstract types concrete."""
    ctx = sess.ctx
    t_e = ctx.type_of(e.node_id)
    if t_e is None or isinstance(t_e, Bottom):
        return

    if isinstance(e, AppExpr):
        if sess.registry.is_polymorphic_comparison(e.head):
            # No constraint flows from a polymorphic comparison's result
            # to its operands.
            return
        if ctx.resolve(e.head) is None and e.head in sess.registry:
            inst = sess.registry.instantiate(e.head)
            parts = inst.parts if isinstance(inst, Fun) else (inst,)
            if len(parts) - 1 >= len(e.args):
                ret = parts[-1] if len(e.args) == len(parts) - 1 else Fun(parts[len(e.args):])
                subst = None
                if compare(ret, t_e).holds():
                    try:
                        subst = reduce(ret, t_e)
                    except UnificationError:
                        subst = None
                for i, arg in enumerate(e.args):
                    if subst is not None:
                        _td_replace(sess, arg, apply_subst(subst, parts[i]),
                                    "App-TD", strict=True)
                    top_down(sess, arg)
                return
        for arg in e.args:
            top_down(sess, arg)
        return

    if isinstance(e, (ListExpr, SetExpr)):
        ctor = "list" if isinstance(e, ListExpr) else "set"
        rule = "List-TD" if ctor == "list" else "Set-TD"
        shaped = isinstance(t_e, Constructed) and t_e.ctor == ctor
        for elem in e.elems:
            if shaped:
                _td_replace(sess, elem, ctx.type_of(e.node_id).args[0], rule, strict=False)
            top_down(sess, elem)
        return

    if isinstance(e, LetInExpr):
        _td_replace(sess, e.body, t_e, "Let-TD", strict=False)
        top_down(sess, e.body)
        return

    if isinstance(e, CaseExpr):
        for _, body in e.branches:
            _td_replace(sess, body, ctx.type_of(e.node_id), "Case-TD", strict=False)
            top_down(sess, body)
        return

    if isinstance(e, (LambdaExpr, VarExpr, ConstExpr)):
        return

    ctx.set_type(e.node_id, BOTTOM)
    sess.diagnose(e.node_id, UNSUPPORTED, f"cannot complete a type for {e.kind}")


def _seed_return_type(sess, rhs, declared_ret):
    """Confront the inferred type of an equation's right-hand side with
    the declared return type before running top-down completion."""
    ctx = sess.ctx
    cur = ctx.type_of(rhs.node_id)
    if cur is None or isinstance(cur, Bottom):
        return
    if compare(cur, declared_ret).holds():
        try:
            subst = reduce(cur, declared_ret)
        except UnificationError as err:
            sess.diagnose_unification(rhs.node_id, err)
            ctx.set_type(rhs.node_id, BOTTOM)
            return
        if subst:
            sess.apply_substitution(subst)
        _td_replace(sess, rhs, declared_ret, "TD-Seed", strict=False)
        return
    sess.diagnose(rhs.node_id, MISMATCH,
                  f"right-hand side has type {cur}, declared return type is {declared_ret}")
    ctx.set_type(rhs.node_id, BOTTOM)


def _equation_node_ids(patterns, rhs):
    for p in patterns:
        for node in walk(p):
            yield node
    for node in walk(rhs):
        yield node


def infer_spec(sess, f):
    """Run the three stages over every equation of ``f`` and collect the
    final node types into a TypedSpec."""
    diag_start = len(sess.errors)
    node_types = {}
    for patterns, rhs in f.equations:
        sess.ctx.push_scope()
        for pat, declared in zip(patterns, f.param_types):
            sess.ctx.set_type(pat.node_id, declared)
            sess.trace_rule("EX-Seed", pat.node_id, None, declared)
            extract_pattern_types(sess, pat)
        bottom_up(sess, rhs)
        _seed_return_type(sess, rhs, f.return_type)
        top_down(sess, rhs)
        sess.ctx.pop_scope()
        # Snapshot now: later equations' substitutions must not rewrite
        # the types this equation settled on.
        for node in _equation_node_ids(patterns, rhs):
            t = sess.ctx.type_of(node.node_id)
            if t is None:
                t = BOTTOM
            node_types[node.node_id] = t
            node.type_slot = t
            if isinstance(node, LambdaExpr):
                for pid in node.param_ids:
                    pt = sess.ctx.type_of(pid)
                    node_types[pid] = pt if pt is not None else BOTTOM
    return TypedSpec(f, node_types, list(sess.errors[diag_start:]))


@dataclass
class InferenceResult:
    registry: SolverRegistry
    typed_specs: list[TypedSpec]
    session: InferenceSession = field(repr=False, default=None)

    @property
    def diagnostics(self):
        out = []
        for ts in self.typed_specs:
            out.extend(ts.diagnostics)
        return out


def infer_theory(theory, trace=False):
    """Register all declarations and infer every function of a theory."""
    registry = SolverRegistry.with_prelude()
    sess = InferenceSession(registry, trace=trace)
    for decl in theory.datatypes:
        registry.register_datatype(decl)
    typed = []
    for f in theory.functions:
        registry.register_function(f)
        typed.append(infer_spec(sess, f))
    return InferenceResult(registry, typed, sess)
