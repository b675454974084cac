"""The abstract-concrete relation, reduction to substitutions, and the
unification steps for applications and lambda abstractions.

``compare(t, s)`` decides whether ``t`` is at least as abstract as ``s``.
The relation is not an ordering: it is symmetric on bare variables, and a
variable is more abstract than any type it does not occur in.

``reduce(t, s)`` decomposes a valid relation into irreducible facts
``var := type`` and solves them into one idempotent substitution set.
When two facts bind the same variable to different types, the bindings
are reconciled by a recursive reduction before giving up.
"""

from __future__ import annotations

import enum

from .errors import ConflictError, MismatchError, OccursError, UnificationError
from .exprs import AppExpr, VarExpr
from .types import (
    BOTTOM,
    Bottom,
    Constructed,
    Fun,
    Prim,
    SubstitutionSet,
    Tuple,
    Var,
    apply_subst,
    free_type_vars,
)


class Relation(enum.Enum):
    MORE_ABSTRACT_STRICT = "more-abstract-strict"
    MORE_ABSTRACT = "more-abstract"
    INCOMPARABLE = "incomparable"

    def holds(self):
        """True for both the strict and the non-strict relation."""
        return self is not Relation.INCOMPARABLE


def _combine(relations):
    if any(r is Relation.INCOMPARABLE for r in relations):
        return Relation.INCOMPARABLE
    if any(r is Relation.MORE_ABSTRACT_STRICT for r in relations):
        return Relation.MORE_ABSTRACT_STRICT
    return Relation.MORE_ABSTRACT


def compare(t, s):
    """Is ``t`` at least as abstract as ``s``?

    Variables are symmetric among themselves and strictly more abstract
    than anything else, subject to the occurs check.  Structural cases
    need the same shape on both sides and compare component-wise; the
    result is strict as soon as one component is strict.
    """
    if isinstance(t, Bottom) or isinstance(s, Bottom):
        return Relation.INCOMPARABLE
    if isinstance(t, Var):
        if isinstance(s, Var):
            return Relation.MORE_ABSTRACT
        if isinstance(s, Prim):
            return Relation.MORE_ABSTRACT_STRICT
        if t in free_type_vars(s):
            return Relation.INCOMPARABLE
        return Relation.MORE_ABSTRACT_STRICT
    if isinstance(s, Var):
        return Relation.INCOMPARABLE
    if isinstance(t, Prim):
        if isinstance(s, Prim) and t.name == s.name:
            return Relation.MORE_ABSTRACT
        return Relation.INCOMPARABLE
    if isinstance(t, Fun) and isinstance(s, Fun):
        if len(t.parts) != len(s.parts):
            return Relation.INCOMPARABLE
        return _combine([compare(a, b) for a, b in zip(t.parts, s.parts)])
    if isinstance(t, Tuple) and isinstance(s, Tuple):
        return _combine([compare(t.left, s.left), compare(t.right, s.right)])
    if isinstance(t, Constructed) and isinstance(s, Constructed):
        if t.ctor != s.ctor or len(t.args) != len(s.args):
            return Relation.INCOMPARABLE
        return _combine([compare(a, b) for a, b in zip(t.args, s.args)])
    return Relation.INCOMPARABLE


def _bind_priority(v):
    # Which of two variables gives way in a variable-variable binding:
    # lambda placeholders lose to everything, modified variables lose to
    # unmodified ones (fresher counters first), user-written names win.
    if v.is_placeholder():
        return (2, v.counter if v.counter is not None else -1)
    if v.counter is not None:
        return (1, v.counter)
    return (0, -1)


def _decompose(t, s, facts):
    """Split ``t >= s`` into irreducible (var, type) facts."""
    if t == s:
        return
    if isinstance(t, Var):
        facts.append((t, s))
        return
    if isinstance(s, Var):
        # Only reachable through rebinding; the initial relation never
        # puts a bare variable on the concrete side alone.
        facts.append((s, t))
        return
    if isinstance(t, Fun) and isinstance(s, Fun):
        # Canonical flattening makes structural equality curried equality,
        # so unequal part counts group the longer tail against the last
        # component of the shorter type.
        tp, sp = t.parts, s.parts
        if len(tp) != len(sp):
            if len(tp) < len(sp):
                tp, sp = sp, tp
            m = len(sp)
            for a, b in zip(tp[: m - 1], sp[: m - 1]):
                _decompose(a, b, facts)
            _decompose(Fun(tp[m - 1 :]), sp[m - 1], facts)
            return
        for a, b in zip(tp, sp):
            _decompose(a, b, facts)
        return
    if isinstance(t, Tuple) and isinstance(s, Tuple):
        _decompose(t.left, s.left, facts)
        _decompose(t.right, s.right, facts)
        return
    if (
        isinstance(t, Constructed)
        and isinstance(s, Constructed)
        and t.ctor == s.ctor
        and len(t.args) == len(s.args)
    ):
        for a, b in zip(t.args, s.args):
            _decompose(a, b, facts)
        return
    raise MismatchError(t, s)


class _Solution:
    """Accumulates variable bindings, kept idempotent throughout."""

    def __init__(self):
        self.bindings = {}

    def resolve(self, t):
        return apply_subst(SubstitutionSet(self.bindings), t) if self.bindings else t

    def absorb(self, a, b):
        """Record that the resolved forms of ``a`` and ``b`` must match."""
        ra = self.resolve(a)
        rb = self.resolve(b)
        if ra == rb:
            return
        if isinstance(ra, Var) and isinstance(rb, Var):
            if _bind_priority(rb) > _bind_priority(ra):
                ra, rb = rb, ra
            self._bind(ra, rb)
        elif isinstance(ra, Var):
            self._bind(ra, rb)
        elif isinstance(rb, Var):
            self._bind(rb, ra)
        elif isinstance(a, Var) and a in self.bindings:
            # The variable already resolved to a different type: the two
            # bindings must themselves reconcile.
            self._reconcile(a, ra, rb)
        elif isinstance(b, Var) and b in self.bindings:
            self._reconcile(b, rb, ra)
        else:
            facts = []
            _decompose(ra, rb, facts)
            for x, y in facts:
                self.absorb(x, y)

    def _reconcile(self, var, t1, t2):
        try:
            merged = _solve(t1, t2)
        except UnificationError:
            raise ConflictError(var, t1, t2) from None
        for v2, t2_ in merged.items():
            self.absorb(v2, t2_)

    def _bind(self, var, t):
        if var in free_type_vars(t):
            raise OccursError(var, t)
        one = SubstitutionSet({var: t})
        for v, b in list(self.bindings.items()):
            nb = apply_subst(one, b)
            if v in free_type_vars(nb):
                raise OccursError(v, nb)
            self.bindings[v] = nb
        self.bindings[var] = t

    def freeze(self):
        return SubstitutionSet(dict(self.bindings))


def _solve(t, s):
    facts = []
    _decompose(t, s, facts)
    sol = _Solution()
    for var, bound in facts:
        sol.absorb(var, bound)
    return sol.freeze()


def reduce(t, s):
    """Reduce the relation ``t >= s`` to a substitution set.

    The relation must hold (caller's responsibility); when it does not,
    the failure is a mismatch, or an occurs failure when the obstacle is
    a variable occurring in the opposing composite type.
    """
    rel = compare(t, s)
    if rel is Relation.INCOMPARABLE:
        if (
            isinstance(t, Var)
            and not isinstance(s, (Var, Prim, Bottom))
            and t in free_type_vars(s)
        ):
            raise OccursError(t, s)
        raise MismatchError(t, s)
    return _solve(t, s)


def unify_app(sess, e, head_type):
    """Unify the inferred argument types of an application against the
    positional types of its head, rewriting the context after each step.

    Per argument: if the inferred type is more abstract than the
    positional one, reduce in that direction; otherwise try the other
    direction; otherwise flag the argument and move on.
    """
    parts = list(head_type.parts)
    for i, arg in enumerate(e.args):
        sigma = sess.ctx.type_of(arg.node_id)
        tau = parts[i]
        if sigma is None or isinstance(sigma, Bottom):
            continue
        if compare(sigma, tau).holds():
            left, right = sigma, tau
        elif compare(tau, sigma).holds():
            left, right = tau, sigma
        else:
            sess.diagnose(arg.node_id, "mismatch",
                          f"argument {i + 1} of {e.head!r}: {sigma} does not fit {tau}")
            sess.ctx.set_type(arg.node_id, BOTTOM)
            continue
        try:
            subst = reduce(left, right)
        except UnificationError as err:
            sess.diagnose_unification(arg.node_id, err)
            sess.ctx.set_type(arg.node_id, BOTTOM)
            continue
        if subst:
            before = sess.ctx.type_of(e.node_id)
            sess.apply_substitution(subst)
            parts = [apply_subst(subst, p) for p in parts]
            sess.trace_rule("Uni-App", e.node_id, before, sess.ctx.type_of(e.node_id))
    sess.set_app_parts(e.node_id, parts)


def unify_abs(sess, e):
    """Unify a lambda with its body: a parameter that appears directly as
    an argument of the body application takes that position's type, and
    the lambda's function type is rebuilt accordingly."""
    body = e.body
    if not isinstance(body, AppExpr):
        return
    positions = sess.app_parts(body.node_id)
    if positions is None:
        return
    changed = False
    for i, arg in enumerate(body.args):
        if i >= len(positions) - 1 or not isinstance(arg, VarExpr):
            continue
        for j, name in enumerate(e.params):
            if arg.name == name:
                param_id = e.param_ids[j]
                if sess.ctx.type_of(param_id) != positions[i]:
                    sess.ctx.set_type(param_id, positions[i])
                    changed = True
    if changed:
        before = sess.ctx.type_of(e.node_id)
        param_types = [sess.ctx.type_of(pid) for pid in e.param_ids]
        body_type = sess.ctx.type_of(body.node_id)
        if isinstance(body_type, Bottom) or any(isinstance(p, Bottom) for p in param_types):
            sess.ctx.set_type(e.node_id, BOTTOM)
            return
        new_type = Fun(tuple(param_types) + (body_type,))
        sess.ctx.set_type(e.node_id, new_type)
        sess.trace_rule("Uni-Abs", e.node_id, before, new_type)
