import pytest

import holtypes as h
from holtypes.exprs import AppExpr, LambdaExpr, walk
from holtypes.infer import InferenceSession, bottom_up, extract_pattern_types, top_down
from holtypes.parser import BUILTIN_CTOR_NAMES, _ExprParser, _IdAllocator, _TokenStream, tokenize
from holtypes.types import erase_counters
from holtypes.unify import compare

from corpus import (
    BS_SPEC,
    CORPUS,
    MYMAP_SPEC,
    NEGATIVE_SPEC,
    PRODUCT_LISTS_SPEC,
    TEST_SPEC,
    all_diagnostics,
    find_app,
    infer_source,
)

nat = h.Prim("nat")
a = h.Var("a")


def parse_expr(text, start_id=1000):
    ids = _IdAllocator()
    ids.next_id = start_id
    ts = _TokenStream(tokenize(text))
    return _ExprParser(ts, ids, set(BUILTIN_CTOR_NAMES)).parse_expr()


def fresh_session():
    sess = InferenceSession(h.SolverRegistry.with_prelude())
    sess.ctx.push_scope()
    return sess


class TestPatternExtraction:
    def test_list_pattern_elements_take_element_type(self):
        # second equation of the binary-search spec: pattern [y] against nat list
        theory, result = infer_source(BS_SPEC)
        ts = result.typed_specs[0]
        pattern = theory.functions[0].equations[1][0][1]
        assert ts.type_of(pattern.elems[0].node_id) == nat

    def test_cons_pattern_decomposition(self):
        theory, result = infer_source(TEST_SPEC)
        ts = result.typed_specs[0]
        pattern = theory.functions[0].equations[1][0][0]
        x, xs = pattern.args
        assert ts.type_of(x.node_id) == a
        assert ts.type_of(xs.node_id) == h.list_of(a)

    def test_constant_pattern_is_a_leaf(self):
        sess = fresh_session()
        pat = parse_expr("True")
        sess.ctx.set_type(pat.node_id, h.Prim("bool"))
        extract_pattern_types(sess, pat)
        assert not sess.errors

    def test_list_pattern_against_non_list_is_flagged(self):
        sess = fresh_session()
        ids = _IdAllocator()
        ids.next_id = 500
        ts = _TokenStream(tokenize("[y]"))
        pat = _ExprParser(ts, ids, set(BUILTIN_CTOR_NAMES)).parse_pattern_atom()
        sess.ctx.set_type(pat.node_id, nat)
        extract_pattern_types(sess, pat)
        assert sess.errors and sess.errors[0].kind == "mismatch"
        assert sess.ctx.type_of(pat.elems[0].node_id) == h.BOTTOM

    def test_unknown_constructor_flagged(self):
        sess = fresh_session()
        pat = parse_expr("Wrap x")
        sess.ctx.set_type(pat.node_id, nat)
        extract_pattern_types(sess, pat)
        assert sess.errors[0].kind == "unknown-name"


class TestBottomUp:
    def run(self, text, bindings=()):
        sess = fresh_session()
        e = parse_expr(text)
        for name, t in bindings:
            nid = -1 - len(sess.ctx.scopes[-1])
            sess.ctx.set_type(nid, t)
            sess.ctx.bind(name, nid)
        bottom_up(sess, e)
        return sess, e

    def test_partial_application_curries(self):
        sess, e = self.run("Cons x", bindings=[("x", a)])
        assert sess.ctx.type_of(e.node_id) == h.Fun((h.list_of(a), h.list_of(a)))
        assert not sess.errors

    def test_empty_list_through_nil_scheme(self):
        sess, e = self.run("[]")
        t = sess.ctx.type_of(e.node_id)
        (v,) = h.free_type_vars(t)
        assert t == h.list_of(v)
        assert v.counter is not None

    def test_case_over_option(self):
        sess, e = self.run(
            "case bs of Some n => Some (n + 1) | None => None",
            bindings=[("bs", h.option_of(nat))],
        )
        assert sess.ctx.type_of(e.node_id) == h.option_of(nat)
        assert not sess.errors

    def test_integral_literal(self):
        sess, e = self.run("2")
        assert sess.ctx.type_of(e.node_id) == nat

    def test_boolean_literal(self):
        sess, e = self.run("False")
        assert sess.ctx.type_of(e.node_id) == h.Prim("bool")

    def test_list_literal_element_unification(self):
        # [0, x] with abstract x forces x to nat
        sess, e = self.run("[0, x]", bindings=[("x", h.Var("q", 9))])
        assert sess.ctx.type_of(e.node_id) == h.list_of(nat)
        assert sess.ctx.type_of(e.elems[1].node_id) == nat

    def test_set_literal(self):
        sess, e = self.run("{1, 2}")
        assert sess.ctx.type_of(e.node_id) == h.set_of(nat)

    def test_let_binding_types_body(self):
        sess, e = self.run("let y = 1 + 1 in y")
        assert sess.ctx.type_of(e.node_id) == nat

    def test_unknown_name_degrades_to_error_type(self):
        sess, e = self.run("frobnicate 1")
        assert sess.ctx.type_of(e.node_id) == h.BOTTOM
        assert sess.errors[0].kind == "unknown-name"

    def test_over_application_flagged(self):
        sess, e = self.run("length [1] [2]")
        assert sess.ctx.type_of(e.node_id) == h.BOTTOM
        assert sess.errors[0].kind == "mismatch"


class TestUnifyAppExamples:
    def test_if_application_resolves_nil(self):
        theory, result = infer_source(TEST_SPEC)
        ts = result.typed_specs[0]
        rhs = theory.functions[0].equations[1][1]
        if_app = find_app(rhs, "If")
        assert ts.type_of(if_app.node_id) == h.list_of(a)
        assert ts.type_of(if_app.args[1].node_id) == h.list_of(a)

    def test_length_argument_drives_scheme_variable(self):
        sess, e = TestBottomUp().run("length xs", bindings=[("xs", h.list_of(a))])
        assert sess.ctx.type_of(e.node_id) == nat
        assert not sess.errors

    def test_some_zero(self):
        sess, e = TestBottomUp().run("Some 0")
        assert sess.ctx.type_of(e.node_id) == h.option_of(nat)


class TestUnifyAbsExamples:
    def test_product_lists_lambda(self):
        theory, result = infer_source(PRODUCT_LISTS_SPEC)
        ts = result.typed_specs[0]
        rhs = theory.functions[0].equations[1][1]
        (lam,) = [n for n in walk(rhs) if isinstance(n, LambdaExpr)]
        assert ts.type_of(lam.node_id) == h.Fun((a, h.list_of(h.list_of(a))))

    def test_identity_lambda_keeps_placeholder(self):
        sess, e = TestBottomUp().run("%x. x")
        t = sess.ctx.type_of(e.node_id)
        assert isinstance(t, h.Fun) and t.parts[0] == t.parts[1]
        assert t.parts[0].is_placeholder()

    def test_two_parameter_lambda_matches_constructor_positions(self):
        sess, e = TestBottomUp().run("%x y. Cons x y")
        t = sess.ctx.type_of(e.node_id)
        assert h.alpha_equivalent(t, h.parse_type("'q => 'q list => 'q list"))
        # all three positions share one variable
        v = t.parts[0]
        assert t == h.Fun((v, h.list_of(v), h.list_of(v)))


class TestTopDown:
    def test_nested_empty_list_completed(self):
        theory, result = infer_source(PRODUCT_LISTS_SPEC)
        ts = result.typed_specs[0]
        rhs = theory.functions[0].equations[0][1]
        assert ts.type_of(rhs.node_id) == h.list_of(h.list_of(a))
        inner = rhs.elems[0]
        assert ts.type_of(inner.node_id) == h.list_of(a)

    def test_polymorphic_comparison_arguments_untouched(self):
        sess = fresh_session()
        e = parse_expr("x = y")
        q = h.Var("q", 7)
        for name, node, t in (("x", e.args[0], q), ("y", e.args[1], q)):
            sess.ctx.bind(name, node.node_id)
            sess.ctx.set_type(node.node_id, t)
        sess.ctx.set_type(e.node_id, h.Prim("bool"))
        top_down(sess, e)
        assert sess.ctx.type_of(e.args[0].node_id) == q
        assert sess.ctx.type_of(e.args[1].node_id) == q

    def test_variable_node_is_a_no_op(self):
        sess = fresh_session()
        e = parse_expr("somevar")
        sess.ctx.set_type(e.node_id, nat)
        before = dict(sess.ctx.node_types)
        top_down(sess, e)
        assert sess.ctx.node_types == before

    def test_replacements_are_monotone(self):
        for name in ("test", "product_lists", "bs", "mymap"):
            _, result = infer_source(CORPUS[name])
            for nid, old, new in result.session.td_replacements:
                assert compare(old, new).holds()


class TestInferSpec:
    def test_test_spec_fully_typed(self):
        theory, result = infer_source(TEST_SPEC)
        ts = result.typed_specs[0]
        assert ts.is_clean()
        for patterns, rhs in theory.functions[0].equations:
            for node in walk(rhs):
                t = ts.type_of(node.node_id)
                assert t is not None and t != h.BOTTOM

    def test_bs_recursive_calls(self):
        theory, result = infer_source(BS_SPEC)
        ts = result.typed_specs[0]
        assert ts.is_clean()
        rhs3 = theory.functions[0].equations[2][1]
        for call in (n for n in walk(rhs3) if isinstance(n, AppExpr) and n.head == "bs"):
            assert ts.type_of(call.node_id) == h.option_of(nat)
            assert ts.type_of(call.args[1].node_id) == h.list_of(nat)
        for patterns, rhs in theory.functions[0].equations:
            assert ts.type_of(rhs.node_id) == h.option_of(nat)

    def test_product_lists_annotation_types(self):
        theory, result = infer_source(PRODUCT_LISTS_SPEC)
        ts = result.typed_specs[0]
        assert ts.is_clean()
        rhs = theory.functions[0].equations[1][1]
        cons_app = find_app(rhs, "Cons")
        assert ts.type_of(cons_app.node_id) == h.Fun((h.list_of(a), h.list_of(a)))
        outer_map = find_app(rhs, "map")
        assert ts.type_of(outer_map.node_id) == h.list_of(h.list_of(h.list_of(a)))
        assert ts.type_of(rhs.node_id) == h.list_of(h.list_of(a))

    def test_mymap_empty_list_takes_return_element_type(self):
        theory, result = infer_source(MYMAP_SPEC)
        ts = result.typed_specs[0]
        assert ts.is_clean()
        rhs1 = theory.functions[0].equations[0][1]
        assert ts.type_of(rhs1.node_id) == h.list_of(h.Var("e"))

    def test_negative_spec_flags_rhs_root(self):
        theory, result = infer_source(NEGATIVE_SPEC)
        ts = result.typed_specs[0]
        assert len(ts.diagnostics) == 1
        d = ts.diagnostics[0]
        assert d.kind == "mismatch"
        assert d.node_id == theory.functions[0].equations[0][1].node_id
        assert ts.type_of(d.node_id) == h.BOTTOM

    def test_type_slots_populated(self):
        theory, result = infer_source(TEST_SPEC)
        for node in theory.all_exprs():
            assert node.type_slot is not None

    @pytest.mark.parametrize("name", sorted(CORPUS))
    def test_corpus_is_clean(self, name):
        theory, result = infer_source(CORPUS[name])
        assert not all_diagnostics(result)
        for f, ts in zip(theory.functions, result.typed_specs):
            assert not ts.bottom_nodes()
            for patterns, rhs in f.equations:
                for p in patterns:
                    for node in walk(p):
                        assert node.node_id in ts.node_types
                for node in walk(rhs):
                    assert node.node_id in ts.node_types

    @pytest.mark.parametrize("name", sorted(CORPUS))
    def test_pattern_types_consistent_with_declared(self, name):
        theory, result = infer_source(CORPUS[name])
        for f, ts in zip(theory.functions, result.typed_specs):
            for patterns, _ in f.equations:
                for pat, declared in zip(patterns, f.param_types):
                    assigned = ts.type_of(pat.node_id)
                    assert compare(declared, assigned).holds()

    def test_equation_order_does_not_change_types(self):
        fwd = ('fun f :: "nat list => nat" where '
               '"f [] = 0" | "f (y # ys) = y"')
        rev = ('fun f :: "nat list => nat" where '
               '"f (y # ys) = y" | "f [] = 0"')
        t1, r1 = infer_source(fwd)
        t2, r2 = infer_source(rev)
        types1 = [r1.typed_specs[0].type_of(rhs.node_id)
                  for _, rhs in t1.functions[0].equations]
        types2 = [r2.typed_specs[0].type_of(rhs.node_id)
                  for _, rhs in t2.functions[0].equations]
        assert sorted(map(str, types1)) == sorted(map(str, types2))

    @pytest.mark.parametrize("name", sorted(CORPUS))
    def test_final_types_use_declared_variables_only(self, name):
        theory, result = infer_source(CORPUS[name])
        for f, ts in zip(theory.functions, result.typed_specs):
            declared = h.free_type_vars(f.declared_type)
            for t in ts.node_types.values():
                for v in h.free_type_vars(erase_counters(t)):
                    assert v in declared

    def test_equation_scopes_reset(self):
        # The same variable name takes unrelated types in different equations.
        src = ('fun f :: "nat => nat list => nat" where '
               '"f x [] = x" | "f x (y # ys) = y"')
        theory, result = infer_source(src)
        assert result.typed_specs[0].is_clean()

    def test_trace_lines_have_rule_format(self):
        theory = h.parse_theory(TEST_SPEC)
        result = h.infer_theory(theory, trace=True)
        assert result.session.trace
        for line in result.session.trace:
            assert " @ " in line and " : " in line and "⟶" in line
