import pytest
from hypothesis import given, settings

import holtypes as h
from holtypes.errors import ConflictError, MismatchError, OccursError, UnificationError
from holtypes.unify import Relation, compare, reduce

from conftest import type_exprs

nat = h.Prim("nat")
bool_ = h.Prim("bool")
a = h.Var("a")
b = h.Var("b")

STRICT = Relation.MORE_ABSTRACT_STRICT
LOOSE = Relation.MORE_ABSTRACT
NO = Relation.INCOMPARABLE


class TestCompare:
    @pytest.mark.parametrize("t,s,expected", [
        (a, nat, STRICT),
        (a, b, LOOSE),
        (b, a, LOOSE),
        (a, a, LOOSE),
        (nat, nat, LOOSE),
        (nat, bool_, NO),
        (nat, a, NO),
        (h.list_of(a), a, NO),
        (a, h.list_of(b), STRICT),
        (a, h.list_of(a), NO),  # occurs check blocks the extension
        (h.list_of(a), h.list_of(nat), STRICT),
        (h.list_of(nat), h.list_of(nat), LOOSE),
        (h.list_of(nat), h.set_of(nat), NO),
        (h.Fun((a, a)), h.Fun((a, b)), LOOSE),
        (h.Fun((a, b)), h.Fun((a, a)), LOOSE),
        (h.Fun((a, b)), h.Fun((nat, bool_)), STRICT),
        (h.Fun((a, b, nat)), h.Fun((a, b)), NO),  # arity must agree
        (h.Tuple(a, b), h.Tuple(nat, b), STRICT),
        (h.Tuple(a, b), h.Fun((a, b)), NO),
        (h.BOTTOM, a, NO),
    ])
    def test_cases(self, t, s, expected):
        assert compare(t, s) is expected

    def test_strict_implies_nonstrict(self):
        assert STRICT.holds() and LOOSE.holds() and not NO.holds()

    @given(type_exprs())
    def test_self_comparison_never_incomparable(self, t):
        assert compare(t, t).holds()

    @given(type_exprs(variables=[a, b, h.Var("c", 1)]),
           type_exprs(variables=[a, b, h.Var("c", 1)]))
    def test_variable_free_reflexivity(self, t, s):
        # Two variable-free types relate exactly when they are equal.
        if not h.free_type_vars(t) and not h.free_type_vars(s):
            assert compare(t, s).holds() == (t == s)

    def test_symmetry_on_bare_variables(self):
        assert compare(a, b).holds() and compare(b, a).holds()


class TestReduce:
    def test_variable_against_primitive_list(self):
        s = reduce(h.list_of(a), h.list_of(nat))
        assert dict(s.items()) == {a: nat}

    def test_function_decomposition(self):
        s = reduce(h.Fun((a, b)), h.Fun((nat, bool_)))
        assert dict(s.items()) == {a: nat, b: bool_}

    def test_conflicting_bindings(self):
        with pytest.raises(ConflictError) as exc:
            reduce(h.Fun((a, a)), h.Fun((nat, bool_)))
        assert exc.value.var == a
        assert {exc.value.type1, exc.value.type2} == {nat, bool_}

    def test_counter_variable_binds_to_plain(self):
        s = reduce(h.list_of(h.list_of(h.Var("a", 1))), h.list_of(h.list_of(a)))
        assert dict(s.items()) == {h.Var("a", 1): a}

    def test_occurs_rejection(self):
        with pytest.raises(OccursError):
            reduce(a, h.list_of(a))

    def test_mismatch_on_primitive_clash(self):
        with pytest.raises(MismatchError):
            reduce(nat, bool_)

    def test_mismatch_when_relation_fails(self):
        with pytest.raises(MismatchError):
            reduce(nat, a)

    def test_conflict_merge_through_recursive_reduction(self):
        # One variable bound to 'b list and to nat list merges via 'b := nat.
        t = h.Fun((a, a))
        s = h.Fun((h.list_of(b), h.list_of(nat)))
        out = reduce(t, s)
        assert dict(out.items()) == {a: h.list_of(nat), b: nat}

    def test_flipped_fact_after_substitution(self):
        # 'a := nat first, then the pending 'a >= 'b fact must bind 'b.
        out = reduce(h.Fun((a, a)), h.Fun((nat, b)))
        assert dict(out.items()) == {a: nat, b: nat}

    def test_identity_pair(self):
        assert not reduce(a, a)

    def test_empty_on_equal_primitives(self):
        assert not reduce(h.Fun((nat, nat)), h.Fun((nat, nat)))

    def test_lambda_placeholder_gives_way_to_scheme_variable(self):
        lam = h.Var("lambda@0")
        out = reduce(lam, h.Var("q", 4))
        assert dict(out.items()) == {lam: h.Var("q", 4)}

    def test_plain_variable_survives_counter_variable(self):
        out = reduce(a, h.Var("a", 3))
        assert dict(out.items()) == {h.Var("a", 3): a}

    def test_curried_tail_groups_inside_solver(self):
        # Canonical flattening makes these equal under w2 := nat => bool.
        t = h.Fun((a, a, nat))
        s = h.Fun((h.Fun((h.Var("w"), nat, bool_)), h.Fun((h.Var("w"), h.Var("w2"))), nat))
        out = reduce(t, s)
        assert h.apply_subst(out, t) == h.apply_subst(out, s)


class TestSoundness:
    @settings(max_examples=300)
    @given(type_exprs(variables=[a, b]), type_exprs(variables=[a, b]))
    def test_successful_reduction_equalizes(self, t, s):
        if not compare(t, s).holds():
            return
        try:
            out = reduce(t, s)
        except UnificationError:
            return
        assert h.apply_subst(out, t) == h.apply_subst(out, s)

    @settings(max_examples=300)
    @given(type_exprs(variables=[a, b]), type_exprs(variables=[a, b]))
    def test_substitutions_respect_occurs_check(self, t, s):
        if not compare(t, s).holds():
            return
        try:
            out = reduce(t, s)
        except UnificationError:
            return
        for var, bound in out.items():
            assert var not in h.free_type_vars(bound)
