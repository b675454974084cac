import pytest

import holtypes as h
from hypothesis import strategies as st


@pytest.fixture
def prelude():
    return h.SolverRegistry.with_prelude()


def type_exprs(variables=None, max_depth=3, with_tuples=False):
    """Hypothesis strategy for canonical type expressions."""
    if variables is None:
        variables = [h.Var("a"), h.Var("b"), h.Var("a", 1)]
    leaves = st.sampled_from([h.Prim("nat"), h.Prim("bool")] + list(variables))

    def extend(children):
        options = [
            children.map(h.list_of),
            children.map(h.option_of),
            st.tuples(children, children).map(lambda ab: h.Fun(ab)),
        ]
        if with_tuples:
            options.append(st.tuples(children, children).map(lambda ab: h.Tuple(*ab)))
        return st.one_of(options)

    return st.recursive(leaves, extend, max_leaves=max_depth * 2)


def substitutions(variables=None, max_depth=2):
    """Hypothesis strategy for valid substitution sets."""
    if variables is None:
        variables = [h.Var("a"), h.Var("b"), h.Var("c", 3)]
    range_types = type_exprs(variables=[h.Var("r1"), h.Var("r2")], max_depth=max_depth)

    @st.composite
    def build(draw):
        domain = draw(st.lists(st.sampled_from(variables), unique=True, max_size=len(variables)))
        bindings = {v: draw(range_types) for v in domain}
        return h.SubstitutionSet(bindings)

    return build()
