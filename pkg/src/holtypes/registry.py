"""The type solver: a registry of type schemes for functions and constructors.

Schemes are stored with their original variables.  Instantiation decorates
every variable of the scheme with the current value of a monotone counter
(``'a`` becomes ``'a#k``), so two uses of one scheme can never capture each
other's variables.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DuplicateNameError, UnknownNameError
from .types import (
    Constructed,
    Fun,
    TypeExpr,
    Var,
    apply_subst,
    SubstitutionSet,
    free_type_vars,
)

BUILTIN = "builtin"
DATATYPE_DECL = "datatype_decl"
FUNCTION_DECL = "function_decl"

POLYMORPHIC_COMPARISONS = frozenset(["=", "<"])


@dataclass(frozen=True)
class TypeScheme:
    body: TypeExpr
    origin: str  # BUILTIN, DATATYPE_DECL or FUNCTION_DECL


def _scheme(body, origin):
    for v in free_type_vars(body):
        if v.counter is not None:
            raise ValueError(f"schemes never carry counters: {v}")
    return TypeScheme(body, origin)


def _prelude():
    from .parser import parse_type

    table = {
        "Cons": "'a => 'a list => 'a list",
        "Nil": "'a list",
        "#": "'a => 'a list => 'a list",
        "Some": "'a => 'a option",
        "None": "'a option",
        "EmptySet": "'a set",
        "If": "bool => 'a => 'a => 'a",
        "length": "'a list => nat",
        "map": "('d => 'e) => 'd list => 'e list",
        "concat": "'a list list => 'a list",
        "drop": "nat => 'a list => 'a list",
        "take": "nat => 'a list => 'a list",
        "!": "'a list => nat => 'a",
        "div": "nat => nat => nat",
        "+": "nat => nat => nat",
        "-": "nat => nat => nat",
        "*": "nat => nat => nat",
        "=": "'a => 'a => bool",
        "<": "'a => 'a => bool",
    }
    return {name: _scheme(parse_type(text), BUILTIN) for name, text in table.items()}


class SolverRegistry:
    """Maps names to type schemes and hands out freshened instances."""

    def __init__(self, entries=None):
        self.entries = dict(entries) if entries else {}
        self.fresh_counter = 0

    @classmethod
    def with_prelude(cls):
        return cls(_prelude())

    def __contains__(self, name):
        return name in self.entries

    def register(self, name, body, origin):
        if name in self.entries:
            raise DuplicateNameError(name)
        self.entries[name] = _scheme(body, origin)

    def register_datatype(self, decl):
        """Register every constructor of a datatype declaration."""
        result = Constructed(tuple(Var(p) for p in decl.type_params), decl.name)
        for ctor_name, arg_types in decl.ctors:
            if arg_types:
                body = Fun(tuple(arg_types) + (result,))
            else:
                body = result
            self.register(ctor_name, body, DATATYPE_DECL)

    def register_function(self, spec):
        """Record a function's declared type; done before inferring its
        own equations so recursive calls resolve."""
        self.register(spec.name, spec.declared_type, FUNCTION_DECL)

    def instantiate(self, name):
        """The scheme body with every variable decorated by a fresh counter."""
        scheme = self.lookup(name)
        k = self.fresh_counter
        self.fresh_counter += 1
        sub = SubstitutionSet({v: Var(v.name, k) for v in free_type_vars(scheme.body)})
        return apply_subst(sub, scheme.body)

    def lookup(self, name):
        if name not in self.entries:
            raise UnknownNameError(name)
        return self.entries[name]

    def lookup_unmodified(self, name):
        """The scheme body verbatim, without freshening."""
        return self.lookup(name).body

    def is_polymorphic_comparison(self, name):
        return name in POLYMORPHIC_COMPARISONS

    def dump(self):
        """All entries as ``name :: type`` lines, sorted by name."""
        from .types import format_type

        return [f"{name} :: {format_type(s.body)}" for name, s in sorted(self.entries.items())]
