"""Type inference for a miniature HOL-style specification language."""

from .errors import (
    ArityMismatchError,
    BudgetExceededError,
    ConflictError,
    DuplicateNameError,
    HolTypesError,
    MismatchError,
    OccursError,
    ParseError,
    RenderError,
    UnificationError,
    UnknownNameError,
)
from .exprs import (
    AppExpr,
    CaseExpr,
    ConstExpr,
    Expr,
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
    SubstitutionSet,
    Tuple,
    TypeContext,
    TypeExpr,
    Var,
    alpha_equivalent,
    apply_subst,
    apply_subst_ctx,
    erase_counters,
    format_type,
    free_type_vars,
    fun_of,
    list_of,
    option_of,
    set_of,
)
from .parser import DatatypeDecl, FunctionSpec, TheoryFile, parse_theory, parse_type
from .registry import SolverRegistry, TypeScheme
from .unify import Relation, compare, reduce, unify_abs, unify_app
from .oracle import enumerate_types, oracle_equalize, oracle_unify, relation_holds
from .infer import (
    Diagnostic,
    InferenceResult,
    InferenceSession,
    TypedSpec,
    bottom_up,
    extract_pattern_types,
    infer_spec,
    infer_theory,
    top_down,
)
from .emit import (
    CppTypeMap,
    emit_annotated,
    emit_json,
    format_expr,
    annotated_type,
    render_cpp_signature,
    render_cpp_type,
)

__version__ = "0.1.0"
