"""Sized types, index-interval inference and constraint entailment."""
from .checker import (
    BUILTINS,
    CPHASE_TYPE,
    FAMILY_INDEX_MIN,
    Checker,
    TypeContext,
    check_command,
    check_expr,
    check_program,
    check_unitary,
    kind_check,
)
from .errors import ErrorKind, TypeCheckError
from .index import (
    EMPTY_INDEX_CONTEXT,
    INF,
    Constraint,
    Entailment,
    IndexContext,
    Interval,
    Rel,
    UnboundIndexVariable,
    entails,
    infer_index_interval,
)

__all__ = [
    "BUILTINS",
    "CPHASE_TYPE",
    "FAMILY_INDEX_MIN",
    "Checker",
    "Constraint",
    "EMPTY_INDEX_CONTEXT",
    "Entailment",
    "ErrorKind",
    "INF",
    "IndexContext",
    "Interval",
    "Rel",
    "TypeCheckError",
    "TypeContext",
    "UnboundIndexVariable",
    "check_command",
    "check_expr",
    "check_program",
    "check_unitary",
    "entails",
    "infer_index_interval",
    "kind_check",
]
