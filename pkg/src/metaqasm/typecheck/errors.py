from __future__ import annotations

import enum
from typing import Optional

from ..syntax.ast import SourceSpan


class ErrorKind(enum.Enum):
    UNBOUND = "E001"
    UNBOUND_INDEX = "E002"
    OUT_OF_BOUNDS = "E003"
    MISMATCH = "E004"
    ARITY = "E005"
    NEGATIVE_LENGTH = "E006"
    NOT_A_CIRCUIT = "E007"
    NOT_TYPED_QASM = "E008"
    SHADOWING = "E009"
    DUPLICATE = "E010"
    UNRESOLVED_INCLUDE = "E011"
    NON_BIT_LITERAL = "W001"

    @property
    def code(self) -> str:
        return self.value


class TypeCheckError(Exception):
    """A failed typing judgement.  ``constraint`` is set when the failure is an
    index (in)equality that the entailment procedure could not prove."""

    def __init__(
        self,
        kind: ErrorKind,
        message: str,
        span: Optional[SourceSpan] = None,
        constraint=None,
        delta=None,
        severity: str = "error",
    ):
        self.kind = kind
        self.message = message
        self.span = span
        self.constraint = constraint
        self.delta = delta
        self.severity = severity
        super().__init__(message)

    @property
    def unproven_constraint(self):
        return self.constraint

    def render(self) -> str:
        where = str(self.span) if self.span else "<unknown>:0:0"
        text = f"{where}: {self.severity}[{self.kind.code}]: {self.message}"
        if self.constraint is not None:
            text += f"\nnote: could not prove {self.constraint} under {self.delta}"
        return text

    def __eq__(self, other) -> bool:
        return isinstance(other, TypeCheckError) and self.render() == other.render()

    def __hash__(self) -> int:
        return hash(self.render())

    def __repr__(self) -> str:
        return f"TypeCheckError({self.render()!r})"
