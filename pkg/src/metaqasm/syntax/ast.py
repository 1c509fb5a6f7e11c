"""Abstract syntax for metaQASM.

Indices, types, expressions, unitary statements and commands are immutable
dataclasses.  Every node carries an optional :class:`SourceSpan`; spans never
take part in equality, so two trees parsed from differently formatted text
compare equal when they have the same structure.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int
    length: int = 1

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


def _span() -> Optional[SourceSpan]:
    return field(default=None, compare=False, repr=False)


# --------------------------------------------------------------------------
# Index expressions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class NatLit:
    value: int
    span: Optional[SourceSpan] = _span()

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError("natural literal must be non-negative")


@dataclass(frozen=True)
class IndexVar:
    name: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Infinity:
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Add:
    left: "IndexExpr"
    right: "IndexExpr"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Sub:
    left: "IndexExpr"
    right: "IndexExpr"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Mul:
    left: "IndexExpr"
    right: "IndexExpr"
    span: Optional[SourceSpan] = _span()


IndexExpr = Union[NatLit, IndexVar, Infinity, Add, Sub, Mul]


def const(value: int) -> IndexExpr:
    """Index expression denoting an arbitrary integer (negatives as ``0-k``)."""
    if value >= 0:
        return NatLit(value)
    return Sub(NatLit(0), NatLit(-value))


# --------------------------------------------------------------------------
# Types
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Bit:
    pass


@dataclass(frozen=True)
class Qbit:
    pass


@dataclass(frozen=True)
class Unit:
    pass


@dataclass(frozen=True)
class Reg:
    base: Union[Bit, Qbit]
    size: IndexExpr


@dataclass(frozen=True)
class Circuit:
    params: Tuple["Type", ...]


@dataclass(frozen=True)
class Family:
    index_vars: Tuple[str, ...]
    params: Tuple["Type", ...]


Type = Union[Bit, Qbit, Unit, Reg, Circuit, Family]
BaseType = Union[Bit, Qbit]


@dataclass(frozen=True)
class Param:
    name: str
    type: Type
    span: Optional[SourceSpan] = _span()


# --------------------------------------------------------------------------
# Expressions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Deref:
    name: str
    index: IndexExpr
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Slice:
    """Register view ``x[lo..hi]`` (inclusive on both ends)."""

    name: str
    lo: IndexExpr
    hi: IndexExpr
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Instance:
    indices: Tuple[IndexExpr, ...]
    target: "Expr"
    span: Optional[SourceSpan] = _span()


Expr = Union[Var, Deref, Slice, Instance]


# --------------------------------------------------------------------------
# Unitary statements
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CX:
    control: Expr
    target: Expr
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class H:
    arg: Expr
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class T:
    arg: Expr
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Tdg:
    arg: Expr
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class CPhase:
    """Builtin ``cphase(k)(a, b)``: diag(1, 1, 1, exp(2 pi i / 2^k))."""

    k: IndexExpr
    control: Expr
    target: Expr
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Apply:
    target: Expr
    args: Tuple[Expr, ...]
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class USeq:
    first: "UnitaryStmt"
    second: "UnitaryStmt"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Reverse:
    body: "UnitaryStmt"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class For:
    var: str
    lo: IndexExpr
    hi: IndexExpr
    body: "UnitaryStmt"
    span: Optional[SourceSpan] = _span()


UnitaryStmt = Union[CX, H, T, Tdg, CPhase, Apply, USeq, Reverse, For]
GATE_STMTS = (CX, H, T, Tdg, CPhase)


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Skip:
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class CregIn:
    name: str
    size: IndexExpr
    scope: "Command"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class QregIn:
    name: str
    size: IndexExpr
    scope: "Command"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class GateIn:
    name: str
    params: Tuple[Param, ...]
    body: UnitaryStmt
    scope: "Command"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class FamilyIn:
    name: str
    index_vars: Tuple[str, ...]
    params: Tuple[Param, ...]
    body: UnitaryStmt
    scope: "Command"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Measure:
    src: Expr
    dst: Expr
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Reset:
    arg: Expr
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class IfEq:
    cond: Expr
    value: int
    body: UnitaryStmt
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class UStmt:
    stmt: UnitaryStmt
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Seq:
    first: "Command"
    second: "Command"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Include:
    """Unresolved ``include "path";`` whose declarations scope over ``scope``."""

    path: str
    scope: "Command"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Header:
    """The ``OPENQASM <version>;`` line, recorded around the program body."""

    version: str
    scope: "Command"
    span: Optional[SourceSpan] = _span()


Command = Union[
    Skip, CregIn, QregIn, GateIn, FamilyIn, Measure, Reset, IfEq, UStmt, Seq, Include, Header
]
DECLARATIONS = (CregIn, QregIn, GateIn, FamilyIn, Include, Header)


def useq(stmts) -> UnitaryStmt:
    """Right-nested sequence of one or more unitary statements."""
    stmts = list(stmts)
    if not stmts:
        raise ValueError("empty unitary sequence")
    result = stmts[-1]
    for s in reversed(stmts[:-1]):
        result = USeq(s, result, s.span)
    return result


def seq(cmds) -> Command:
    cmds = list(cmds)
    if not cmds:
        return Skip()
    result = cmds[-1]
    for c in reversed(cmds[:-1]):
        result = Seq(c, result, c.span)
    return result


def _flatten(node, kind) -> list:
    out, stack = [], [node]
    while stack:
        n = stack.pop()
        if isinstance(n, kind):
            stack.append(n.second)
            stack.append(n.first)
        else:
            out.append(n)
    return out


def flatten_useq(u: UnitaryStmt) -> list:
    return _flatten(u, USeq)


def flatten_seq(c: Command) -> list:
    return _flatten(c, Seq)


def with_scope(decl, scope: Command):
    """Copy of a declaration node with its scope replaced."""
    from dataclasses import replace

    return replace(decl, scope=scope)


def splice(c: Command, rest: Command) -> Command:
    """Place ``rest`` at the tail of ``c`` so that ``c``'s declarations scope over it."""
    if isinstance(rest, Skip):
        return c
    if isinstance(c, Skip):
        return rest
    if isinstance(c, DECLARATIONS):
        return with_scope(c, splice(c.scope, rest))
    if isinstance(c, Seq):
        return Seq(c.first, splice(c.second, rest), c.span)
    return Seq(c, rest, c.span)
