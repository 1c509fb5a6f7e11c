"""Sized-type checking of metaQASM programs over contexts ``delta; gamma``."""
from __future__ import annotations

from typing import Optional

from ..syntax import ast as A
from ..syntax.printer import format_expr, format_index, format_type
from ..syntax.subst import fresh_name, index_vars, subst_type
from .errors import ErrorKind, TypeCheckError
from .index import (
    EMPTY_INDEX_CONTEXT,
    Constraint,
    Entailment,
    IndexContext,
    Rel,
    UnboundIndexVariable,
    entails,
    infer_index_interval,
)

# Smallest value a family index variable ranges over; instance indices must
# be at least this large.
FAMILY_INDEX_MIN = 1

CPHASE_TYPE = A.Family(("k",), (A.Qbit(), A.Qbit()))


class TypeContext:
    """Persistent ordered bindings; lookup finds the innermost."""

    __slots__ = ("_bindings",)

    def __init__(self, bindings: tuple = ()):
        self._bindings = tuple(bindings)

    def extend(self, name: str, t: A.Type) -> "TypeContext":
        return TypeContext(self._bindings + ((name, t),))

    def lookup(self, name: str) -> Optional[A.Type]:
        for n, t in reversed(self._bindings):
            if n == name:
                return t
        return None

    def __contains__(self, name: str) -> bool:
        return self.lookup(name) is not None

    def __iter__(self):
        return iter(self._bindings)


BUILTINS = TypeContext((("cphase", CPHASE_TYPE),))


def _family_range() -> tuple[A.IndexExpr, A.IndexExpr]:
    return A.NatLit(FAMILY_INDEX_MIN), A.Infinity()


class Checker:
    """Collects every error (not fail-fast); warnings are kept separately."""

    def __init__(self, strict_typed: bool = False):
        self.strict_typed = strict_typed
        self.errors: list[TypeCheckError] = []
        self.warnings: list[TypeCheckError] = []

    # -- helpers ----------------------------------------------------------

    def _strict(self, what: str, span) -> None:
        if self.strict_typed:
            raise TypeCheckError(ErrorKind.NOT_TYPED_QASM, f"{what} is not part of typedQASM", span)

    def _bound_vars(self, delta: IndexContext, i: A.IndexExpr, span) -> None:
        for name in sorted(index_vars(i)):
            if name not in delta:
                raise TypeCheckError(ErrorKind.UNBOUND_INDEX, f"unbound index variable {name}", span)
        if self.strict_typed and not isinstance(i, A.NatLit):
            self._strict(f"index expression {format_index(i)}", span)

    def _require(self, delta, constraint: Constraint, span, message: str, kind=ErrorKind.OUT_OF_BOUNDS):
        for side in (constraint.lhs, constraint.rhs):
            for name in sorted(index_vars(side)):
                if name not in delta:
                    raise TypeCheckError(ErrorKind.UNBOUND_INDEX, f"unbound index variable {name}", span)
        if entails(delta, constraint) is not Entailment.HOLDS:
            raise TypeCheckError(kind, message, span, constraint, delta)

    def _collect(self, fn, *args) -> None:
        try:
            fn(*args)
        except TypeCheckError as err:
            self.errors.append(err)

    # -- kinds --------------------------------------------------------------

    def kind_check(self, delta: IndexContext, tau: A.Type, span=None) -> list[TypeCheckError]:
        errors: list[TypeCheckError] = []
        if isinstance(tau, A.Reg):
            unbound = sorted(v for v in index_vars(tau.size) if v not in delta)
            for name in unbound:
                errors.append(TypeCheckError(ErrorKind.UNBOUND_INDEX, f"unbound index variable {name}", span))
            if unbound:
                return errors
            if self.strict_typed and not isinstance(tau.size, A.NatLit):
                errors.append(
                    TypeCheckError(ErrorKind.NOT_TYPED_QASM, f"register size {format_index(tau.size)} is not a literal", span)
                )
                return errors
            c = Constraint(Rel.GE, tau.size, A.NatLit(0))
            if entails(delta, c) is not Entailment.HOLDS:
                errors.append(
                    TypeCheckError(
                        ErrorKind.NEGATIVE_LENGTH,
                        f"possibly-negative register length in {format_type(tau)}",
                        span,
                        c,
                        delta,
                    )
                )
        elif isinstance(tau, A.Circuit):
            for p in tau.params:
                errors.extend(self.kind_check(delta, p, span))
        elif isinstance(tau, A.Family):
            if self.strict_typed:
                errors.append(TypeCheckError(ErrorKind.NOT_TYPED_QASM, "Family types are not part of typedQASM", span))
                return errors
            if len(set(tau.index_vars)) != len(tau.index_vars):
                errors.append(
                    TypeCheckError(ErrorKind.DUPLICATE, f"duplicate index variable in {format_type(tau)}", span)
                )
                return errors
            params = tau.params
            inner = delta
            for y in tau.index_vars:
                if y in inner:
                    new = fresh_name(y, set(inner.names) | set(tau.index_vars))
                    params = tuple(subst_type(p, {y: A.IndexVar(new)}) for p in params)
                    y = new
                inner = inner.extend(y, *_family_range())
            for p in params:
                errors.extend(self.kind_check(inner, p, span))
        return errors

    # -- type comparison ------------------------------------------------------

    def types_equal(self, delta: IndexContext, a: A.Type, b: A.Type) -> bool:
        if isinstance(a, A.Reg) and isinstance(b, A.Reg):
            return type(a.base) is type(b.base) and entails(
                delta, Constraint(Rel.EQ, a.size, b.size)
            ) is Entailment.HOLDS
        if isinstance(a, A.Circuit) and isinstance(b, A.Circuit):
            return len(a.params) == len(b.params) and all(
                self.types_equal(delta, x, y) for x, y in zip(a.params, b.params)
            )
        if isinstance(a, A.Family) and isinstance(b, A.Family):
            if len(a.index_vars) != len(b.index_vars) or len(a.params) != len(b.params):
                return False
            avoid = set(delta.names) | set(a.index_vars) | set(b.index_vars)
            inner = delta
            sa, sb = {}, {}
            for ya, yb in zip(a.index_vars, b.index_vars):
                new = fresh_name(ya, avoid)
                avoid.add(new)
                sa[ya] = sb[yb] = A.IndexVar(new)
                inner = inner.extend(new, *_family_range())
            return all(
                self.types_equal(inner, subst_type(x, sa), subst_type(y, sb)) for x, y in zip(a.params, b.params)
            )
        return type(a) is type(b) and not isinstance(a, (A.Reg, A.Circuit, A.Family))

    def subtype(self, delta: IndexContext, actual: A.Type, expected: A.Type, e: A.Expr) -> None:
        if isinstance(expected, A.Reg) and isinstance(actual, A.Reg) and type(expected.base) is type(actual.base):
            self._require(
                delta,
                Constraint(Rel.LE, expected.size, actual.size),
                e.span,
                f"{format_expr(e)} has type {format_type(actual)}, too short for {format_type(expected)}",
                ErrorKind.MISMATCH,
            )
            return
        if not self.types_equal(delta, actual, expected):
            raise TypeCheckError(
                ErrorKind.MISMATCH,
                f"expected {format_type(expected)}, found {format_type(actual)} for {format_expr(e)}",
                e.span,
            )

    # -- expressions ----------------------------------------------------------

    def check_expr(self, delta: IndexContext, gamma: TypeContext, e: A.Expr, expected: Optional[A.Type] = None) -> A.Type:
        t = self._infer(delta, gamma, e)
        if expected is not None:
            self.subtype(delta, t, expected, e)
        return t

    def _lookup(self, gamma: TypeContext, name: str, span) -> A.Type:
        t = gamma.lookup(name)
        if t is None:
            raise TypeCheckError(ErrorKind.UNBOUND, f"unbound identifier {name}", span)
        return t

    def _register(self, gamma, e) -> A.Reg:
        t = self._lookup(gamma, e.name, e.span)
        if not isinstance(t, A.Reg):
            raise TypeCheckError(ErrorKind.MISMATCH, f"cannot index {e.name} of type {format_type(t)}", e.span)
        return t

    def _infer(self, delta: IndexContext, gamma: TypeContext, e: A.Expr) -> A.Type:
        if isinstance(e, A.Var):
            return self._lookup(gamma, e.name, e.span)
        if isinstance(e, A.Deref):
            reg = self._register(gamma, e)
            self._bound_vars(delta, e.index, e.span)
            shown = format_expr(e)
            self._require(delta, Constraint(Rel.GE, e.index, A.NatLit(0)), e.span, f"index may be negative in {shown}")
            self._require(
                delta, Constraint(Rel.LT, e.index, reg.size), e.span, f"index may exceed register length in {shown}"
            )
            return reg.base
        if isinstance(e, A.Slice):
            self._strict("array slicing", e.span)
            reg = self._register(gamma, e)
            self._bound_vars(delta, e.lo, e.span)
            self._bound_vars(delta, e.hi, e.span)
            shown = format_expr(e)
            self._require(delta, Constraint(Rel.GE, e.lo, A.NatLit(0)), e.span, f"slice start may be negative in {shown}")
            self._require(delta, Constraint(Rel.LE, e.lo, e.hi), e.span, f"slice may be empty or reversed in {shown}")
            self._require(
                delta, Constraint(Rel.LT, e.hi, reg.size), e.span, f"slice end may exceed register length in {shown}"
            )
            return A.Reg(reg.base, A.Add(A.Sub(e.hi, e.lo), A.NatLit(1)))
        if isinstance(e, A.Instance):
            self._strict("instance", e.span)
            t = self._infer(delta, gamma, e.target)
            if not isinstance(t, A.Family):
                raise TypeCheckError(
                    ErrorKind.NOT_A_CIRCUIT, f"{format_expr(e.target)} of type {format_type(t)} is not a family", e.span
                )
            if len(e.indices) != len(t.index_vars):
                raise TypeCheckError(
                    ErrorKind.ARITY,
                    f"{format_expr(e.target)} takes {len(t.index_vars)} index argument(s), got {len(e.indices)}",
                    e.span,
                )
            for i in e.indices:
                self._bound_vars(delta, i, e.span)
                self._require(
                    delta,
                    Constraint(Rel.GE, i, A.NatLit(FAMILY_INDEX_MIN)),
                    e.span,
                    f"instance index {format_index(i)} may be below {FAMILY_INDEX_MIN}",
                )
            s = dict(zip(t.index_vars, e.indices))
            return A.Circuit(tuple(subst_type(p, s) for p in t.params))
        raise TypeError(f"not an expression: {e!r}")

    # -- unitary statements ----------------------------------------------------

    def check_unitary(self, delta: IndexContext, gamma: TypeContext, u: A.UnitaryStmt) -> None:
        try:
            self._unitary(delta, gamma, u)
        except TypeCheckError as err:
            self.errors.append(err)

    def _qbit_args(self, delta, gamma, args) -> None:
        for a in args:
            self._collect(self.check_expr, delta, gamma, a, A.Qbit())

    def _unitary(self, delta: IndexContext, gamma: TypeContext, u: A.UnitaryStmt) -> None:
        if isinstance(u, A.USeq):
            for s in A.flatten_useq(u):
                self.check_unitary(delta, gamma, s)
        elif isinstance(u, A.CX):
            self._qbit_args(delta, gamma, (u.control, u.target))
        elif isinstance(u, (A.H, A.T, A.Tdg)):
            self._qbit_args(delta, gamma, (u.arg,))
        elif isinstance(u, A.CPhase):
            self._strict("cphase", u.span)
            self._bound_vars(delta, u.k, u.span)
            self._require(delta, Constraint(Rel.GE, u.k, A.NatLit(0)), u.span, f"cphase index {format_index(u.k)} may be negative")
            self._qbit_args(delta, gamma, (u.control, u.target))
        elif isinstance(u, A.Apply):
            t = self.check_expr(delta, gamma, u.target)
            name = format_expr(u.target)
            if isinstance(t, A.Family):
                raise TypeCheckError(
                    ErrorKind.NOT_A_CIRCUIT, f"family {name} must be specialised with instance(...) before use", u.span
                )
            if not isinstance(t, A.Circuit):
                raise TypeCheckError(ErrorKind.NOT_A_CIRCUIT, f"{name} of type {format_type(t)} is not a circuit", u.span)
            if len(u.args) != len(t.params):
                raise TypeCheckError(
                    ErrorKind.ARITY, f"{name} expects {len(t.params)} argument(s), got {len(u.args)}", u.span
                )
            for arg, p in zip(u.args, t.params):
                self._collect(self.check_expr, delta, gamma, arg, p)
        elif isinstance(u, A.Reverse):
            self._strict("reverse", u.span)
            self.check_unitary(delta, gamma, u.body)
        elif isinstance(u, A.For):
            self._strict("for", u.span)
            for bound in (u.lo, u.hi):
                self._bound_vars(delta, bound, u.span)
                infer_index_interval(delta, bound)
            if u.var in gamma:
                raise TypeCheckError(ErrorKind.SHADOWING, f"loop variable {u.var} shadows a declared name", u.span)
            if u.var in delta:
                raise TypeCheckError(ErrorKind.SHADOWING, f"loop variable {u.var} shadows an index variable", u.span)
            self.check_unitary(delta.extend(u.var, u.lo, u.hi), gamma, u.body)
        else:
            raise TypeError(f"not a unitary statement: {u!r}")

    # -- commands -----------------------------------------------------------

    def _params(self, delta, gamma, params, span) -> TypeContext:
        seen = set()
        for p in params:
            if p.name in seen:
                self.errors.append(TypeCheckError(ErrorKind.DUPLICATE, f"duplicate parameter {p.name}", p.span or span))
            seen.add(p.name)
            self.errors.extend(self.kind_check(delta, p.type, p.span or span))
            gamma = gamma.extend(p.name, p.type)
        return gamma

    def check_command(self, delta: IndexContext, gamma: TypeContext, c: A.Command) -> None:
        # iterate along scopes/sequences to keep recursion depth bounded by nesting
        stack = [(delta, gamma, c)]
        while stack:
            delta, gamma, c = stack.pop()
            try:
                nxt = self._command(delta, gamma, c)
            except TypeCheckError as err:
                self.errors.append(err)
                continue
            stack.extend(reversed(nxt))

    def _command(self, delta, gamma, c) -> list:
        if isinstance(c, A.Skip):
            return []
        if isinstance(c, A.Seq):
            return [(delta, gamma, c.first), (delta, gamma, c.second)]
        if isinstance(c, A.Header):
            return [(delta, gamma, c.scope)]
        if isinstance(c, A.Include):
            self.errors.append(
                TypeCheckError(ErrorKind.UNRESOLVED_INCLUDE, f'include "{c.path}" was not resolved', c.span)
            )
            return [(delta, gamma, c.scope)]
        if isinstance(c, (A.CregIn, A.QregIn)):
            base = A.Bit() if isinstance(c, A.CregIn) else A.Qbit()
            t = A.Reg(base, c.size)
            self.errors.extend(self.kind_check(delta, t, c.span))
            return [(delta, gamma.extend(c.name, t), c.scope)]
        if isinstance(c, A.GateIn):
            inner = self._params(delta, gamma, c.params, c.span)
            self.check_unitary(delta, inner, c.body)
            t = A.Circuit(tuple(p.type for p in c.params))
            return [(delta, gamma.extend(c.name, t), c.scope)]
        if isinstance(c, A.FamilyIn):
            t = A.Family(c.index_vars, tuple(p.type for p in c.params))
            try:
                self._strict("family", c.span)
            except TypeCheckError as err:
                self.errors.append(err)
                return [(delta, gamma.extend(c.name, t), c.scope)]
            if len(set(c.index_vars)) != len(c.index_vars):
                self.errors.append(TypeCheckError(ErrorKind.DUPLICATE, f"duplicate index variable in family {c.name}", c.span))
                return [(delta, gamma.extend(c.name, t), c.scope)]
            inner_delta = delta
            for y in c.index_vars:
                if y in inner_delta:
                    self.errors.append(TypeCheckError(ErrorKind.SHADOWING, f"index variable {y} is already bound", c.span))
                    return [(delta, gamma.extend(c.name, t), c.scope)]
                inner_delta = inner_delta.extend(y, *_family_range())
            inner = self._params(inner_delta, gamma, c.params, c.span)
            self.check_unitary(inner_delta, inner, c.body)
            return [(delta, gamma.extend(c.name, t), c.scope)]
        if isinstance(c, A.Measure):
            self._collect(self.check_expr, delta, gamma, c.src, A.Qbit())
            self._collect(self.check_expr, delta, gamma, c.dst, A.Bit())
            return []
        if isinstance(c, A.Reset):
            self.check_expr(delta, gamma, c.arg, A.Qbit())
            return []
        if isinstance(c, A.IfEq):
            self._collect(self.check_expr, delta, gamma, c.cond, A.Bit())
            if c.value not in (0, 1):
                self.warnings.append(
                    TypeCheckError(
                        ErrorKind.NON_BIT_LITERAL,
                        f"condition compares a bit with {c.value}; the body never runs",
                        c.span,
                        severity="warning",
                    )
                )
            self.check_unitary(delta, gamma, c.body)
            return []
        if isinstance(c, A.UStmt):
            self.check_unitary(delta, gamma, c.stmt)
            return []
        raise TypeError(f"not a command: {c!r}")

    def check_program(self, c: A.Command) -> list[TypeCheckError]:
        gamma = TypeContext() if self.strict_typed else BUILTINS
        self.check_command(EMPTY_INDEX_CONTEXT, gamma, c)
        return self.errors


# -- functional surface -------------------------------------------------------


def kind_check(delta: IndexContext, tau: A.Type) -> list[TypeCheckError]:
    return Checker().kind_check(delta, tau)


def check_expr(delta: IndexContext, gamma: TypeContext, e: A.Expr, expected: Optional[A.Type] = None) -> A.Type:
    """Type of ``e``; raises :class:`TypeCheckError` when ill-typed."""
    return Checker().check_expr(delta, gamma, e, expected)


def check_unitary(delta: IndexContext, gamma: TypeContext, u: A.UnitaryStmt) -> list[TypeCheckError]:
    checker = Checker()
    checker.check_unitary(delta, gamma, u)
    return checker.errors


def check_command(delta: IndexContext, gamma: TypeContext, c: A.Command) -> list[TypeCheckError]:
    checker = Checker()
    checker.check_command(delta, gamma, c)
    return checker.errors


def check_program(c: A.Command, strict_typed: bool = False) -> list[TypeCheckError]:
    return Checker(strict_typed).check_program(c)
