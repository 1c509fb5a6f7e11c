"""Index-variable substitution and free-variable queries over syntax trees."""
from __future__ import annotations

import itertools
from dataclasses import replace
from typing import Mapping

from . import ast as A

IndexSubst = Mapping[str, A.IndexExpr]

_fresh = itertools.count()


def index_vars(i: A.IndexExpr) -> set[str]:
    if isinstance(i, A.IndexVar):
        return {i.name}
    if isinstance(i, (A.Add, A.Sub, A.Mul)):
        return index_vars(i.left) | index_vars(i.right)
    return set()


def subst_index(i: A.IndexExpr, s: IndexSubst) -> A.IndexExpr:
    if isinstance(i, A.IndexVar):
        return s.get(i.name, i)
    if isinstance(i, (A.Add, A.Sub, A.Mul)):
        return type(i)(subst_index(i.left, s), subst_index(i.right, s), i.span)
    return i


def type_index_vars(t: A.Type) -> set[str]:
    if isinstance(t, A.Reg):
        return index_vars(t.size)
    if isinstance(t, A.Circuit):
        return set().union(*(type_index_vars(p) for p in t.params))
    if isinstance(t, A.Family):
        inner = set().union(*(type_index_vars(p) for p in t.params))
        return inner - set(t.index_vars)
    return set()


def fresh_name(base: str, avoid: set[str]) -> str:
    while True:
        name = f"{base}'{next(_fresh)}"
        if name not in avoid:
            return name


def subst_type(t: A.Type, s: IndexSubst) -> A.Type:
    if isinstance(t, A.Reg):
        return A.Reg(t.base, subst_index(t.size, s))
    if isinstance(t, A.Circuit):
        return A.Circuit(tuple(subst_type(p, s) for p in t.params))
    if isinstance(t, A.Family):
        s = {k: v for k, v in s.items() if k not in t.index_vars}
        if not s:
            return t
        incoming = set().union(*(index_vars(v) for v in s.values()))
        binders = list(t.index_vars)
        params = t.params
        for pos, y in enumerate(binders):
            if y in incoming:
                new = fresh_name(y, incoming | set(binders))
                params = tuple(subst_type(p, {y: A.IndexVar(new)}) for p in params)
                binders[pos] = new
        return A.Family(tuple(binders), tuple(subst_type(p, s) for p in params))
    return t


def subst_expr(e: A.Expr, s: IndexSubst) -> A.Expr:
    if isinstance(e, A.Deref):
        return replace(e, index=subst_index(e.index, s))
    if isinstance(e, A.Slice):
        return replace(e, lo=subst_index(e.lo, s), hi=subst_index(e.hi, s))
    if isinstance(e, A.Instance):
        return replace(e, indices=tuple(subst_index(i, s) for i in e.indices), target=subst_expr(e.target, s))
    return e


def subst_unitary(u: A.UnitaryStmt, s: IndexSubst) -> A.UnitaryStmt:
    """``u{I/y}``.  Loop binders shadow; captured binders are renamed."""
    if not s:
        return u
    if isinstance(u, A.CX):
        return replace(u, control=subst_expr(u.control, s), target=subst_expr(u.target, s))
    if isinstance(u, (A.H, A.T, A.Tdg)):
        return replace(u, arg=subst_expr(u.arg, s))
    if isinstance(u, A.CPhase):
        return replace(
            u, k=subst_index(u.k, s), control=subst_expr(u.control, s), target=subst_expr(u.target, s)
        )
    if isinstance(u, A.Apply):
        return replace(u, target=subst_expr(u.target, s), args=tuple(subst_expr(a, s) for a in u.args))
    if isinstance(u, A.USeq):
        return replace(u, first=subst_unitary(u.first, s), second=subst_unitary(u.second, s))
    if isinstance(u, A.Reverse):
        return replace(u, body=subst_unitary(u.body, s))
    if isinstance(u, A.For):
        lo, hi = subst_index(u.lo, s), subst_index(u.hi, s)
        inner = {k: v for k, v in s.items() if k != u.var}
        var, body = u.var, u.body
        incoming = set().union(set(), *(index_vars(v) for v in inner.values()))
        if var in incoming:
            new = fresh_name(var, incoming)
            body = subst_unitary(body, {var: A.IndexVar(new)})
            var = new
        return replace(u, var=var, lo=lo, hi=hi, body=subst_unitary(body, inner))
    raise TypeError(f"not a unitary statement: {u!r}")


def eval_closed_index(i: A.IndexExpr) -> int:
    """Integer value of a variable-free index expression."""
    if isinstance(i, A.NatLit):
        return i.value
    if isinstance(i, A.Add):
        return eval_closed_index(i.left) + eval_closed_index(i.right)
    if isinstance(i, A.Sub):
        return eval_closed_index(i.left) - eval_closed_index(i.right)
    if isinstance(i, A.Mul):
        return eval_closed_index(i.left) * eval_closed_index(i.right)
    if isinstance(i, A.IndexVar):
        raise LookupError(f"free index variable {i.name!r}")
    raise ValueError("infinity has no integer value")
