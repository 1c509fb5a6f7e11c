"""Canonical concrete syntax.

Declarations in tail position print in flat openQASM style; a declaration
followed by further commands outside its scope prints with an explicit
``in { ... }`` block so that re-parsing reproduces the same tree.
"""
from __future__ import annotations

from . import ast as A

INDENT = "  "

_PREC = {A.Add: 1, A.Sub: 1, A.Mul: 2}


def format_index(i: A.IndexExpr) -> str:
    if isinstance(i, A.NatLit):
        return str(i.value)
    if isinstance(i, A.IndexVar):
        return i.name
    if isinstance(i, A.Infinity):
        return "inf"
    op = {A.Add: "+", A.Sub: "-", A.Mul: "*"}[type(i)]
    prec = _PREC[type(i)]
    left = format_index(i.left)
    right = format_index(i.right)
    if type(i.left) in _PREC and _PREC[type(i.left)] < prec:
        left = f"({left})"
    # operators parse left-associatively, so an equal-precedence right operand keeps its parens
    if type(i.right) in _PREC and _PREC[type(i.right)] <= prec:
        right = f"({right})"
    return f"{left}{op}{right}"


def format_type(t: A.Type) -> str:
    if isinstance(t, A.Bit):
        return "Bit"
    if isinstance(t, A.Qbit):
        return "Qbit"
    if isinstance(t, A.Unit):
        return "Unit"
    if isinstance(t, A.Reg):
        return f"{format_type(t.base)}[{format_index(t.size)}]"
    if isinstance(t, A.Circuit):
        return "Circuit(" + ", ".join(format_type(p) for p in t.params) + ")"
    if isinstance(t, A.Family):
        return f"Family({', '.join(t.index_vars)})(" + ", ".join(format_type(p) for p in t.params) + ")"
    raise TypeError(f"not a type: {t!r}")


def format_expr(e: A.Expr) -> str:
    if isinstance(e, A.Var):
        return e.name
    if isinstance(e, A.Deref):
        return f"{e.name}[{format_index(e.index)}]"
    if isinstance(e, A.Slice):
        return f"{e.name}[{format_index(e.lo)}..{format_index(e.hi)}]"
    if isinstance(e, A.Instance):
        return f"instance({', '.join(format_index(i) for i in e.indices)}) {format_expr(e.target)}"
    # runtime values substituted into trees by the interpreter
    return repr(e)


def _params(params) -> str:
    return "(" + ", ".join(f"{p.name}:{format_type(p.type)}" for p in params) + ")"


def _args(args) -> str:
    return "(" + ", ".join(format_expr(a) for a in args) + ")"


def _block(u: A.UnitaryStmt, depth: int) -> list[str]:
    lines = []
    for s in A.flatten_useq(u):
        lines.extend(_stmt(s, depth))
    return lines


def _stmt(u: A.UnitaryStmt, depth: int) -> list[str]:
    pad = INDENT * depth
    if isinstance(u, A.CX):
        return [f"{pad}cx{_args((u.control, u.target))};"]
    if isinstance(u, (A.H, A.T, A.Tdg)):
        name = {A.H: "h", A.T: "t", A.Tdg: "tdg"}[type(u)]
        return [f"{pad}{name}({format_expr(u.arg)});"]
    if isinstance(u, A.CPhase):
        return [f"{pad}cphase({format_index(u.k)}){_args((u.control, u.target))};"]
    if isinstance(u, A.Apply):
        return [f"{pad}{format_expr(u.target)}{_args(u.args)};"]
    if isinstance(u, A.USeq):
        return _block(u, depth)
    if isinstance(u, A.Reverse):
        return [f"{pad}reverse {{"] + _block(u.body, depth + 1) + [f"{pad}}}"]
    if isinstance(u, A.For):
        head = f"{pad}for {u.var}={format_index(u.lo)}..{format_index(u.hi)} do {{"
        return [head] + _block(u.body, depth + 1) + [f"{pad}}}"]
    raise TypeError(f"not a unitary statement: {u!r}")


def _decl_head(c, depth: int) -> list[str]:
    pad = INDENT * depth
    if isinstance(c, (A.QregIn, A.CregIn)):
        kw = "qreg" if isinstance(c, A.QregIn) else "creg"
        return [f"{pad}{kw} {c.name}[{format_index(c.size)}]"]
    if isinstance(c, A.Include):
        return [f'{pad}include "{c.path}"']
    if isinstance(c, A.Header):
        return [f"{pad}OPENQASM {c.version}"]
    if isinstance(c, A.GateIn):
        head = f"{pad}gate {c.name}{_params(c.params)} {{"
    else:
        head = f"{pad}family({', '.join(c.index_vars)}) {c.name}{_params(c.params)} {{"
    return [head] + _block(c.body, depth + 1) + [f"{pad}}}"]


def _command(c: A.Command, depth: int, tail: bool) -> list[str]:
    pad = INDENT * depth
    if isinstance(c, A.Skip):
        return []
    if isinstance(c, A.Seq):
        return _command(c.first, depth, False) + _command(c.second, depth, tail)
    if isinstance(c, A.DECLARATIONS):
        head = _decl_head(c, depth)
        braced = isinstance(c, (A.GateIn, A.FamilyIn))
        if tail or isinstance(c, A.Header):
            if not braced:
                head[-1] += ";"
            return head + _command(c.scope, depth, True)
        head[-1] += " in {"
        return head + _command(c.scope, depth + 1, True) + [f"{pad}}}"]
    if isinstance(c, A.Measure):
        return [f"{pad}measure {format_expr(c.src)} -> {format_expr(c.dst)};"]
    if isinstance(c, A.Reset):
        return [f"{pad}reset {format_expr(c.arg)};"]
    if isinstance(c, A.IfEq):
        return [f"{pad}if({format_expr(c.cond)}=={c.value}) {{"] + _block(c.body, depth + 1) + [f"{pad}}}"]
    if isinstance(c, A.UStmt):
        return _stmt(c.stmt, depth)
    raise TypeError(f"not a command: {c!r}")


def pretty_print(c: A.Command) -> str:
    lines = _command(c, 0, True)
    return "\n".join(lines) + ("\n" if lines else "")
