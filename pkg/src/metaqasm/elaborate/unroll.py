"""Static unrolling of unitary programs into flat gate sequences.

This walk never touches a state vector: loops are expanded by substitution,
closures are inlined and ``reverse`` daggers the already-expanded sub-sequence.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..semantics import gates as G
from ..semantics.gates import Gate
from ..semantics.state import QuantumState, apply_gate
from ..semantics.values import EMPTY_ENVIRONMENT, CircuitClosure, Environment, FamilyClosure, Register
from ..syntax import ast as A
from ..syntax.subst import eval_closed_index, subst_type, subst_unitary


class ElaborationError(Exception):
    pass


class NonUnitaryError(ElaborationError):
    """Measurement, reset or classical control met while unrolling."""


class UnresolvedFamilyError(ElaborationError):
    """A family was applied without ``instance``."""


class EntryError(ElaborationError):
    """The requested entry point cannot be instantiated."""


@dataclass(frozen=True)
class GateEvent:
    gate: Gate
    locs: tuple[int, ...]

    def __post_init__(self):
        if len(self.locs) != self.gate.arity or len(set(self.locs)) != len(self.locs):
            raise ElaborationError(f"bad locations {self.locs} for {self.gate}")

    def dagger(self) -> "GateEvent":
        return GateEvent(self.gate.dagger(), self.locs)

    def __str__(self) -> str:
        return f"{self.gate}{list(self.locs)}"


@dataclass(frozen=True)
class FlatCircuit:
    num_qubits: int
    events: tuple[GateEvent, ...] = ()
    # register name -> allocated location ranges, in declaration order
    register_map: dict[str, tuple[range, ...]] = field(default_factory=dict)

    def __post_init__(self):
        for e in self.events:
            if max(e.locs) >= self.num_qubits:
                raise ValueError(f"event {e} outside {self.num_qubits} qubits")

    def gate_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for e in self.events:
            counts[e.gate.label] = counts.get(e.gate.label, 0) + 1
        return counts


def invert(circuit: FlatCircuit) -> FlatCircuit:
    return FlatCircuit(
        circuit.num_qubits, tuple(e.dagger() for e in reversed(circuit.events)), dict(circuit.register_map)
    )


def simulate_flat(circuit: FlatCircuit, initial: QuantumState) -> QuantumState:
    if initial.num_qubits != circuit.num_qubits:
        raise ValueError(f"state has {initial.num_qubits} qubits, circuit needs {circuit.num_qubits}")
    state = initial.copy()
    for e in circuit.events:
        apply_gate(state, e.gate, e.locs)
    return state


# -- the walk -----------------------------------------------------------------


def _index(i: A.IndexExpr) -> int:
    try:
        return eval_closed_index(i)
    except (LookupError, ValueError) as err:
        raise ElaborationError(f"index is not closed: {err}") from None


def _value(env: Environment, e: A.Expr):
    if isinstance(e, A.Var):
        v = env.lookup(e.name)
        if v is None:
            raise ElaborationError(f"unbound identifier {e.name}")
        return v
    if isinstance(e, (A.Deref, A.Slice)):
        reg = env.lookup(e.name)
        if not isinstance(reg, Register):
            raise ElaborationError(f"{e.name} is not a register")
        if isinstance(e, A.Deref):
            return reg.locations[_index(e.index)]
        return Register(reg.locations[_index(e.lo) : _index(e.hi) + 1], reg.quantum)
    if isinstance(e, A.Instance):
        fam = _value(env, e.target)
        if not isinstance(fam, FamilyClosure):
            raise ElaborationError("instance of a non-family")
        s = {y: A.const(_index(i)) for y, i in zip(fam.index_vars, e.indices)}
        return CircuitClosure(fam.params, subst_unitary(fam.body, s), fam.env)
    raise ElaborationError(f"not an expression: {e!r}")


def _loc(env: Environment, e: A.Expr) -> int:
    v = _value(env, e)
    if not isinstance(v, int):
        raise ElaborationError("expected a single qubit")
    return v


def expand(env: Environment, u: A.UnitaryStmt, out: list[GateEvent]) -> None:
    """Append the events of ``u`` (run forwards) to ``out``."""
    if isinstance(u, A.USeq):
        for s in A.flatten_useq(u):
            expand(env, s, out)
    elif isinstance(u, A.CX):
        out.append(GateEvent(G.CX, (_loc(env, u.control), _loc(env, u.target))))
    elif isinstance(u, A.H):
        out.append(GateEvent(G.H, (_loc(env, u.arg),)))
    elif isinstance(u, A.T):
        out.append(GateEvent(G.T, (_loc(env, u.arg),)))
    elif isinstance(u, A.Tdg):
        out.append(GateEvent(G.TDG, (_loc(env, u.arg),)))
    elif isinstance(u, A.CPhase):
        out.append(GateEvent(G.cphase(_index(u.k)), (_loc(env, u.control), _loc(env, u.target))))
    elif isinstance(u, A.Apply):
        closure = _value(env, u.target)
        if isinstance(closure, FamilyClosure):
            raise UnresolvedFamilyError("family applied without instance(...)")
        if not isinstance(closure, CircuitClosure):
            raise ElaborationError("applied value is not a circuit")
        args = [_value(env, a) for a in u.args]
        inner = closure.env.extend_many((p.name, v) for p, v in zip(closure.params, args))
        expand(inner, closure.body, out)
    elif isinstance(u, A.Reverse):
        sub: list[GateEvent] = []
        expand(env, u.body, sub)
        out.extend(e.dagger() for e in reversed(sub))
    elif isinstance(u, A.For):
        for i in range(_index(u.lo), _index(u.hi) + 1):
            expand(env, subst_unitary(u.body, {u.var: A.const(i)}), out)
    else:
        raise ElaborationError(f"not a unitary statement: {u!r}")


def unroll_unitary(u: A.UnitaryStmt, env: Environment, num_qubits: int) -> FlatCircuit:
    out: list[GateEvent] = []
    expand(env, u, out)
    return FlatCircuit(num_qubits, tuple(out))


def unroll(program: A.Command) -> FlatCircuit:
    """Flatten a typechecked program made of declarations and unitary
    statements; the result acts on ``|0...0>`` exactly as running it."""
    events: list[GateEvent] = []
    regs: dict[str, list[range]] = {}
    count = 0
    stack: list[tuple[Environment, A.Command]] = [(EMPTY_ENVIRONMENT, program)]
    while stack:
        env, c = stack.pop()
        if isinstance(c, A.Skip):
            continue
        if isinstance(c, A.Seq):
            stack.extend(reversed([(env, part) for part in A.flatten_seq(c)]))
        elif isinstance(c, A.Header):
            stack.append((env, c.scope))
        elif isinstance(c, A.CregIn):
            stack.append((env.extend(c.name, Register((), quantum=False)), c.scope))
        elif isinstance(c, A.QregIn):
            k = _index(c.size)
            reg = Register(tuple(range(count, count + k)), quantum=True)
            regs.setdefault(c.name, []).append(range(count, count + k))
            count += k
            stack.append((env.extend(c.name, reg), c.scope))
        elif isinstance(c, A.GateIn):
            stack.append((env.extend(c.name, CircuitClosure(c.params, c.body, env)), c.scope))
        elif isinstance(c, A.FamilyIn):
            stack.append((env.extend(c.name, FamilyClosure(c.index_vars, c.params, c.body, env)), c.scope))
        elif isinstance(c, A.UStmt):
            expand(env, c.stmt, events)
        elif isinstance(c, (A.Measure, A.Reset, A.IfEq)):
            where = f"{c.span}: " if c.span else ""
            raise NonUnitaryError(f"{where}{type(c).__name__.lower()} cannot be part of a flat circuit")
        else:
            raise ElaborationError(f"cannot unroll {type(c).__name__}")
    return FlatCircuit(count, tuple(events), {k: tuple(v) for k, v in regs.items()})


# -- entry points -------------------------------------------------------------


def _declarations(c: A.Command, tail: A.Command) -> A.Command:
    """The declarations visible at the end of ``c``, scoping over ``tail``."""
    if isinstance(c, A.DECLARATIONS):
        return A.with_scope(c, _declarations(c.scope, tail))
    if isinstance(c, A.Seq):
        return _declarations(c.second, tail)
    return tail


def _visible(c: A.Command) -> dict[str, A.Command]:
    found: dict[str, A.Command] = {}
    while True:
        if isinstance(c, (A.GateIn, A.FamilyIn, A.CregIn, A.QregIn)):
            found[c.name] = c
        if isinstance(c, A.DECLARATIONS):
            c = c.scope
        elif isinstance(c, A.Seq):
            c = c.second
        else:
            return found


def entry_harness(program: A.Command, entry: str, indices: Sequence[int] = ()) -> A.Command:
    """A program that allocates one register per parameter of ``entry`` and
    applies it once, inside the declarations of ``program``."""
    visible = _visible(program)
    decl = visible.get(entry)
    if not isinstance(decl, (A.GateIn, A.FamilyIn)):
        raise EntryError(f"no gate or family named {entry!r}")
    params = decl.params
    target: A.Expr = A.Var(entry)
    if isinstance(decl, A.FamilyIn):
        if len(indices) != len(decl.index_vars):
            raise EntryError(f"family {entry} takes {len(decl.index_vars)} index argument(s), got {len(indices)}")
        if any(i < 0 for i in indices):
            raise EntryError("index arguments must be natural numbers")
        s = {y: A.NatLit(i) for y, i in zip(decl.index_vars, indices)}
        params = tuple(A.Param(p.name, subst_type(p.type, s)) for p in params)
        target = A.Instance(tuple(A.NatLit(i) for i in indices), target)
    elif indices:
        raise EntryError(f"gate {entry} takes no index arguments")

    taken = set(visible)
    regs: list[tuple[str, int]] = []
    args: list[A.Expr] = []
    for p in params:
        name = p.name
        suffix = 0
        while name in taken:
            suffix += 1
            name = f"{p.name}{suffix}"
        taken.add(name)
        if isinstance(p.type, A.Qbit):
            regs.append((name, 1))
            args.append(A.Deref(name, A.NatLit(0)))
        elif isinstance(p.type, A.Reg) and isinstance(p.type.base, A.Qbit):
            size = eval_closed_index(p.type.size)
            if size < 0:
                raise EntryError(f"parameter {p.name} of {entry} would have negative length {size}")
            regs.append((name, size))
            args.append(A.Var(name))
        else:
            raise EntryError(f"parameter {p.name} of {entry} is not a qubit register; cannot build a harness")

    body: A.Command = A.UStmt(A.Apply(target, tuple(args)))
    for name, size in reversed(regs):
        body = A.QregIn(name, A.NatLit(size), body)
    return _declarations(program, body)


def unroll_entry(program: A.Command, entry: str, indices: Sequence[int] = ()) -> FlatCircuit:
    return unroll(entry_harness(program, entry, indices))
