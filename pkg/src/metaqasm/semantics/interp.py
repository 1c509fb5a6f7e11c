"""Big-step evaluation of commands (forward) and unitary statements (forward
and reverse) over configurations ``<sigma, eta, |psi>>``."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from ..syntax import ast as A
from ..syntax.subst import subst_unitary
from . import gates as G
from .errors import BranchLimitError, InterpreterError, ResourceLimitError
from .state import QuantumState, apply_gate
from .values import (
    EMPTY_ENVIRONMENT,
    CircuitClosure,
    Environment,
    FamilyClosure,
    Location,
    Register,
    Value,
)

DEFAULT_MAX_QUBITS = 24
DEFAULT_MAX_BRANCHES = 1024
PRUNE_PROBABILITY = 1e-12


class Direction(enum.Enum):
    FORWARD = "forward"
    REVERSE = "reverse"

    def flipped(self) -> "Direction":
        return Direction.REVERSE if self is Direction.FORWARD else Direction.FORWARD


FORWARD = Direction.FORWARD
REVERSE = Direction.REVERSE


@dataclass(frozen=True)
class Sample:
    """Draw one outcome per measurement from numpy's PCG64 stream."""

    seed: int = 0


@dataclass(frozen=True)
class Enumerate:
    """Follow every outcome with nonzero probability."""

    max_branches: int = DEFAULT_MAX_BRANCHES


MeasurementPolicy = Union[Sample, Enumerate]


@dataclass
class ClassicalHeap:
    bits: dict[int, int] = field(default_factory=dict)
    next_free: int = 0

    def read(self, loc: int) -> int:
        return self.bits.get(loc, 0)

    def allocate(self, k: int) -> list[int]:
        locs = list(range(self.next_free, self.next_free + k))
        self.next_free += k
        return locs

    def copy(self) -> "ClassicalHeap":
        return ClassicalHeap(dict(self.bits), self.next_free)


@dataclass
class Configuration:
    env: Environment
    heap: ClassicalHeap
    state: QuantumState
    weight: float = 1.0
    # every creg/qreg allocated so far, in order, for reporting
    registers: tuple[tuple[str, Register], ...] = ()

    def branch(self) -> "Configuration":
        return replace(self, heap=self.heap.copy(), state=self.state.copy())

    def classical_registers(self) -> list[tuple[str, list[int]]]:
        return [(name, [self.heap.read(l) for l in r.locations]) for name, r in self.registers if not r.quantum]


def initial_configuration() -> Configuration:
    return Configuration(EMPTY_ENVIRONMENT, ClassicalHeap(), QuantumState.zero(0))


# -- indices and expressions --------------------------------------------------


def eval_index(i: A.IndexExpr) -> int:
    """Value of a closed index expression.  A free variable here means an
    earlier substitution was skipped, which is a bug, not a user error."""
    if isinstance(i, A.NatLit):
        return i.value
    if isinstance(i, A.Add):
        return eval_index(i.left) + eval_index(i.right)
    if isinstance(i, A.Sub):
        return eval_index(i.left) - eval_index(i.right)
    if isinstance(i, A.Mul):
        return eval_index(i.left) * eval_index(i.right)
    if isinstance(i, A.IndexVar):
        raise InterpreterError(f"internal error: free index variable {i.name} at run time")
    raise InterpreterError("internal error: infinity at run time")


def _lookup(env: Environment, name: str) -> Value:
    v = env.lookup(name)
    if v is None:
        raise InterpreterError(f"unbound identifier {name}")
    return v


def eval_expr(env: Environment, e: A.Expr) -> Value:
    if isinstance(e, A.Var):
        return _lookup(env, e.name)
    if isinstance(e, A.Deref):
        reg = _lookup(env, e.name)
        if not isinstance(reg, Register):
            raise InterpreterError(f"{e.name} is not a register")
        i = eval_index(e.index)
        if not 0 <= i < len(reg):
            raise InterpreterError(f"index {i} out of range for {e.name} of length {len(reg)}")
        return reg.locations[i]
    if isinstance(e, A.Slice):
        reg = _lookup(env, e.name)
        if not isinstance(reg, Register):
            raise InterpreterError(f"{e.name} is not a register")
        lo, hi = eval_index(e.lo), eval_index(e.hi)
        if not 0 <= lo <= hi < len(reg):
            raise InterpreterError(f"slice {lo}..{hi} out of range for {e.name} of length {len(reg)}")
        return Register(reg.locations[lo : hi + 1], reg.quantum)
    if isinstance(e, A.Instance):
        fam = eval_expr(env, e.target)
        if not isinstance(fam, FamilyClosure):
            raise InterpreterError("instance applied to a non-family")
        values = [eval_index(i) for i in e.indices]
        s = {y: A.const(v) for y, v in zip(fam.index_vars, values)}
        return CircuitClosure(fam.params, subst_unitary(fam.body, s), fam.env)
    raise InterpreterError(f"not an expression: {e!r}")


def _qubit(env: Environment, e: A.Expr) -> Location:
    v = eval_expr(env, e)
    if isinstance(v, Register) and len(v) == 1 and v.quantum:
        return v.locations[0]
    if not isinstance(v, int):
        raise InterpreterError("expected a single qubit")
    return v


# -- unitary statements ---------------------------------------------------------

_FORWARD_GATES = {A.H: G.H, A.T: G.T, A.Tdg: G.TDG}


def eval_unitary(env: Environment, state: QuantumState, u: A.UnitaryStmt, direction: Direction = FORWARD) -> QuantumState:
    """Run ``u`` on ``state`` (updated in place and returned).  REVERSE runs the
    inverse: sequences backwards, T and Tdg swapped, loops from the top."""
    forward = direction is FORWARD
    if isinstance(u, A.USeq):
        parts = A.flatten_useq(u)
        for s in parts if forward else reversed(parts):
            eval_unitary(env, state, s, direction)
    elif isinstance(u, A.CX):
        apply_gate(state, G.CX, [_qubit(env, u.control), _qubit(env, u.target)])
    elif isinstance(u, (A.H, A.T, A.Tdg)):
        g = _FORWARD_GATES[type(u)]
        apply_gate(state, g if forward else g.dagger(), [_qubit(env, u.arg)])
    elif isinstance(u, A.CPhase):
        g = G.cphase(eval_index(u.k))
        apply_gate(state, g if forward else g.dagger(), [_qubit(env, u.control), _qubit(env, u.target)])
    elif isinstance(u, A.Apply):
        closure = eval_expr(env, u.target)
        if not isinstance(closure, CircuitClosure):
            raise InterpreterError("applied value is not a circuit")
        if len(closure.params) != len(u.args):
            raise InterpreterError("arity mismatch in circuit application")
        args = [eval_expr(env, a) for a in u.args]
        inner = closure.env.extend_many((p.name, v) for p, v in zip(closure.params, args))
        eval_unitary(inner, state, closure.body, direction)
    elif isinstance(u, A.Reverse):
        eval_unitary(env, state, u.body, direction.flipped())
    elif isinstance(u, A.For):
        lo, hi = eval_index(u.lo), eval_index(u.hi)
        values = range(lo, hi + 1)
        for i in values if forward else reversed(values):
            eval_unitary(env, state, subst_unitary(u.body, {u.var: A.const(i)}), direction)
    else:
        raise InterpreterError(f"not a unitary statement: {u!r}")
    return state


# -- measurement ------------------------------------------------------------------


def measure(state: QuantumState, loc: Location, policy: MeasurementPolicy, rng: Optional[np.random.Generator] = None):
    """Born-rule outcomes as ``[(bit, probability, projected_state)]``.  The
    measured qubit stays in the state."""
    p1 = min(max(state.probability(loc, 1), 0.0), 1.0)
    p0 = 1.0 - p1
    if isinstance(policy, Sample):
        if rng is None:
            rng = np.random.Generator(np.random.PCG64(policy.seed))
        bit = 0 if p1 == 0.0 else 1 if p0 == 0.0 else int(rng.random() >= p0)
        out = state.copy()
        prob = out.project(loc, bit)
        return [(bit, prob, out)]
    results = []
    for bit, p in ((0, p0), (1, p1)):
        if p < PRUNE_PROBABILITY:
            continue
        out = state.copy()
        out.project(loc, bit)
        results.append((bit, p, out))
    return results


def count_measurements(c: A.Command) -> int:
    """Static count of measure and reset commands."""
    total = 0
    stack = [c]
    while stack:
        c = stack.pop()
        if isinstance(c, (A.Measure, A.Reset)):
            total += 1
        elif isinstance(c, A.Seq):
            stack.extend((c.first, c.second))
        elif isinstance(c, A.DECLARATIONS):
            stack.append(c.scope)
    return total


# -- commands -----------------------------------------------------------------


class Interpreter:
    def __init__(self, policy: MeasurementPolicy = Enumerate(), max_qubits: int = DEFAULT_MAX_QUBITS):
        self.policy = policy
        self.max_qubits = max_qubits
        self.rng = np.random.Generator(np.random.PCG64(policy.seed)) if isinstance(policy, Sample) else None

    def _outcomes(self, cfg: Configuration, loc: Location) -> list[tuple[int, Configuration]]:
        branches = []
        for bit, p, st in measure(cfg.state, loc, self.policy, self.rng):
            weight = cfg.weight * p if isinstance(self.policy, Enumerate) else cfg.weight
            branches.append((bit, replace(cfg, heap=cfg.heap.copy(), state=st, weight=weight)))
        return branches

    def declare(self, cfg: Configuration, c: A.Command) -> tuple[Configuration, A.Command]:
        """Bind one declaration; returns the configuration inside its scope."""
        if isinstance(c, A.CregIn):
            reg = Register(tuple(cfg.heap.allocate(eval_index(c.size))), quantum=False)
        elif isinstance(c, A.QregIn):
            k = eval_index(c.size)
            if cfg.state.num_qubits + k > self.max_qubits:
                raise ResourceLimitError(
                    f"qreg {c.name}[{k}] would need {cfg.state.num_qubits + k} qubits; the cap is {self.max_qubits}"
                )
            reg = Register(tuple(cfg.state.allocate(k)), quantum=True)
        elif isinstance(c, A.GateIn):
            return replace(cfg, env=cfg.env.extend(c.name, CircuitClosure(c.params, c.body, cfg.env))), c.scope
        elif isinstance(c, A.FamilyIn):
            value = FamilyClosure(c.index_vars, c.params, c.body, cfg.env)
            return replace(cfg, env=cfg.env.extend(c.name, value)), c.scope
        else:
            raise InterpreterError(f"not a declaration: {type(c).__name__}")
        return replace(cfg, env=cfg.env.extend(c.name, reg), registers=cfg.registers + ((c.name, reg),)), c.scope

    def eval_command(self, cfg: Configuration, c: A.Command) -> list[Configuration]:
        if isinstance(c, A.Seq):
            configs = [cfg]
            for part in A.flatten_seq(c):
                configs = [out for cf in configs for out in self.eval_command(cf, part)]
            return configs
        if isinstance(c, A.Skip):
            return [cfg]
        if isinstance(c, A.Header):
            return self.eval_command(cfg, c.scope)
        if isinstance(c, A.Include):
            raise InterpreterError(f'include "{c.path}" was not resolved')
        if isinstance(c, (A.CregIn, A.QregIn)):
            return self.eval_command(*self.declare(cfg, c))
        if isinstance(c, (A.GateIn, A.FamilyIn)):
            outer = cfg.env
            results = self.eval_command(*self.declare(cfg, c))
            return [replace(r, env=outer) for r in results]
        if isinstance(c, A.Measure):
            src = _qubit(cfg.env, c.src)
            dst = eval_expr(cfg.env, c.dst)
            out = []
            for bit, branch in self._outcomes(cfg, src):
                branch.heap.bits[dst] = bit
                out.append(branch)
            return out
        if isinstance(c, A.Reset):
            loc = _qubit(cfg.env, c.arg)
            out = []
            for bit, branch in self._outcomes(cfg, loc):
                if bit:
                    branch.state.flip(loc)
                out.append(branch)
            return out
        if isinstance(c, A.IfEq):
            loc = eval_expr(cfg.env, c.cond)
            if not isinstance(loc, int):
                raise InterpreterError("if condition is not a single bit")
            if cfg.heap.read(loc) == c.value:
                eval_unitary(cfg.env, cfg.state, c.body, FORWARD)
            return [cfg]
        if isinstance(c, A.UStmt):
            eval_unitary(cfg.env, cfg.state, c.stmt, FORWARD)
            return [cfg]
        raise InterpreterError(f"not a command: {c!r}")

    def run(self, c: A.Command) -> list[Configuration]:
        if isinstance(self.policy, Enumerate):
            m = count_measurements(c)
            if m > math.log2(self.policy.max_branches):
                raise BranchLimitError(
                    f"{m} measurement(s) may produce {2 ** m} branches; the limit is {self.policy.max_branches}"
                )
        return self.eval_command(initial_configuration(), c)


def eval_command(cfg: Configuration, c: A.Command, policy: MeasurementPolicy = Enumerate(),
                 max_qubits: int = DEFAULT_MAX_QUBITS) -> list[Configuration]:
    """Evaluate ``c`` from ``cfg``; ``cfg`` itself is left untouched."""
    return Interpreter(policy, max_qubits).eval_command(cfg.branch(), c)


def bind_declarations(c: A.Command, max_qubits: int = DEFAULT_MAX_QUBITS) -> tuple[Configuration, A.Command]:
    """Evaluate the leading chain of declarations of ``c`` and return the
    configuration in the innermost scope with the command found there."""
    interp = Interpreter(Enumerate(), max_qubits)
    cfg = initial_configuration()
    while True:
        if isinstance(c, A.Header):
            c = c.scope
        elif isinstance(c, (A.CregIn, A.QregIn, A.GateIn, A.FamilyIn)):
            cfg, c = interp.declare(cfg, c)
        else:
            return cfg, c


def program_unitary(c: A.Command) -> A.UnitaryStmt:
    """The unitary statements of a command made only of them, as one sequence."""
    parts = A.flatten_seq(c)
    if not all(isinstance(p, (A.UStmt, A.Skip)) for p in parts):
        raise InterpreterError("program body is not purely unitary")
    return A.useq([p.stmt for p in parts if isinstance(p, A.UStmt)])


def run_program(c: A.Command, policy: MeasurementPolicy = Enumerate(), max_qubits: int = DEFAULT_MAX_QUBITS) -> list[Configuration]:
    """Run from the empty configuration; returns the weighted final branches."""
    return Interpreter(policy, max_qubits).run(c)
