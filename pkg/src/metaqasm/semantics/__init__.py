"""Reference state-vector interpreter with forward and reverse evaluation."""
from .errors import AliasingError, BranchLimitError, InterpreterError, ResourceLimitError
from .gates import CX, H, T, TDG, Gate, cphase
from .interp import (
    DEFAULT_MAX_BRANCHES,
    DEFAULT_MAX_QUBITS,
    FORWARD,
    REVERSE,
    ClassicalHeap,
    bind_declarations,
    program_unitary,
    Configuration,
    Direction,
    Enumerate,
    Interpreter,
    Sample,
    count_measurements,
    eval_command,
    eval_expr,
    eval_index,
    eval_unitary,
    initial_configuration,
    measure,
    run_program,
)
from .state import QuantumState, apply_gate
from .values import BUILTIN_VALUES, CircuitClosure, Environment, FamilyClosure, Register

__all__ = [
    "AliasingError",
    "BUILTIN_VALUES",
    "BranchLimitError",
    "CX",
    "CircuitClosure",
    "ClassicalHeap",
    "Configuration",
    "DEFAULT_MAX_BRANCHES",
    "DEFAULT_MAX_QUBITS",
    "Direction",
    "Enumerate",
    "Environment",
    "FORWARD",
    "FamilyClosure",
    "Gate",
    "H",
    "Interpreter",
    "InterpreterError",
    "QuantumState",
    "REVERSE",
    "Register",
    "ResourceLimitError",
    "Sample",
    "T",
    "TDG",
    "apply_gate",
    "bind_declarations",
    "program_unitary",
    "count_measurements",
    "cphase",
    "eval_command",
    "eval_expr",
    "eval_index",
    "eval_unitary",
    "initial_configuration",
    "measure",
    "run_program",
]
