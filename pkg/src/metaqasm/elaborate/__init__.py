"""Unrolling to flat circuits, inversion and openQASM 2.0 emission."""
from .emit import emit_openqasm2, to_json, to_json_dict
from .unroll import (
    ElaborationError,
    EntryError,
    FlatCircuit,
    GateEvent,
    NonUnitaryError,
    UnresolvedFamilyError,
    entry_harness,
    expand,
    invert,
    simulate_flat,
    unroll,
    unroll_entry,
    unroll_unitary,
)

__all__ = [
    "ElaborationError",
    "EntryError",
    "FlatCircuit",
    "GateEvent",
    "NonUnitaryError",
    "UnresolvedFamilyError",
    "emit_openqasm2",
    "entry_harness",
    "expand",
    "invert",
    "simulate_flat",
    "to_json",
    "to_json_dict",
    "unroll",
    "unroll_entry",
    "unroll_unitary",
]
