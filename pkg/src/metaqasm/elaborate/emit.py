"""openQASM 2.0 text and JSON renderings of flat circuits."""
from __future__ import annotations

import json

from ..semantics.gates import Gate
from .unroll import FlatCircuit

ANCILLA = "anc"


def _layout(circuit: FlatCircuit) -> tuple[list[tuple[str, int]], dict[int, str]]:
    """Register declarations and a location -> ``name[i]`` table.  Names with a
    single contiguous allocation are kept; everything else goes to ``anc``."""
    decls: list[tuple[str, int]] = []
    where: dict[int, str] = {}
    for name, ranges in circuit.register_map.items():
        if len(ranges) != 1:
            continue
        (r,) = ranges
        if len(r) == 0:
            continue
        decls.append((name, len(r)))
        for i, loc in enumerate(r):
            where[loc] = f"{name}[{i}]"
    leftover = [l for l in range(circuit.num_qubits) if l not in where]
    if leftover:
        anc = ANCILLA
        used = {n for n, _ in decls}
        suffix = 0
        while anc in used:
            anc = f"{ANCILLA}{suffix}"
            suffix += 1
        decls.append((anc, len(leftover)))
        for i, loc in enumerate(leftover):
            where[loc] = f"{anc}[{i}]"
    return decls, where


def _gate_text(g: Gate) -> str:
    if g.name != "cphase":
        return g.name
    sign = "-" if g.conjugate else ""
    return f"cu1({sign}pi/2^{g.k - 1})"


def emit_openqasm2(circuit: FlatCircuit) -> str:
    decls, where = _layout(circuit)
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    lines += [f"qreg {name}[{size}];" for name, size in decls]
    for e in circuit.events:
        lines.append(f"{_gate_text(e.gate)} {','.join(where[l] for l in e.locs)};")
    return "\n".join(lines) + "\n"


def to_json_dict(circuit: FlatCircuit) -> dict:
    events = []
    for e in circuit.events:
        item = {"g": e.gate.label, "q": list(e.locs)}
        if e.gate.k is not None:
            item["k"] = e.gate.k
        events.append(item)
    return {"qubits": circuit.num_qubits, "events": events}


def to_json(circuit: FlatCircuit) -> str:
    return json.dumps(to_json_dict(circuit), separators=(",", ":")) + "\n"
