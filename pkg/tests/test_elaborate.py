from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import OpenUnitary, closed_unitaries, expectations, load
from oracles import bit_reversal, dft_matrix
from metaqasm.semantics import CX, FORWARD, H, REVERSE, T, TDG, QuantumState, cphase, eval_unitary
from metaqasm.syntax import ast as A, parse_source
from metaqasm.typecheck import check_program
from metaqasm.elaborate import (
    ElaborationError,
    EntryError,
    FlatCircuit,
    GateEvent,
    NonUnitaryError,
    UnresolvedFamilyError,
    emit_openqasm2,
    entry_harness,
    invert,
    simulate_flat,
    to_json,
    to_json_dict,
    unroll,
    unroll_entry,
)

EXPECT = expectations()


def adder_events(n: int) -> int:
    # 2 cx + toffoli, then per bit 3 cx + maj (two toffolis and two cx)
    return 2 + 16 + (n - 1) * (3 + 2 * 16 + 2)


def events(flat: FlatCircuit) -> list[tuple[str, tuple[int, ...]]]:
    return [(e.gate.label, e.locs) for e in flat.events]


# -- examples ------------------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(n for n, e in EXPECT.items() if "unroll" in e))
def test_unroll_matches_recorded_counts(name):
    recorded = EXPECT[name]["unroll"]
    flat = unroll_entry(load(name), recorded["entry"], recorded["index"])
    assert len(flat.events) == recorded["events"]
    assert flat.num_qubits == recorded["qubits"]
    if "counts" in recorded:
        assert flat.gate_counts() == recorded["counts"]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6])
def test_adder_event_count(n):
    assert len(unroll_entry(load("adder"), "add", (n,)).events) == adder_events(n)


def test_reverse_of_two_gates():
    flat = unroll(parse_source("qreg a[1];\nqreg b[1];\nreverse { t(a[0]); h(b[0]) }"))
    assert flat.events == (GateEvent(H, (1,)), GateEvent(TDG, (0,)))


def test_invert_examples():
    c = FlatCircuit(2, (GateEvent(T, (0,)), GateEvent(CX, (0, 1)), GateEvent(cphase(3), (1, 0))))
    inv = invert(c)
    assert inv.events == (GateEvent(cphase(3).dagger(), (1, 0)), GateEvent(CX, (0, 1)), GateEvent(TDG, (0,)))
    assert invert(FlatCircuit(0)).events == ()


def test_gate_event_validation():
    with pytest.raises(ElaborationError):
        GateEvent(CX, (1, 1))
    with pytest.raises(ElaborationError):
        GateEvent(H, (0, 1))
    with pytest.raises(ValueError):
        FlatCircuit(1, (GateEvent(CX, (0, 1)),))


def test_emit_empty_circuit():
    flat = unroll(parse_source("qreg q[2];"))
    assert emit_openqasm2(flat) == 'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[2];\n'


def test_emit_single_cx():
    flat = unroll(parse_source("qreg q[2];\ncx(q[0], q[1]);"))
    assert emit_openqasm2(flat).splitlines()[-1] == "cx q[0],q[1];"


def test_emit_cphase_as_cu1():
    flat = unroll(parse_source("qreg q[2];\ncphase(3)(q[0], q[1]);\nreverse cphase(1)(q[1], q[0]);"))
    assert emit_openqasm2(flat).splitlines()[-2:] == ["cu1(pi/2^2) q[0],q[1];", "cu1(-pi/2^0) q[1],q[0];"]


def test_emit_uses_ancilla_for_repeated_names():
    prog = parse_source("qreg r[1] in { qreg s[2] in { h(s[1]) } };\nqreg r[1] in { h(r[0]) };")
    flat = unroll(prog)
    text = emit_openqasm2(flat)
    assert "qreg s[2];" in text and "qreg anc[2];" in text
    assert text.splitlines()[-2:] == ["h s[1];", "h anc[1];"]


def test_ancilla_name_avoids_clash():
    prog = parse_source("qreg anc[1] in { h(anc[0]) };\nqreg t1[1] in { h(t1[0]) };\nqreg t1[1] in { h(t1[0]) };")
    text = emit_openqasm2(unroll(prog))
    assert "qreg anc[1];" in text and "qreg anc0[2];" in text


def test_json_format():
    flat = unroll(parse_source("qreg q[2];\nh(q[0]);\ncphase(2)(q[0], q[1]);"))
    assert to_json(flat) == '{"qubits":2,"events":[{"g":"h","q":[0]},{"g":"cphase","q":[0,1],"k":2}]}\n'
    assert json.loads(to_json(invert(flat)))["events"][0] == {"g": "cphasedg", "q": [0, 1], "k": 2}
    assert to_json_dict(FlatCircuit(0)) == {"qubits": 0, "events": []}


def test_simulate_flat_copies():
    flat = unroll(parse_source("qreg q[1];\nh(q[0]);"))
    start = QuantumState.zero(1)
    out = simulate_flat(flat, start)
    assert np.allclose(out.amplitudes, [2**-0.5, 2**-0.5])
    assert np.allclose(start.amplitudes, [1, 0])
    with pytest.raises(ValueError):
        simulate_flat(flat, QuantumState.zero(2))


def test_adder_two_bits_one_plus_one():
    flat = unroll_entry(load("adder"), "add", (2,))
    # registers a, b, c, anc of width 2; a = 1, b = 1
    out = simulate_flat(flat, QuantumState.basis(8, 0b01 | (0b01 << 2)))
    (hit,) = np.flatnonzero(np.abs(out.amplitudes) > 1e-9)
    assert (hit >> 4) & 0b11 == 2
    assert hit & 0b1111 == 0b0101


# -- errors -------------------------------------------------------------------------


def test_non_unitary_rejected():
    with pytest.raises(NonUnitaryError, match="measure"):
        unroll(load("teleport"))


def test_unresolved_family():
    prog = parse_source("family(n) f(a:Qbit[n]) { h(a[0]) }\nqreg q[1];\nf(q);")
    with pytest.raises(UnresolvedFamilyError):
        unroll(prog)


@pytest.mark.parametrize(
    "entry, idx, match",
    [("nothing", (), "no gate"), ("add", (), "index argument"), ("maj", (1,), "no index"), ("add", (-1,), "natural")],
)
def test_entry_errors(entry, idx, match):
    with pytest.raises(EntryError, match=match):
        entry_harness(load("adder"), entry, idx)


def test_harness_renames_clashing_parameters():
    prog = parse_source("gate a(p:Qbit) { h(p) }\ngate g(a:Qbit, b:Qbit) { cx(a, b) }")
    flat = unroll(entry_harness(prog, "g"))
    assert list(flat.register_map) == ["a1", "b"]
    assert check_program(entry_harness(prog, "g")) == []


def test_harness_typechecks():
    for name, entry, idx in closed_unitaries():
        assert check_program(entry_harness(load(name), entry, idx)) == []


# -- invariants ---------------------------------------------------------------------


@pytest.mark.parametrize("k", [0, 1, 2, 5])
def test_loop_growth_is_linear(k):
    body = "{ h(q[0]); cx(q[0], q[1]) }"
    flat = unroll(parse_source(f"qreg q[2];\nfor i=1..{k} do {body}"))
    assert len(flat.events) == 2 * k


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.one_of(
            st.tuples(st.sampled_from([H, T, TDG]), st.integers(0, 3)).map(lambda t: GateEvent(t[0], (t[1],))),
            st.tuples(st.sampled_from([CX, cphase(2), cphase(4).dagger()]), st.permutations(range(4))).map(
                lambda t: GateEvent(t[0], tuple(t[1][:2]))
            ),
        ),
        max_size=30,
    )
)
def test_invert_is_an_involution(evs):
    c = FlatCircuit(4, tuple(evs))
    assert invert(invert(c)).events == c.events
    rng = np.random.default_rng(len(evs))
    s = QuantumState.random(4, rng)
    back = simulate_flat(invert(c), simulate_flat(c, s))
    assert np.allclose(back.amplitudes, s.amplitudes, atol=1e-10)


@pytest.mark.parametrize("name, entry, idx", closed_unitaries())
def test_unroll_is_deterministic(name, entry, idx):
    assert events(unroll_entry(load(name), entry, idx)) == events(unroll_entry(load(name), entry, idx))


@pytest.mark.parametrize("name, entry, idx", closed_unitaries())
def test_gate_set_is_closed(name, entry, idx):
    labels = set(unroll_entry(load(name), entry, idx).gate_counts())
    assert labels <= {"h", "t", "tdg", "cx", "cphase", "cphasedg"}


@pytest.mark.parametrize("name, entry, idx", closed_unitaries())
def test_unroll_agrees_with_interpreter(name, entry, idx):
    u = OpenUnitary(name, entry, idx)
    flat = u.flat()
    rng = np.random.default_rng(99)
    for direction in (FORWARD, REVERSE):
        s = QuantumState.random(u.num_qubits, rng)
        c = flat if direction is FORWARD else invert(flat)
        want = simulate_flat(c, s)
        got = eval_unitary(u.env, s.copy(), u.body, direction)
        assert np.max(np.abs(want.amplitudes - got.amplitudes)) < 1e-10


@pytest.mark.parametrize("name, entry, idx", closed_unitaries())
def test_emitted_text_round_trips(name, entry, idx):
    flat = unroll_entry(load(name), entry, idx)
    text = emit_openqasm2(flat)
    prog = load_program_text(text)
    assert check_program(prog) == []
    assert events(unroll(prog)) == events(flat)


def load_program_text(text: str) -> A.Command:
    from metaqasm.syntax import resolve_includes

    return resolve_includes(parse_source(text))


# -- Fourier transform ------------------------------------------------------------


def unitary_of(flat: FlatCircuit) -> np.ndarray:
    n = flat.num_qubits
    return np.array([simulate_flat(flat, QuantumState.basis(n, i)).amplitudes for i in range(2**n)]).T


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_qft_is_dft_after_bit_reversal(n):
    u = unitary_of(unroll_entry(load("qft"), "qft", (n,)))
    assert np.allclose(u, dft_matrix(n) @ bit_reversal(n), atol=1e-9)


@pytest.mark.parametrize("n", [2, 3])
def test_verbatim_qft_is_not_a_dft(n):
    u = unitary_of(unroll_entry(load("qft_verbatim"), "qft", (n,)))
    f, p = dft_matrix(n), bit_reversal(n)
    for candidate in (f, f @ p, p @ f, p @ f @ p):
        assert not np.allclose(u, candidate, atol=1e-6)
