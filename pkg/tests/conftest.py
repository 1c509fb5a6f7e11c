from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from metaqasm.elaborate import entry_harness, unroll  # noqa: E402
from metaqasm.semantics import QuantumState, bind_declarations, program_unitary  # noqa: E402
from metaqasm.syntax import load_program  # noqa: E402

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def corpus_path(name: str) -> Path:
    return CORPUS / f"{name}.qasm"


def load(name: str):
    return load_program(corpus_path(name))


def expectations() -> dict[str, dict]:
    return {p.name[: -len(".expect.json")]: json.loads(p.read_text()) for p in sorted(CORPUS.glob("*.expect.json"))}


def closed_unitaries() -> list[tuple[str, str, tuple[int, ...]]]:
    """(file, entry, indices) for every closed unitary instance the corpus lists."""
    out = []
    for name, e in expectations().items():
        for item in e.get("closed_unitary", []):
            out.append((name, item["entry"], tuple(item["index"])))
    return out


class OpenUnitary:
    """A harnessed entry point: its environment, qubit count and body."""

    def __init__(self, name: str, entry: str, indices=()):
        self.program = entry_harness(load(name), entry, indices)
        cfg, body = bind_declarations(self.program)
        self.env = cfg.env
        self.num_qubits = cfg.state.num_qubits
        self.body = program_unitary(body)

    def flat(self):
        return unroll(self.program)


def random_state(n: int, rng: np.random.Generator) -> QuantumState:
    return QuantumState.random(n, rng)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


# -- acceptance reporting ------------------------------------------------------------

CRITERIA = {
    1: "Toffoli gate",
    2: "adder family",
    3: "ctrlAdd indexing pair",
    4: "reverse soundness",
    5: "unroll/interpreter agreement",
    6: "entailment soundness",
    7: "termination watchdog",
    8: "teleportation",
    9: "random programs vs Kronecker oracle",
}
_details: dict[int, str] = {}
_outcomes: dict[int, bool] = {}


def record_criterion(number: int, detail: str) -> None:
    _details[number] = detail


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker and report.when == "call":
        _outcomes[marker.args[0]] = report.passed


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        verdict = "PASS" if _outcomes[number] else "FAIL"
        detail = _details.get(number, "")
        terminalreporter.write_line(f"{verdict} criterion {number} ({CRITERIA[number]}): {detail}")
