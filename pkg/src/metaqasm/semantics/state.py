"""Dense little-endian state vectors: location ``l`` is bit ``l`` of the index."""
from __future__ import annotations

import cmath
import math
from typing import Sequence

import numpy as np

from .errors import AliasingError, InterpreterError
from .gates import Gate

_SQRT_HALF = 1 / math.sqrt(2)
_T_PHASE = cmath.exp(2j * math.pi / 8)

DUMP_THRESHOLD = 1e-12


class QuantumState:
    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes=None):
        if amplitudes is None:
            amplitudes = np.ones(1, dtype=np.complex128)
        amplitudes = np.ascontiguousarray(amplitudes, dtype=np.complex128)
        n = amplitudes.size.bit_length() - 1
        if amplitudes.ndim != 1 or amplitudes.size != 1 << n:
            raise ValueError("amplitude vector length must be a power of two")
        self.amplitudes = amplitudes

    @classmethod
    def zero(cls, num_qubits: int = 0) -> "QuantumState":
        return cls.basis(num_qubits, 0)

    @classmethod
    def basis(cls, num_qubits: int, index: int) -> "QuantumState":
        v = np.zeros(1 << num_qubits, dtype=np.complex128)
        v[index] = 1
        return cls(v)

    @classmethod
    def random(cls, num_qubits: int, rng: np.random.Generator) -> "QuantumState":
        v = rng.normal(size=1 << num_qubits) + 1j * rng.normal(size=1 << num_qubits)
        return cls(v / np.linalg.norm(v))

    @property
    def num_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    def copy(self) -> "QuantumState":
        return QuantumState(self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def allocate(self, k: int) -> list[int]:
        """Tensor ``|0...0>`` onto ``k`` new high locations; returns them."""
        n = self.num_qubits
        grown = np.zeros(1 << (n + k), dtype=np.complex128)
        grown[: 1 << n] = self.amplitudes
        self.amplitudes = grown
        return list(range(n, n + k))

    def _tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.num_qubits)

    def _axis(self, loc: int) -> int:
        n = self.num_qubits
        if not 0 <= loc < n:
            raise InterpreterError(f"qubit location {loc} is not allocated (have {n})")
        return n - 1 - loc

    def _slice(self, fixed: dict[int, int]) -> tuple:
        idx = [slice(None)] * self.num_qubits
        for loc, bit in fixed.items():
            idx[self._axis(loc)] = bit
        return tuple(idx)

    def probability(self, loc: int, bit: int) -> float:
        part = self._tensor()[self._slice({loc: bit})]
        return float(np.vdot(part, part).real)

    def project(self, loc: int, bit: int) -> float:
        """Apply the projector onto ``bit`` at ``loc`` and renormalise in place.
        Returns the outcome probability (the state is untouched if it is 0)."""
        p = self.probability(loc, bit)
        if p > 0:
            v = self._tensor()
            v[self._slice({loc: 1 - bit})] = 0
            self.amplitudes /= math.sqrt(p)
        return p

    def flip(self, loc: int) -> None:
        v = self._tensor()
        s0, s1 = self._slice({loc: 0}), self._slice({loc: 1})
        a0 = v[s0].copy()
        v[s0] = v[s1]
        v[s1] = a0

    def dump(self) -> str:
        n = self.num_qubits
        lines = []
        for index in np.flatnonzero(np.abs(self.amplitudes) > DUMP_THRESHOLD):
            a = self.amplitudes[index]
            bits = "".join(str((int(index) >> l) & 1) for l in range(n))
            lines.append(f"|{bits}⟩ {_num(a.real)} {_num(a.imag)}")
        return "\n".join(lines) + ("\n" if lines else "")

    def __repr__(self) -> str:
        return f"QuantumState(num_qubits={self.num_qubits})"


def _num(x: float) -> str:
    if abs(x) <= DUMP_THRESHOLD:
        return "0"
    s = f"{x:.12g}"
    return "0" if s == "-0" else s


def apply_gate(state: QuantumState, gate: Gate, locs: Sequence[int]) -> QuantumState:
    """Apply ``gate`` at ``locs`` in place by strided updates; returns ``state``."""
    locs = list(locs)
    if len(locs) != gate.arity:
        raise InterpreterError(f"{gate} takes {gate.arity} qubit(s), got {len(locs)}")
    if len(set(locs)) != len(locs):
        raise AliasingError(f"{gate} applied to the same qubit twice: {locs}")
    v = state._tensor()
    name = gate.name
    if name == "h":
        (l,) = locs
        s0, s1 = state._slice({l: 0}), state._slice({l: 1})
        a0, a1 = v[s0].copy(), v[s1].copy()
        v[s0] = (a0 + a1) * _SQRT_HALF
        v[s1] = (a0 - a1) * _SQRT_HALF
    elif name == "t":
        v[state._slice({locs[0]: 1})] *= _T_PHASE
    elif name == "tdg":
        v[state._slice({locs[0]: 1})] *= _T_PHASE.conjugate()
    elif name == "cx":
        c, t = locs
        s0, s1 = state._slice({c: 1, t: 0}), state._slice({c: 1, t: 1})
        a0 = v[s0].copy()
        v[s0] = v[s1]
        v[s1] = a0
    else:
        phase = cmath.exp(2j * math.pi / 2 ** gate.k)
        if gate.conjugate:
            phase = phase.conjugate()
        v[state._slice({locs[0]: 1, locs[1]: 1})] *= phase
    return state
