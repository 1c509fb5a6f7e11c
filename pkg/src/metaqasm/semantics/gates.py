"""The primitive gate set {H, T, Tdg, CX, CPhase(k)} and its daggers."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

_SELF_INVERSE = {"h": "h", "cx": "cx", "t": "tdg", "tdg": "t"}


@dataclass(frozen=True)
class Gate:
    name: str
    k: Optional[int] = None
    conjugate: bool = False

    def __post_init__(self):
        if self.name not in ("h", "t", "tdg", "cx", "cphase"):
            raise ValueError(f"unknown gate {self.name!r}")
        if (self.name == "cphase") != (self.k is not None):
            raise ValueError("cphase takes exactly one integer parameter")
        if self.conjugate and self.name != "cphase":
            raise ValueError("only cphase has an explicit conjugate form")

    @property
    def arity(self) -> int:
        return 2 if self.name in ("cx", "cphase") else 1

    @property
    def label(self) -> str:
        if self.name == "cphase":
            return "cphasedg" if self.conjugate else "cphase"
        return self.name

    def dagger(self) -> "Gate":
        if self.name == "cphase":
            return Gate("cphase", self.k, not self.conjugate)
        return Gate(_SELF_INVERSE[self.name])

    def __str__(self) -> str:
        return f"{self.label}({self.k})" if self.name == "cphase" else self.name


H = Gate("h")
T = Gate("t")
TDG = Gate("tdg")
CX = Gate("cx")


def cphase(k: int) -> Gate:
    return Gate("cphase", k)
