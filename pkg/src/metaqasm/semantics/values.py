from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..syntax import ast as A


@dataclass(frozen=True)
class Register:
    locations: tuple[int, ...]
    quantum: bool

    def __len__(self) -> int:
        return len(self.locations)


@dataclass(frozen=True)
class CircuitClosure:
    params: tuple[A.Param, ...]
    body: A.UnitaryStmt
    env: "Environment" = field(repr=False)


@dataclass(frozen=True)
class FamilyClosure:
    index_vars: tuple[str, ...]
    params: tuple[A.Param, ...]
    body: A.UnitaryStmt
    env: "Environment" = field(repr=False)


Location = int
Value = Union[Register, CircuitClosure, FamilyClosure, Location]


class Environment:
    """Persistent map from identifiers to values.  Builtins are consulted
    last and never listed."""

    __slots__ = ("_map",)

    def __init__(self, bindings: Optional[dict] = None):
        self._map = dict(bindings or {})

    def extend(self, name: str, value: Value) -> "Environment":
        new = dict(self._map)
        new[name] = value
        return Environment(new)

    def extend_many(self, pairs) -> "Environment":
        new = dict(self._map)
        new.update(pairs)
        return Environment(new)

    def lookup(self, name: str) -> Optional[Value]:
        if name in self._map:
            return self._map[name]
        return BUILTIN_VALUES.get(name)

    def items(self):
        return self._map.items()

    def __contains__(self, name: str) -> bool:
        return name in self._map

    def __len__(self) -> int:
        return len(self._map)

    def __repr__(self) -> str:
        return f"Environment({sorted(self._map)})"


EMPTY_ENVIRONMENT = Environment()

_K = A.IndexVar("k")
BUILTIN_VALUES = {
    "cphase": FamilyClosure(
        ("k",),
        (A.Param("a", A.Qbit()), A.Param("b", A.Qbit())),
        A.CPhase(_K, A.Var("a"), A.Var("b")),
        EMPTY_ENVIRONMENT,
    )
}
