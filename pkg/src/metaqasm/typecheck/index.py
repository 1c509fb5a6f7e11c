"""Index contexts, interval inference and the entailment judgement.

Interval endpoints are Python ints or the float infinities.  Entailment is
sound but incomplete: it combines three independent lower/upper bounds on
``lhs - rhs`` and answers ``UNKNOWN`` whenever none of them decides.

1. interval arithmetic over the expression tree as written,
2. interval arithmetic over the expanded polynomial (so ``m - m`` cancels),
3. bound substitution: the most recently bound variable that occurs linearly
   is replaced by its symbolic lower or upper bound, depending on the sign
   of its coefficient, which captures relations such as ``i <= n-1``.
"""
from __future__ import annotations

import enum
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterator, Union

from ..syntax import ast as A
from ..syntax.printer import format_index
from ..syntax.subst import eval_closed_index, index_vars, subst_index

Bound = Union[int, float]
INF = math.inf


class UnboundIndexVariable(LookupError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound index variable {name!r}")


# --------------------------------------------------------------------------
# extended-integer endpoint arithmetic
# --------------------------------------------------------------------------


def _add(a: Bound, b: Bound, upper: bool) -> Bound:
    r = a + b
    if r != r:  # inf + -inf saturates outward
        return INF if upper else -INF
    return r


def _mul(a: Bound, b: Bound) -> Bound:
    if a == 0 or b == 0:
        return 0
    return a * b


def _pow(iv: "Interval", k: int) -> "Interval":
    if k == 0:
        return Interval(1, 1)
    if k == 1:
        return iv
    def p(x):
        if x in (INF, -INF):
            return INF if (x > 0 or k % 2 == 0) else -INF
        return x ** k
    lo, hi = p(iv.lo), p(iv.hi)
    if k % 2 == 1:
        return Interval(lo, hi)
    if iv.lo >= 0:
        return Interval(lo, hi)
    if iv.hi <= 0:
        return Interval(hi, lo)
    return Interval(0, max(lo, hi))


@dataclass(frozen=True)
class Interval:
    lo: Bound
    hi: Bound

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(_add(self.lo, other.lo, False), _add(self.hi, other.hi, True))

    def __sub__(self, other: "Interval") -> "Interval":
        return Interval(_add(self.lo, -other.hi, False), _add(self.hi, -other.lo, True))

    def __mul__(self, other: "Interval") -> "Interval":
        products = [_mul(a, b) for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        return Interval(min(products), max(products))

    def scale(self, c: int) -> "Interval":
        return self * Interval(c, c)

    def __str__(self) -> str:
        return f"[{_fmt(self.lo)}, {_fmt(self.hi)}]"


def _fmt(b: Bound) -> str:
    if b == INF:
        return "inf"
    if b == -INF:
        return "-inf"
    return str(b)


# --------------------------------------------------------------------------
# contexts
# --------------------------------------------------------------------------


class IndexContext:
    """Ordered, persistent ``y : [lo, hi]`` bindings.  Bounds may mention
    variables bound earlier."""

    __slots__ = ("_bindings",)

    def __init__(self, bindings: tuple = ()):
        self._bindings = tuple(bindings)

    def extend(self, name: str, lo: A.IndexExpr, hi: A.IndexExpr) -> "IndexContext":
        if name in self:
            raise ValueError(f"index variable {name!r} is already bound")
        return IndexContext(self._bindings + ((name, lo, hi),))

    def __contains__(self, name: str) -> bool:
        return any(b[0] == name for b in self._bindings)

    def __iter__(self) -> Iterator[tuple[str, A.IndexExpr, A.IndexExpr]]:
        return iter(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def position(self, name: str) -> int:
        for pos, b in enumerate(self._bindings):
            if b[0] == name:
                return pos
        raise UnboundIndexVariable(name)

    def prefix(self, pos: int) -> "IndexContext":
        return IndexContext(self._bindings[:pos])

    def bounds(self, name: str) -> tuple[A.IndexExpr, A.IndexExpr]:
        _, lo, hi = self._bindings[self.position(name)]
        return lo, hi

    @property
    def names(self) -> list[str]:
        return [b[0] for b in self._bindings]

    def __str__(self) -> str:
        inner = ", ".join(f"{n}: [{format_index(lo)}, {format_index(hi)}]" for n, lo, hi in self._bindings)
        return "{" + inner + "}"

    def __repr__(self) -> str:
        return f"IndexContext({self})"


EMPTY_INDEX_CONTEXT = IndexContext()


def var_interval(delta: IndexContext, name: str) -> Interval:
    pos = delta.position(name)
    _, lo, hi = list(delta)[pos]
    outer = delta.prefix(pos)
    return Interval(infer_index_interval(outer, lo).lo, infer_index_interval(outer, hi).hi)


def infer_index_interval(delta: IndexContext, i: A.IndexExpr) -> Interval:
    """Interval of ``i`` by the literal/variable/+/-/* rules, with variable
    bounds resolved recursively to constants or infinity."""
    if isinstance(i, A.NatLit):
        return Interval(i.value, i.value)
    if isinstance(i, A.Infinity):
        return Interval(INF, INF)
    if isinstance(i, A.IndexVar):
        return var_interval(delta, i.name)
    left = infer_index_interval(delta, i.left)
    right = infer_index_interval(delta, i.right)
    if isinstance(i, A.Add):
        return left + right
    if isinstance(i, A.Sub):
        return left - right
    return left * right


# --------------------------------------------------------------------------
# polynomials
# --------------------------------------------------------------------------

Monomial = tuple  # sorted tuple of variable names, with repetition


class Poly:
    """Integer polynomial over index variables."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def const(cls, c: int) -> "Poly":
        return cls({(): c})

    @classmethod
    def var(cls, name: str) -> "Poly":
        return cls({(name,): 1})

    @classmethod
    def of(cls, i: A.IndexExpr) -> "Poly":
        if isinstance(i, A.NatLit):
            return cls.const(i.value)
        if isinstance(i, A.IndexVar):
            return cls.var(i.name)
        if isinstance(i, A.Infinity):
            raise ValueError("infinity is not a polynomial")
        left, right = cls.of(i.left), cls.of(i.right)
        if isinstance(i, A.Add):
            return left + right
        if isinstance(i, A.Sub):
            return left - right
        return left * right

    def __add__(self, other: "Poly") -> "Poly":
        terms = defaultdict(int, self.terms)
        for m, c in other.terms.items():
            terms[m] += c
        return Poly(terms)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        terms = defaultdict(int)
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                terms[tuple(sorted(m1 + m2))] += c1 * c2
        return Poly(terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    @property
    def constant(self):
        """The value if the polynomial is constant, else None."""
        if not self.terms:
            return 0
        if list(self.terms) == [()]:
            return self.terms[()]
        return None

    def variables(self) -> set[str]:
        return {v for m in self.terms for v in m}

    def split(self, v: str) -> tuple[int, "Poly", "Poly"]:
        """(degree in v, coefficient of v when linear, remainder without v)."""
        degree = max((m.count(v) for m in self.terms), default=0)
        coeff, rest = defaultdict(int), defaultdict(int)
        for m, c in self.terms.items():
            if v in m:
                reduced = list(m)
                reduced.remove(v)
                coeff[tuple(reduced)] += c
            else:
                rest[m] += c
        return degree, Poly(coeff), Poly(rest)

    def interval(self, delta: IndexContext) -> Interval:
        total = Interval(0, 0)
        for m, c in self.terms.items():
            iv = Interval(1, 1)
            for v in sorted(set(m)):
                iv = iv * _pow(var_interval(delta, v), m.count(v))
            total = total + iv.scale(c)
        return total

    def __repr__(self) -> str:
        return f"Poly({self.terms})"


def _subst_poly(p: Poly, v: str, replacement: Poly) -> Poly:
    degree, coeff, rest = p.split(v)
    assert degree <= 1
    return rest + coeff * replacement


def _substitution_bound(delta: IndexContext, p: Poly, upper: bool) -> Bound:
    numeric = p.interval(delta)
    best = numeric.hi if upper else numeric.lo
    const = p.constant
    if const is not None:
        return const
    order = delta.names
    v = max(p.variables(), key=order.index)
    degree, coeff, _ = p.split(v)
    if degree != 1:
        return best
    c = coeff.constant
    if c is not None:
        nonneg = c >= 0
    else:
        civ = coeff.interval(delta)
        if civ.lo >= 0:
            nonneg = True
        elif civ.hi <= 0:
            nonneg = False
        else:
            return best
    lo_expr, hi_expr = delta.bounds(v)
    # lower bound: nonnegative coefficient pairs with v's lower bound
    take_lo = nonneg != upper
    chosen = lo_expr if take_lo else hi_expr
    try:
        replacement = Poly.of(chosen)
    except ValueError:
        return best
    symbolic = _substitution_bound(delta, _subst_poly(p, v, replacement), upper)
    return min(best, symbolic) if upper else max(best, symbolic)


# --------------------------------------------------------------------------
# constraints and entailment
# --------------------------------------------------------------------------


class Rel(enum.Enum):
    LE = "<="
    LT = "<"
    EQ = "=="
    GE = ">="


class Entailment(enum.Enum):
    HOLDS = "holds"
    REFUTED = "refuted"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Constraint:
    kind: Rel
    lhs: A.IndexExpr
    rhs: A.IndexExpr

    def __str__(self) -> str:
        return f"{format_index(self.lhs)} {self.kind.value} {format_index(self.rhs)}"

    def holds_for(self, env: dict[str, int]) -> bool:
        """Truth value under a concrete assignment of every variable."""
        s = {k: A.const(v) for k, v in env.items()}
        a = eval_closed_index(subst_index(self.lhs, s))
        b = eval_closed_index(subst_index(self.rhs, s))
        return {Rel.LE: a <= b, Rel.LT: a < b, Rel.EQ: a == b, Rel.GE: a >= b}[self.kind]


def difference_bounds(delta: IndexContext, lhs: A.IndexExpr, rhs: A.IndexExpr) -> Interval:
    """Best available bounds on ``lhs - rhs`` under ``delta``."""
    for name in index_vars(lhs) | index_vars(rhs):
        delta.position(name)
    raw = infer_index_interval(delta, A.Sub(lhs, rhs))
    lo, hi = raw.lo, raw.hi
    try:
        poly = Poly.of(lhs) - Poly.of(rhs)
    except ValueError:
        return raw
    lo = max(lo, _substitution_bound(delta, poly, upper=False))
    hi = min(hi, _substitution_bound(delta, poly, upper=True))
    return Interval(lo, hi)


def entails(delta: IndexContext, p: Constraint) -> Entailment:
    """Three-valued, sound decision of ``delta |= p``."""
    if (p.kind is Rel.LE and isinstance(p.rhs, A.Infinity)) or (
        p.kind is Rel.GE and isinstance(p.lhs, A.Infinity)
    ):
        return Entailment.HOLDS
    d = difference_bounds(delta, p.lhs, p.rhs)
    if d.lo != d.lo or d.hi != d.hi:
        return Entailment.UNKNOWN
    if p.kind is Rel.GE:
        holds, refuted = d.lo >= 0, d.hi < 0
    elif p.kind is Rel.LE:
        holds, refuted = d.hi <= 0, d.lo > 0
    elif p.kind is Rel.LT:
        holds, refuted = d.hi <= -1, d.lo >= 0
    else:
        holds, refuted = d.lo >= 0 and d.hi <= 0, d.lo > 0 or d.hi < 0
    if holds:
        return Entailment.HOLDS
    if refuted:
        return Entailment.REFUTED
    return Entailment.UNKNOWN
