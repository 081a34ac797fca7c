"""Exact scalars: rationals, rational intervals, and rational combinations of powers of e.

``Rat`` is :class:`fractions.Fraction`.  ``Ival`` is a closed interval with
exact rational endpoints, so interval arithmetic needs no rounding.  ``ENum``
is a finite sum ``sum_q c_q * e**q`` with rational ``q`` and ``c_q``; equality
is symbolic (coefficient maps), never numeric.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Mapping, Union

Rat = Fraction
Scalar = Union[int, Fraction]


def rat(value) -> Fraction:
    """Parse ``value`` (int, Fraction, ``"p/q"`` or decimal string like ``"1e-8"``)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"cannot make a rational from {value!r}")


def rat_arith(a, b, op: str) -> Fraction:
    """Exact ``a op b`` for ``op`` in ``+ - * /`` (``×``/``÷`` also accepted)."""
    ops = {
        "+": operator.add,
        "-": operator.sub,
        "−": operator.sub,
        "*": operator.mul,
        "×": operator.mul,
        "/": operator.truediv,
        "÷": operator.truediv,
    }
    try:
        fn = ops[op]
    except KeyError:
        raise ValueError(f"unknown operator {op!r}") from None
    return fn(rat(a), rat(b))


def fmt_rat(x) -> str:
    x = rat(x)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Intervals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ival:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", rat(self.lo))
        object.__setattr__(self, "hi", rat(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x) -> Ival:
        x = rat(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def contains_ival(self, other: Ival) -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def intersects(self, other: Ival) -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def __add__(self, other) -> Ival:
        other = _as_ival(other)
        return Ival(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self) -> Ival:
        return Ival(-self.hi, -self.lo)

    def __sub__(self, other) -> Ival:
        return self + (-_as_ival(other))

    def __rsub__(self, other) -> Ival:
        return _as_ival(other) - self

    def __mul__(self, other) -> Ival:
        other = _as_ival(other)
        ends = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Ival(min(ends), max(ends))

    __rmul__ = __mul__

    def __abs__(self) -> Ival:
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Ival(Fraction(0), max(-self.lo, self.hi))

    def __pow__(self, k: int) -> Ival:
        if not isinstance(k, int) or k < 0:
            raise ValueError("interval power needs k >= 0")
        if k == 0:
            return Ival.point(1)
        if k % 2 == 1:
            return Ival(self.lo**k, self.hi**k)
        a = abs(self)
        return Ival(a.lo**k, a.hi**k)

    def reciprocal(self) -> Ival:
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("reciprocal of an interval containing 0")
        return Ival(1 / self.hi, 1 / self.lo)

    def to_json(self) -> list[str]:
        return [fmt_rat(self.lo), fmt_rat(self.hi)]

    def __repr__(self) -> str:
        return f"Ival[{self.lo}, {self.hi}]"


def _as_ival(x) -> Ival:
    if isinstance(x, Ival):
        return x
    return Ival.point(x)


def ival_arith(a: Ival, b: Ival | None, op: str, k: int | None = None) -> Ival:
    """Dispatch for ``+ - * abs pow``; ``b`` is ignored by ``abs`` and ``pow``."""
    if op == "+":
        return a + b
    if op in ("-", "−"):
        return a - b
    if op in ("*", "×"):
        return a * b
    if op == "abs":
        return abs(a)
    if op == "pow":
        return a**k
    raise ValueError(f"unknown interval operator {op!r}")


# ---------------------------------------------------------------------------
# Exponential enclosures
# ---------------------------------------------------------------------------


def _grid_bits(eps: Fraction) -> int:
    # smallest-ish k with 2**-k <= eps/4
    return math.ceil(4 / eps).bit_length()


def _round_out(lo: Fraction, hi: Fraction, bits: int) -> Ival:
    scale = 1 << bits
    return Ival(
        Fraction(math.floor(lo * scale), scale),
        Fraction(math.ceil(hi * scale), scale),
    )


def exp_tail_bound(z: Fraction, m: int, term_next: Fraction) -> Fraction | None:
    """Majorant of ``sum_{n>m} z**n/n!`` given ``term_next = z**(m+1)/(m+1)!``.

    Valid only once ``m + 2 > z``; returns None before that.
    """
    if m + 2 <= z:
        return None
    return term_next / (1 - z / (m + 2))


@lru_cache(maxsize=4096)
def enclose_exp(q, eps) -> Ival:
    """Interval of width ``<= eps`` containing ``e**q``.

    Partial sums of ``sum q**n/n!`` with a geometric tail majorant that
    becomes valid at the first ``m`` with ``m + 2 > |q|``; negative ``q`` goes
    through the reciprocal of the ``e**|q|`` enclosure.  Endpoints are rounded
    outward to a dyadic grid to keep denominators small.
    """
    q, eps = rat(q), rat(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if q == 0:
        return Ival.point(1)
    if q < 0:
        inner = enclose_exp(-q, eps / 2)
        r = inner.reciprocal()
        # lo >= 1, so the reciprocal is no wider than the inner enclosure
        return _round_out(r.lo, r.hi, _grid_bits(eps))
    half = eps / 2
    total = Fraction(0)
    term = Fraction(1)
    m = 0
    while True:
        total += term
        nxt = term * q / (m + 1)
        tail = exp_tail_bound(q, m, nxt)
        if tail is not None and tail <= half:
            return _round_out(total, total + tail, _grid_bits(eps))
        term = nxt
        m += 1


# ---------------------------------------------------------------------------
# ENum
# ---------------------------------------------------------------------------


class ENum:
    """Exact ``sum c_q * e**q``; immutable, hashable, zero is the empty map."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Fraction, Fraction] = {}
        for q, c in items:
            q, c = rat(q), rat(c)
            acc[q] = acc.get(q, 0) + c
        self._terms = {q: c for q, c in sorted(acc.items()) if c != 0}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> ENum:
        obj = cls.__new__(cls)
        obj._terms = {q: terms[q] for q in sorted(terms) if terms[q] != 0}
        obj._hash = None
        return obj

    @classmethod
    def e(cls, q=1) -> ENum:
        return cls._raw({rat(q): Fraction(1)})

    @classmethod
    def coerce(cls, x) -> ENum:
        if isinstance(x, ENum):
            return x
        c = rat(x)
        return cls._raw({Fraction(0): c}) if c else ZERO

    @property
    def terms(self) -> dict[Fraction, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_rational(self) -> bool:
        return all(q == 0 for q in self._terms)

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not a rational number")
        return self._terms.get(Fraction(0), Fraction(0))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, ENum):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ENum.coerce(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __add__(self, other) -> ENum:
        if not isinstance(other, (ENum, int, Fraction)):
            return NotImplemented
        other = ENum.coerce(other)
        acc = dict(self._terms)
        for q, c in other._terms.items():
            acc[q] = acc.get(q, 0) + c
        return ENum._raw(acc)

    __radd__ = __add__

    def __neg__(self) -> ENum:
        return ENum._raw({q: -c for q, c in self._terms.items()})

    def __sub__(self, other) -> ENum:
        if not isinstance(other, (ENum, int, Fraction)):
            return NotImplemented
        return self + (-ENum.coerce(other))

    def __rsub__(self, other) -> ENum:
        return ENum.coerce(other) - self

    def __mul__(self, other) -> ENum:
        if isinstance(other, (int, Fraction)):
            if not other:
                return ZERO
            return ENum._raw({q: c * other for q, c in self._terms.items()})
        if not isinstance(other, ENum):
            return NotImplemented
        acc: dict[Fraction, Fraction] = {}
        for p, a in self._terms.items():
            for q, b in other._terms.items():
                s = p + q
                acc[s] = acc.get(s, 0) + a * b
        return ENum._raw(acc)

    __rmul__ = __mul__

    def __truediv__(self, other) -> ENum:
        """Division by a nonzero rational (ENum is not a field here)."""
        if isinstance(other, ENum):
            other = other.rational_value()
        other = rat(other)
        if other == 0:
            raise ZeroDivisionError("ENum division by zero")
        return ENum._raw({q: c / other for q, c in self._terms.items()})

    def __pow__(self, k: int) -> ENum:
        if k < 0:
            raise ValueError("negative power of an ENum")
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def to_json(self) -> list[str]:
        return [f"({fmt_rat(q)}:{fmt_rat(c)})" for q, c in self._terms.items()]

    def __repr__(self) -> str:
        if not self._terms:
            return "ENum(0)"
        parts = []
        for q, c in self._terms.items():
            parts.append(f"{c}" if q == 0 else f"{c}*e^{q}")
        return "ENum(" + " + ".join(parts) + ")"


ZERO = ENum._raw({})
ONE = ENum._raw({Fraction(0): Fraction(1)})


def enum_arith(a: ENum, b: ENum, op: str) -> ENum:
    if op == "+":
        return a + b
    if op in ("-", "−"):
        return a - b
    if op in ("*", "×"):
        return a * b
    raise ValueError(f"unknown ENum operator {op!r}")


def enclose_enum(v, eps) -> Ival:
    """Interval of width ``<= eps`` containing the real value of ``v``."""
    v = ENum.coerce(v)
    eps = rat(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    irrational = [(q, c) for q, c in v.items() if q != 0]
    total = Ival.point(v._terms.get(Fraction(0), 0))
    if not irrational:
        return total
    budget = eps / len(irrational)
    for q, c in irrational:
        total = total + enclose_exp(q, budget / abs(c)) * c
    return total
