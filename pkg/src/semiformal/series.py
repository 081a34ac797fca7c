"""Dense polynomials and truncated formal power series.

``Poly`` works over any commutative scalar ring whose elements support
``+``, ``*`` and comparison with ``0`` (``int``, ``Fraction``, ``ENum``).
``TruncSeries`` holds rational coefficients ``a_0..a_N``; coefficients past the
horizon ``N`` are unknown, and asking for one is an error.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .exactnum import ENum, fmt_rat, rat

NEG_INF = float("-inf")


class HorizonError(IndexError):
    """A coefficient beyond the known horizon was requested."""


def _trim(coeffs: list) -> tuple:
    end = len(coeffs)
    while end and coeffs[end - 1] == 0:
        end -= 1
    return tuple(coeffs[:end])


class Poly:
    """Polynomial ``sum c[i] x**i`` with trailing zeros trimmed."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        self.coeffs = _trim(list(coeffs))

    @classmethod
    def x(cls) -> Poly:
        return cls((0, 1))

    @classmethod
    def const(cls, c) -> Poly:
        return cls((c,))

    @classmethod
    def monomial(cls, k: int, c=1) -> Poly:
        return cls([0] * k + [c])

    @classmethod
    def from_roots(cls, roots: Iterable) -> Poly:
        """``prod (x - r)``."""
        out = cls((1,))
        for r in roots:
            out = out * cls((-r, 1))
        return out

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __len__(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly.const(other).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def map(self, fn: Callable) -> Poly:
        return Poly(fn(c) for c in self.coeffs)

    def __add__(self, other) -> Poly:
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Poly([a[i] + b[i] if i < len(b) else a[i] for i in range(len(a))])

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other) -> Poly:
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> Poly:
        return _as_poly(other) - self

    def __mul__(self, other) -> Poly:
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction, ENum)):
                return Poly(c * other for c in self.coeffs)
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] = out[i + j] + ai * bj
        return Poly(out)

    def __rmul__(self, other) -> Poly:
        return self * other

    def __pow__(self, k: int) -> Poly:
        if k < 0:
            raise ValueError("negative polynomial power")
        out, base = Poly((1,)), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __call__(self, v):
        """Horner evaluation."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * v + c
        return acc

    eval = __call__

    def shift(self, b) -> Poly:
        """``p(x + b)`` by the finite binomial substitution."""
        n = len(self.coeffs)
        if n == 0 or b == 0:
            return self
        powers = [1]
        for _ in range(n):
            powers.append(powers[-1] * b)
        out = []
        for k in range(n):
            acc = 0
            for m in range(k, n):
                if self.coeffs[m] != 0:
                    acc = acc + self.coeffs[m] * (math.comb(m, k) * powers[m - k])
            out.append(acc)
        return Poly(out)

    def inner_scale(self, a) -> Poly:
        """``p(a x)``."""
        out, p = [], 1
        for c in self.coeffs:
            out.append(c * p)
            p = p * a
        return Poly(out)

    def derivative(self) -> Poly:
        return Poly(c * i for i, c in enumerate(self.coeffs) if i)

    def primitive(self) -> Poly:
        return Poly([0] + [c * Fraction(1, i + 1) for i, c in enumerate(self.coeffs)])

    def lowest_degree(self):
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return i
        return NEG_INF

    def divmod(self, other: Poly) -> tuple[Poly, Poly]:
        """Euclidean division over the rationals."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = [rat(c) for c in self.coeffs]
        d = other.coeffs
        lead = rat(d[-1])
        if len(rem) < len(d):
            return Poly(), Poly(rem)
        quot = [Fraction(0)] * (len(rem) - len(d) + 1)
        for i in range(len(quot) - 1, -1, -1):
            c = rem[i + len(d) - 1] / lead
            quot[i] = c
            if c:
                for j, dj in enumerate(d):
                    rem[i + j] -= c * dj
        return Poly(quot), Poly(rem[: len(d) - 1])

    def __floordiv__(self, other: Poly) -> Poly:
        return self.divmod(other)[0]

    def __mod__(self, other: Poly) -> Poly:
        return self.divmod(other)[1]

    def monic(self) -> Poly:
        lead = rat(self.coeffs[-1])
        return Poly(rat(c) / lead for c in self.coeffs)

    def to_json(self) -> list:
        return [c.to_json() if isinstance(c, ENum) else fmt_rat(c) for c in self.coeffs]

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Poly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            terms.append(f"{c}" if i == 0 else f"{c}*x^{i}")
        return "Poly(" + " + ".join(terms) + ")"


def _as_poly(x):
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction, ENum)):
        return Poly.const(x)
    return NotImplemented


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over the rationals (zero if both are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def poly_ops(p: Poly, q, op: str):
    """Dispatch by operator name: ``+``, ``*``, ``shift`` (q is b), ``eval`` (q is v)."""
    if op == "+":
        return p + q
    if op in ("*", "×"):
        return p * q
    if op in ("shift", "compose_shift"):
        return p.shift(q)
    if op == "eval":
        return p(q)
    raise ValueError(f"unknown polynomial operator {op!r}")


# ---------------------------------------------------------------------------
# Truncated series
# ---------------------------------------------------------------------------


class TruncSeries:
    """Coefficients ``a_0..a_N`` of a formal power series; ``N`` is the horizon."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        if len(coeffs) == 0:
            raise ValueError("a truncated series needs at least the x^0 coefficient")
        self.coeffs = tuple(rat(c) for c in coeffs)

    @property
    def horizon(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def zero(cls, N: int) -> TruncSeries:
        return cls([0] * (N + 1))

    @classmethod
    def one(cls, N: int) -> TruncSeries:
        return cls([1] + [0] * N)

    @classmethod
    def from_poly(cls, p: Poly, N: int) -> TruncSeries:
        return cls([p[i] for i in range(N + 1)])

    @classmethod
    def geometric(cls, a, N: int) -> TruncSeries:
        """``1/(1 - a x)``."""
        a = rat(a)
        return cls([a**n for n in range(N + 1)])

    def coeff(self, n: int) -> Fraction:
        if n < 0:
            raise IndexError("negative coefficient index")
        if n > self.horizon:
            raise HorizonError(f"[x^{n}] is beyond horizon {self.horizon}")
        return self.coeffs[n]

    __getitem__ = coeff

    def truncate(self, N: int) -> TruncSeries:
        if N > self.horizon:
            raise HorizonError(f"cannot extend horizon {self.horizon} to {N}")
        return TruncSeries(self.coeffs[: N + 1])

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def agrees_with(self, other: TruncSeries) -> bool:
        """Equality on the common known prefix."""
        n = min(self.horizon, other.horizon) + 1
        return self.coeffs[:n] == other.coeffs[:n]

    def lincomb(self, c, other: TruncSeries, d) -> TruncSeries:
        c, d = rat(c), rat(d)
        n = min(self.horizon, other.horizon) + 1
        return TruncSeries([c * a + d * b for a, b in zip(self.coeffs[:n], other.coeffs[:n])])

    def __add__(self, other: TruncSeries) -> TruncSeries:
        return self.lincomb(1, other, 1)

    def __sub__(self, other: TruncSeries) -> TruncSeries:
        return self.lincomb(1, other, -1)

    def __neg__(self) -> TruncSeries:
        return TruncSeries([-a for a in self.coeffs])

    def scale(self, c) -> TruncSeries:
        c = rat(c)
        return TruncSeries([c * a for a in self.coeffs])

    def __mul__(self, other) -> TruncSeries:
        if not isinstance(other, TruncSeries):
            if isinstance(other, (int, Fraction)):
                return self.scale(other)
            return NotImplemented
        N = min(self.horizon, other.horizon)
        a, b = self.coeffs, other.coeffs
        out = []
        for n in range(N + 1):
            out.append(sum((a[k] * b[n - k] for k in range(n + 1) if a[k]), Fraction(0)))
        return TruncSeries(out)

    def __rmul__(self, other) -> TruncSeries:
        return self * other

    def __pow__(self, k: int) -> TruncSeries:
        out, base = TruncSeries.one(self.horizon), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def derivative(self) -> TruncSeries:
        if self.horizon < 1:
            raise HorizonError("derivative of a horizon-0 series is unknown")
        return TruncSeries([(n + 1) * self.coeffs[n + 1] for n in range(self.horizon)])

    def primitive(self) -> TruncSeries:
        return TruncSeries([0] + [a / (n + 1) for n, a in enumerate(self.coeffs)])

    def inner_scale(self, a) -> TruncSeries:
        """``f(a x)``; ``a = 0`` leaves only the constant term."""
        a = rat(a)
        out, p = [], Fraction(1)
        for c in self.coeffs:
            out.append(c * p)
            p *= a
        return TruncSeries(out)

    def divide(self, den: TruncSeries) -> TruncSeries:
        """``self / den`` for ``den[0] != 0``."""
        N = min(self.horizon, den.horizon)
        d0 = den.coeffs[0]
        if d0 == 0:
            raise ZeroDivisionError("series division needs a nonzero constant term")
        out: list[Fraction] = []
        d = den.coeffs
        for n in range(N + 1):
            acc = self.coeffs[n]
            for k in range(1, n + 1):
                if d[k]:
                    acc -= d[k] * out[n - k]
            out.append(acc / d0)
        return TruncSeries(out)

    def to_json(self) -> dict:
        return {"horizon": self.horizon, "coefficients": [fmt_rat(c) for c in self.coeffs]}

    def __repr__(self) -> str:
        shown = ", ".join(str(c) for c in self.coeffs[:8])
        more = ", ..." if self.horizon >= 8 else ""
        return f"TruncSeries([{shown}{more}], N={self.horizon})"


def coeff_at(f: TruncSeries, n: int) -> Fraction:
    return f.coeff(n)


def lincomb(c, f: TruncSeries, d, g: TruncSeries) -> TruncSeries:
    return f.lincomb(c, g, d)


def exp_series(N: int) -> TruncSeries:
    """``Exp`` to horizon ``N``: coefficients ``1/n!``."""
    out, term = [], Fraction(1)
    for n in range(N + 1):
        out.append(term)
        term /= n + 1
    return TruncSeries(out)
