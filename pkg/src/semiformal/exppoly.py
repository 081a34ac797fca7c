"""Exponential polynomials ``sum_c p_c(x) Exp(c x)``.

This class is closed under products, derivatives, primitives, shifts and
constant inner products, and its values at rational points are ENums, so
Newton integrals and improper Newton integrals over it are exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exactnum import ONE, ZERO, ENum, Ival, enclose_enum, exp_tail_bound, fmt_rat, rat
from .series import Poly, TruncSeries, exp_series
from .verdict import Status, Verdict


class DivergentIntegralError(ValueError):
    """The improper integral has no finite limit."""


def _enum_poly(p: Poly) -> Poly:
    return p.map(ENum.coerce)


class ExpPoly:
    """Immutable map ``rate -> Poly`` with ENum coefficients, sorted by rate."""

    __slots__ = ("_parts",)

    def __init__(self, parts: Mapping | Iterable = ()):
        items = parts.items() if isinstance(parts, Mapping) else parts
        acc: dict[Fraction, Poly] = {}
        for c, p in items:
            c = rat(c)
            p = _enum_poly(p if isinstance(p, Poly) else Poly(p))
            acc[c] = acc[c] + p if c in acc else p
        self._parts = {c: acc[c] for c in sorted(acc) if not acc[c].is_zero()}

    @classmethod
    def _raw(cls, parts: dict) -> ExpPoly:
        obj = cls.__new__(cls)
        obj._parts = {c: parts[c] for c in sorted(parts) if not parts[c].is_zero()}
        return obj

    # constructors ---------------------------------------------------------

    @classmethod
    def exp(cls, rate=1) -> ExpPoly:
        """``Exp(rate * x)``."""
        return cls({rat(rate): Poly((ONE,))})

    @classmethod
    def poly(cls, p: Poly | Sequence) -> ExpPoly:
        return cls({Fraction(0): p if isinstance(p, Poly) else Poly(p)})

    @classmethod
    def const(cls, c) -> ExpPoly:
        return cls.poly(Poly((ENum.coerce(c),)))

    @classmethod
    def x_pow_exp(cls, k: int, rate=-1, coeff=1) -> ExpPoly:
        """``coeff * x**k * Exp(rate * x)``."""
        return cls({rat(rate): Poly.monomial(k, ENum.coerce(coeff))})

    # access ---------------------------------------------------------------

    @property
    def parts(self) -> dict[Fraction, Poly]:
        return dict(self._parts)

    @property
    def rates(self) -> list[Fraction]:
        return list(self._parts)

    def part(self, rate) -> Poly:
        return self._parts.get(rat(rate), Poly())

    def is_zero(self) -> bool:
        return not self._parts

    def is_rational(self) -> bool:
        return all(c.is_rational() for p in self._parts.values() for c in p.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return self._parts == other._parts

    def __hash__(self) -> int:
        return hash(tuple(self._parts.items()))

    # arithmetic -----------------------------------------------------------

    def __add__(self, other) -> ExpPoly:
        other = _as_exppoly(other)
        acc = dict(self._parts)
        for c, p in other._parts.items():
            acc[c] = acc[c] + p if c in acc else p
        return ExpPoly._raw(acc)

    __radd__ = __add__

    def __neg__(self) -> ExpPoly:
        return ExpPoly._raw({c: -p for c, p in self._parts.items()})

    def __sub__(self, other) -> ExpPoly:
        return self + (-_as_exppoly(other))

    def __rsub__(self, other) -> ExpPoly:
        return _as_exppoly(other) - self

    def scale(self, k) -> ExpPoly:
        k = ENum.coerce(k)
        return ExpPoly._raw({c: p * k for c, p in self._parts.items()})

    def __mul__(self, other) -> ExpPoly:
        if isinstance(other, (int, Fraction, ENum)):
            return self.scale(other)
        if not isinstance(other, ExpPoly):
            return NotImplemented
        acc: dict[Fraction, Poly] = {}
        for c, p in self._parts.items():
            for d, q in other._parts.items():
                s = c + d
                pq = p * q
                acc[s] = acc[s] + pq if s in acc else pq
        return ExpPoly._raw(acc)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> ExpPoly:
        out = ExpPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    # calculus -------------------------------------------------------------

    def derivative(self) -> ExpPoly:
        """Per part: ``(p' + c p) Exp(c x)``."""
        return ExpPoly._raw(
            {c: p.derivative() + p * c if c else p.derivative() for c, p in self._parts.items()}
        )

    def primitive(self) -> ExpPoly:
        """The primitive that vanishes at 0, matching the formal primitive.

        For ``c != 0`` solve ``q' + c q = p`` by back-substitution from the top
        degree; the rate-0 part integrates as a polynomial.
        """
        acc: dict[Fraction, Poly] = {}
        at_zero = ZERO
        for c, p in self._parts.items():
            if c == 0:
                acc[c] = p.primitive()
                continue
            d = len(p.coeffs) - 1
            q = [ZERO] * (d + 1)
            q[d] = p.coeffs[d] / c
            for k in range(d - 1, -1, -1):
                q[k] = (p.coeffs[k] - q[k + 1] * (k + 1)) / c
            acc[c] = Poly(q)
            at_zero = at_zero + q[0]
        if at_zero:
            acc[Fraction(0)] = acc.get(Fraction(0), Poly()) - Poly((at_zero,))
        return ExpPoly._raw(acc)

    def shift(self, b) -> ExpPoly:
        """``f(x + b)``: ``p_c(x + b) e^{c b} Exp(c x)``."""
        b = rat(b)
        if b == 0:
            return self
        return ExpPoly._raw({c: p.shift(b) * ENum.e(c * b) for c, p in self._parts.items()})

    def inner_scale(self, a) -> ExpPoly:
        """``f(a x)``: rate ``c -> a c``, ``p(x) -> p(a x)``."""
        a = rat(a)
        if a == 0:
            return ExpPoly.const(self.value(0))
        return ExpPoly._raw({a * c: p.inner_scale(a) for c, p in self._parts.items()})

    def value(self, v) -> ENum:
        """``sum_c p_c(v) e^{c v}``."""
        v = rat(v)
        total = ZERO
        for c, p in self._parts.items():
            pv = ENum.coerce(p(v))
            total = total + (pv if c * v == 0 else pv * ENum.e(c * v))
        return total

    __call__ = value

    # series view ----------------------------------------------------------

    def series_coeff(self, n: int) -> ENum:
        """``[x^n]`` of the Taylor expansion at 0."""
        total = ZERO
        for c, p in self._parts.items():
            for j, pj in enumerate(p.coeffs[: n + 1]):
                if pj:
                    m = n - j
                    total = total + pj * (c**m / math.factorial(m))
        return total

    def to_series(self, N: int) -> TruncSeries:
        """Truncated expansion; only for ENum-rational coefficients."""
        out = TruncSeries.zero(N)
        for c, p in self._parts.items():
            ps = TruncSeries.from_poly(p.map(lambda e: e.rational_value()), N)
            out = out + ps * exp_series(N).inner_scale(c)
        return out

    def to_json(self) -> list[dict]:
        return [
            {"rate": fmt_rat(c), "coefficients": [e.to_json() for e in p.coeffs]}
            for c, p in self._parts.items()
        ]

    def __repr__(self) -> str:
        if not self._parts:
            return "ExpPoly(0)"
        return "ExpPoly(" + " + ".join(f"{p!r}*Exp({c}x)" for c, p in self._parts.items()) + ")"


def _as_exppoly(x) -> ExpPoly:
    if isinstance(x, ExpPoly):
        return x
    if isinstance(x, Poly):
        return ExpPoly.poly(x)
    return ExpPoly.const(x)


# ---------------------------------------------------------------------------
# functional view
# ---------------------------------------------------------------------------


def ep_arith(f: ExpPoly, g, op: str) -> ExpPoly:
    if op == "+":
        return f + g
    if op == "-":
        return f - g
    if op in ("*", "×"):
        return f * g
    if op == "scale":
        return f.scale(g)
    raise ValueError(f"unknown ExpPoly operator {op!r}")


def ep_derivative(f: ExpPoly) -> ExpPoly:
    return f.derivative()


def ep_primitive(f: ExpPoly) -> ExpPoly:
    return f.primitive()


def ep_shift(f: ExpPoly, b) -> ExpPoly:
    return f.shift(b)


def ep_inner_scale(f: ExpPoly, a) -> ExpPoly:
    return f.inner_scale(a)


def ep_value(f: ExpPoly, v) -> ENum:
    return f.value(v)


def newton_integral(f: ExpPoly, u, v) -> ENum:
    """``(int f)(v) - (int f)(u)``."""
    F = f.primitive()
    return F.value(v) - F.value(u)


def improper_integral(f: ExpPoly, u) -> ENum:
    """``int_u^oo f`` as the limit of the primitive minus its value at ``u``.

    Exists iff every part has negative rate (no rate-0 polynomial); then every
    part of the primitive except its rate-0 constant tends to 0.
    """
    bad = [c for c in f.rates if c >= 0]
    if bad:
        raise DivergentIntegralError(f"rates {bad} do not decay; the limit does not exist")
    F = f.primitive()
    limit = F.part(0)[0] if not F.part(0).is_zero() else ZERO
    return ENum.coerce(limit) - F.value(u)


def euler_eval(p: Poly) -> Fraction | int:
    """``int_0^oo p(x) Exp(-x) = sum_j p_j * j!``."""
    total = 0
    fact = 1
    for j, c in enumerate(p.coeffs):
        if j:
            fact *= j
        total += c * fact
    return total


def to_interval_series(f: ExpPoly, N: int, eps) -> list[Ival]:
    """Enclosures of width ``<= eps`` of the Taylor coefficients ``[x^0..x^N]``."""
    eps = rat(eps)
    return [enclose_enum(f.series_coeff(n), eps) for n in range(N + 1)]


# ---------------------------------------------------------------------------
# independent numeric route
# ---------------------------------------------------------------------------


def _exp_tail(z: Fraction, start: int) -> Fraction | None:
    """Majorant of ``sum_{m >= start} z**m / m!`` for ``z >= 0`` (None if not yet valid)."""
    if start == 0:
        return None
    term = z**start / math.factorial(start)
    return exp_tail_bound(z, start - 1, term)


def series_value_enclosure(f: ExpPoly, v, eps, integrate: bool = False) -> Ival:
    """Enclose ``f(v)`` (or ``(int f)(v)``) by summing the Taylor series at 0.

    Coefficients come from the series expansion, not from the closed form, and
    the truncation error is bounded per part by an exponential-tail majorant.
    ``integrate`` sums the formal primitive ``sum a_{n-1} v^n / n`` instead.
    """
    v, eps = rat(v), rat(eps)
    if f.is_zero():
        return Ival.point(0)
    # a width w on coefficient j moves the sum by at most w |v|^(j+1) e^{|cv|}
    count = sum(len(p) for p in f.parts.values())
    reach = max(1, abs(v))
    parts = []
    for c, p in f.parts.items():
        coeffs = []
        for j, e in enumerate(p.coeffs):
            if e.is_rational():
                coeffs.append(Ival.point(e.rational_value()))
            else:
                w = eps / (4 * count * reach ** (j + 1) * _exp_scale(c, v))
                coeffs.append(enclose_enum(e, w))
        parts.append((c, coeffs))
    N = 8
    while True:
        tail = Fraction(0)
        ok = True
        for c, coeffs in parts:
            z = abs(c * v)
            for j, pj in enumerate(coeffs):
                mag = max(abs(pj.lo), abs(pj.hi))
                if not mag:
                    continue
                start = N - j + 1
                if start <= 0:
                    ok = False
                    break
                t = _exp_tail(z, start) if z else Fraction(0)
                if t is None:
                    ok = False
                    break
                scale = abs(v) ** j * (abs(v) if integrate else 1)
                tail += mag * scale * t
            if not ok:
                break
        if ok and tail <= eps / 2:
            break
        N *= 2
    total = Ival.point(0)
    for c, coeffs in parts:
        for n in range(N + 1):
            acc = Ival.point(0)
            for j, pj in enumerate(coeffs[: n + 1]):
                m = n - j
                acc = acc + pj * (c**m / math.factorial(m))
            if integrate:
                total = total + acc * (v ** (n + 1) / (n + 1))
            else:
                total = total + acc * v**n
    return Ival(total.lo - tail, total.hi + tail)


def _exp_scale(c: Fraction, v: Fraction) -> Fraction:
    # crude upper bound for e^{|c v|}, used only to budget coefficient widths
    return Fraction(3) ** (math.ceil(abs(c * v)) + 1)


def numeric_improper_check(
    f: ExpPoly,
    u,
    claimed,
    points: Sequence,
    eps,
    alt_points: Sequence | None = None,
) -> Verdict:
    """Check that Newton integrals ``int_u^b f`` settle within ``eps`` of ``claimed``.

    Runs over ``points`` and over a second sequence (default: each point times
    7/5) and passes only if, on both, the enclosures stay within ``eps`` of the
    enclosure of ``claimed`` from some index on (the final point included).
    """
    pts = [rat(b) for b in points]
    if any(b1 >= b2 for b1, b2 in zip(pts, pts[1:])):
        raise ValueError("points must be strictly increasing")
    alt = [rat(b) for b in alt_points] if alt_points is not None else [b * Fraction(7, 5) for b in pts]
    eps = rat(eps)
    claimed = ENum.coerce(claimed)
    width = eps / 16
    target = enclose_enum(claimed, width)
    sequences = {}
    undecided = False
    F = f.primitive()
    Fu = F.value(u)
    for label, seq in (("primary", pts), ("alternate", alt)):
        rows = []
        for b in seq:
            val = F.value(b) - Fu
            enc = enclose_enum(val, width)
            far = max(enc.hi - target.lo, target.hi - enc.lo)
            near = max(enc.lo - target.hi, target.lo - enc.hi, Fraction(0))
            if far <= eps:
                state = Status.PASS
            elif near > eps:
                state = Status.FAIL
            else:
                state = Status.UNDECIDED
            rows.append({"b": fmt_rat(b), "enclosure": enc.to_json(), "within": state.value})
        settle = None
        for i in range(len(rows) - 1, -1, -1):
            if rows[i]["within"] != Status.PASS.value:
                break
            settle = i
        if rows and rows[-1]["within"] == Status.UNDECIDED.value:
            undecided = True
        sequences[label] = {"settled_from_index": settle, "rows": rows}
    passed = all(s["settled_from_index"] is not None for s in sequences.values())
    if passed:
        status = Status.PASS
    elif undecided:
        status = Status.UNDECIDED
    else:
        status = Status.FAIL
    return Verdict(
        "numeric_improper_check",
        status,
        {"u": fmt_rat(rat(u)), "claimed": claimed.to_json(), "eps": fmt_rat(eps), "sequences": sequences},
    )
