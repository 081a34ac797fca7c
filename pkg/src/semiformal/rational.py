"""Rational power series, partial fractions, and the integer v-table checks.

The v-table machinery works with an instance ``(b_j, alpha_j)`` of nonzero
integers and distinct naturals, the sequences ``u_n = sum b_j alpha_j^n`` and
``v_n = n! sum_{r<=n} u_r / r!``, and the rows
``sum_n v_n(k) x^n = q(x)^k V(x)`` where ``q(x) = prod (1 - alpha_j x)``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .exactnum import fmt_rat, rat
from .series import Poly, TruncSeries, poly_gcd
from .verdict import Verdict


class IrreducibleFactorError(ValueError):
    """The denominator has a factor without rational roots."""


# ---------------------------------------------------------------------------
# RatFun
# ---------------------------------------------------------------------------


def _ratpoly(p) -> Poly:
    return (p if isinstance(p, Poly) else Poly(p)).map(rat)


class RatFun:
    """``num(x) / den(x)`` in lowest terms with ``den(0) = 1``."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=(1,)):
        num, den = _ratpoly(num), _ratpoly(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if den[0] == 0:
            raise ValueError("denominator must not vanish at 0 (not a power series)")
        g = poly_gcd(num, den)
        if not g.is_zero() and g.degree > 0:
            num, den = num // g, den // g
        c = den[0]
        self.num = Poly(a / c for a in num.coeffs)
        self.den = Poly(a / c for a in den.coeffs)

    @classmethod
    def geometric(cls, alpha, order: int = 1, beta=1) -> RatFun:
        """``beta / (1 - alpha x)**order``."""
        return cls(Poly((rat(beta),)), Poly((1, -rat(alpha))) ** order)

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatFun):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __add__(self, other) -> RatFun:
        other = _as_ratfun(other)
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> RatFun:
        return RatFun(-self.num, self.den)

    def __sub__(self, other) -> RatFun:
        return self + (-_as_ratfun(other))

    def __mul__(self, other) -> RatFun:
        other = _as_ratfun(other)
        return RatFun(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def derivative(self) -> RatFun:
        return RatFun(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def expand(self, N: int) -> TruncSeries:
        return expand(self, N)

    def __repr__(self) -> str:
        return f"RatFun({self.num!r} / {self.den!r})"


def _as_ratfun(x) -> RatFun:
    if isinstance(x, RatFun):
        return x
    if isinstance(x, Poly):
        return RatFun(x)
    return RatFun(Poly((rat(x),)))


def expand(f: RatFun, N: int) -> TruncSeries:
    """Coefficients ``0..N`` of ``num/den`` by long division."""
    return TruncSeries.from_poly(f.num, N).divide(TruncSeries.from_poly(f.den, N))


# ---------------------------------------------------------------------------
# rational roots and partial fractions
# ---------------------------------------------------------------------------


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _integer_coeffs(p: Poly) -> list[int]:
    lcm = 1
    for c in p.coeffs:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in p.coeffs]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    return [c // g for c in ints]


def rational_roots(p: Poly) -> Counter:
    """Rational roots of ``p`` with multiplicity; raises if a factor is left over."""
    p = _ratpoly(p)
    roots: Counter = Counter()
    while p.degree >= 1 and p[0] == 0:
        roots[Fraction(0)] += 1
        p = Poly(p.coeffs[1:])
    while p.degree >= 1:
        ints = _integer_coeffs(p)
        found = None
        for num in _divisors(ints[0]):
            for den in _divisors(ints[-1]):
                for cand in (Fraction(num, den), Fraction(-num, den)):
                    if p(cand) == 0:
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            raise IrreducibleFactorError(f"{p!r} has no rational root")
        while p.degree >= 1 and p(found) == 0:
            roots[found] += 1
            p = p // Poly((-found, 1))
    return roots


def denominator_factors(den: Poly) -> dict[Fraction, int]:
    """``den = prod (1 - alpha x)**m`` -> ``{alpha: m}`` (``den(0) = 1``)."""
    den = _ratpoly(den)
    if den[0] != 1:
        raise ValueError("denominator must be normalized to den(0) = 1")
    # roots of den are 1/alpha
    return {1 / r: m for r, m in sorted(rational_roots(den).items(), key=lambda kv: 1 / kv[0])}


@dataclass(frozen=True)
class PartialFractions:
    """``poly_part(x) + sum beta / (1 - alpha x)**order``.

    ``terms`` is sorted by ``(alpha, order)``; the top-order beta of every alpha
    is nonzero.
    """

    poly_part: Poly
    terms: tuple[tuple[Fraction, int, Fraction], ...]

    @property
    def poles(self) -> dict[Fraction, int]:
        """``{alpha: order}``; the pole itself sits at ``1/alpha``."""
        out: dict[Fraction, int] = {}
        for alpha, i, beta in self.terms:
            if beta:
                out[alpha] = max(out.get(alpha, 0), i)
        return out

    def recombine(self) -> RatFun:
        total = RatFun(self.poly_part)
        for alpha, i, beta in self.terms:
            total = total + RatFun.geometric(alpha, i, beta)
        return total

    def to_json(self) -> dict:
        return {
            "poly_part": self.poly_part.to_json(),
            "terms": [{"alpha": fmt_rat(a), "order": i, "beta": fmt_rat(b)} for a, i, b in self.terms],
        }


def _local_expansion(num: Poly, other: Poly, alpha: Fraction, m: int) -> list[Fraction]:
    """First ``m`` coefficients in ``y = 1 - alpha x`` of ``num / other``."""
    # x = (1 - y)/alpha
    sub = Poly((1 / alpha, -1 / alpha))
    def compose(p: Poly) -> Poly:
        out = Poly()
        for c in reversed(p.coeffs):
            out = out * sub + Poly((c,))
        return out

    n_y = TruncSeries.from_poly(compose(num), m - 1)
    d_y = TruncSeries.from_poly(compose(other), m - 1)
    return list(n_y.divide(d_y).coeffs)


def partial_fractions(f: RatFun) -> PartialFractions:
    """Unique decomposition of ``f`` over rational poles."""
    factors = denominator_factors(f.den)
    poly_part, rem = f.num.divmod(f.den)
    terms = []
    for alpha, m in factors.items():
        other = Poly((1,))
        for beta_alpha, mm in factors.items():
            if beta_alpha != alpha:
                other = other * Poly((1, -beta_alpha)) ** mm
        local = _local_expansion(rem, other, alpha, m)
        # rem/den = local(y) / y^m, so beta_{order i} = local[m - i]
        for i in range(1, m + 1):
            beta = local[m - i]
            if beta:
                terms.append((alpha, i, beta))
    return PartialFractions(poly_part, tuple(sorted(terms)))


def poles(f: RatFun) -> dict[Fraction, int]:
    """Pole multiset ``{alpha: order}`` of ``f`` in lowest terms."""
    return denominator_factors(f.den) if not f.is_polynomial() else {}


def check_pole_prop(p, m: int, c, A: RatFun) -> Verdict:
    """``p A + c x^m A'`` is a polynomial or has only poles of order >= 2.

    Also confirms its pole multiset equals that of ``c x^m A'`` whenever ``A``
    is not a polynomial.
    """
    p = _ratpoly(p)
    c = rat(c)
    if c == 0:
        raise ValueError("c must be nonzero")
    xm = Poly.monomial(m, c)
    tail = RatFun(xm) * A.derivative()
    result = RatFun(p) * A + tail
    got = poles(result)
    ref = poles(tail)
    orders_ok = all(order >= 2 for order in got.values())
    same = A.is_polynomial() or got == ref
    return Verdict.of(
        "pole_proposition",
        orders_ok and same,
        result_poles={fmt_rat(1 / a): k for a, k in got.items()},
        derivative_poles={fmt_rat(1 / a): k for a, k in ref.items()},
        polynomial=result.is_polynomial(),
    )


# ---------------------------------------------------------------------------
# v-tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BBRInstance:
    b: tuple[int, ...]
    alpha: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(int(x) for x in self.b))
        object.__setattr__(self, "alpha", tuple(int(x) for x in self.alpha))
        if not self.b or len(self.b) != len(self.alpha):
            raise ValueError("b and alpha must be nonempty and of equal length")
        if any(x == 0 for x in self.b):
            raise ValueError("every b_j must be nonzero")
        if any(a < 1 for a in self.alpha) or len(set(self.alpha)) != len(self.alpha):
            raise ValueError("alpha must be distinct natural numbers")

    @property
    def t(self) -> int:
        return len(self.b)

    @property
    def A(self) -> int:
        return max(self.alpha)

    @property
    def q(self) -> Poly:
        """``prod (1 - alpha_j x) = 1 - a_1 x - ... - a_t x^t``."""
        out = Poly((1,))
        for a in self.alpha:
            out = out * Poly((1, -a))
        return out

    @property
    def a(self) -> tuple[int, ...]:
        q = self.q
        return tuple(-q[i] for i in range(1, self.t + 1))

    @property
    def C(self) -> int:
        return 1 + sum(abs(x) for x in self.a)

    def u(self, n: int) -> int:
        return sum(bj * aj**n for bj, aj in zip(self.b, self.alpha))

    def u_generating(self) -> RatFun:
        """``sum_j b_j / (1 - alpha_j x)``."""
        total = RatFun(Poly())
        for bj, aj in zip(self.b, self.alpha):
            total = total + RatFun.geometric(aj, 1, bj)
        return total

    def to_json(self) -> dict:
        return {"b": list(self.b), "alpha": list(self.alpha), "t": self.t, "A": self.A, "a": list(self.a)}


@dataclass(frozen=True)
class VTable:
    """``vk[k][n] = v_n(k)``; row 0 is ``v``; ``a`` are the recurrence coefficients."""

    N: int
    K: int
    u: tuple[int, ...]
    v: tuple[int, ...]
    vk: tuple[tuple[int, ...], ...]
    a: tuple[int, ...] = field(default=())

    @property
    def t(self) -> int:
        return len(self.a)

    def at(self, k: int, n: int) -> int:
        """Table entry with negative ``n`` read as 0."""
        return self.vk[k][n] if n >= 0 else 0


def _rows(v: Sequence[int], a: Sequence[int], K: int) -> tuple[tuple[int, ...], ...]:
    rows = [tuple(v)]
    for _ in range(K):
        prev = rows[-1]
        nxt = []
        for n in range(len(prev)):
            acc = prev[n]
            for i, ai in enumerate(a, start=1):
                if n - i >= 0:
                    acc -= ai * prev[n - i]
            nxt.append(acc)
        rows.append(tuple(nxt))
    return tuple(rows)


def build_vtable(inst: BBRInstance, N: int, K: int) -> VTable:
    """Integer tables ``u``, ``v`` and ``v_n(k)`` for ``n <= N``, ``k <= K``."""
    if N < inst.t * K:
        raise ValueError(f"need N >= t*K = {inst.t * K}")
    u = [inst.u(n) for n in range(N + 1)]
    v = [u[0]]
    for n in range(1, N + 1):
        v.append(n * v[-1] + u[n])
    return VTable(N, K, tuple(u), tuple(v), _rows(v, inst.a, K), inst.a)


def vtable_from_sequence(v: Sequence[int], a: Sequence[int], K: int) -> VTable:
    """Table for an arbitrary sequence ``v`` and recurrence polynomial ``1 - sum a_i x^i``.

    ``u`` is read off as ``v_n - n v_{n-1}``.
    """
    v = tuple(int(x) for x in v)
    u = tuple(v[n] - (n * v[n - 1] if n else 0) for n in range(len(v)))
    return VTable(len(v) - 1, K, u, v, _rows(v, a, K), tuple(int(x) for x in a))


def v_by_factorial_sum(inst: BBRInstance, N: int) -> list[Fraction]:
    """``v_n = n! sum_{r<=n} u_r / r!`` with exact rationals."""
    out = []
    s = Fraction(0)
    fact = 1
    for n in range(N + 1):
        if n:
            fact *= n
        s += Fraction(inst.u(n), fact)
        out.append(s * fact)
    return out


def falling(n: int, m: int) -> int:
    """``(n)_m = n (n-1) ... (n-m+1)``, ``(n)_0 = 1``."""
    out = 1
    for i in range(m):
        out *= n - i
    return out


def check_dual_construction(tab: VTable, inst: BBRInstance) -> Verdict:
    ref = v_by_factorial_sum(inst, tab.N)
    bad = [n for n in range(tab.N + 1) if ref[n] != tab.v[n]]
    return Verdict.of("v_dual_construction", not bad, mismatches=bad[:10], checked=tab.N + 1)


def check_vk_recurrence(tab: VTable, inst: BBRInstance | None = None) -> Verdict:
    """``v_n(k+1) = v_n(k) - sum a_i v_{n-i}(k)`` for ``n >= t``, ``k < K``."""
    a = inst.a if inst is not None else tab.a
    t = len(a)
    bad = []
    for k in range(tab.K):
        for n in range(t, tab.N + 1):
            rhs = tab.vk[k][n] - sum(ai * tab.vk[k][n - i] for i, ai in enumerate(a, start=1))
            if tab.vk[k + 1][n] != rhs:
                bad.append([k, n])
    return Verdict.of("vk_recurrence", not bad, violations=bad[:10])


def check_vk_power_path(tab: VTable, inst: BBRInstance) -> Verdict:
    """Rows equal ``[x^n] q(x)^k V(x)`` computed as a single power then product."""
    V = TruncSeries(tab.v)
    bad = []
    for k in range(tab.K + 1):
        row = TruncSeries.from_poly(inst.q**k, tab.N) * V
        if row.coeffs != tuple(Fraction(x) for x in tab.vk[k]):
            bad.append(k)
    return Verdict.of("vk_power_path", not bad, bad_rows=bad)


def check_combination(tab: VTable, k: int) -> Verdict:
    """``v_n = sum_{r<k} (n)_r u_{n-r} + (n)_k v_{n-k}`` for all ``n <= N``."""
    if k > tab.K:
        raise ValueError("k exceeds the table depth")

    def at(seq, i):
        return seq[i] if i >= 0 else 0

    bad = []
    for n in range(tab.N + 1):
        rhs = sum(falling(n, r) * at(tab.u, n - r) for r in range(k)) + falling(n, k) * at(tab.v, n - k)
        if rhs != tab.v[n]:
            bad.append(n)
    return Verdict.of(f"combination_k{k}", not bad, violations=bad[:10])


def check_divisibility(tab: VTable, inst: BBRInstance | None = None) -> Verdict:
    """``k! | v_n(k)`` for ``t k <= n <= N``, ``k <= K``."""
    t = inst.t if inst is not None else tab.t
    bad = []
    for k in range(tab.K + 1):
        f = math.factorial(k)
        for n in range(t * k, tab.N + 1):
            if tab.vk[k][n] % f:
                bad.append([k, n])
    return Verdict.of("factorial_divisibility", not bad, violations=bad[:10])


def check_ur_identity(inst: BBRInstance, r: int, N: int) -> Verdict:
    """``q^{r+1} sum_n (n)_r u_{n-r} x^n`` is a polynomial of degree < t(r+1).

    The recovered ``p_r`` is compared with ``r! x^r sum_j b_j prod_{l != j} (1 - alpha_l x)^{r+1}``.
    """
    t = inst.t
    if N < t * (r + 1) + r:
        raise ValueError(f"need N >= t(r+1) + r = {t * (r + 1) + r}")
    lhs = TruncSeries([falling(n, r) * inst.u(n - r) if n >= r else 0 for n in range(N + 1)])
    prod = TruncSeries.from_poly(inst.q ** (r + 1), N) * lhs
    bound = t * (r + 1)
    tail_zero = all(c == 0 for c in prod.coeffs[bound:])
    p_r = Poly(prod.coeffs[:bound])
    integral = all(c.denominator == 1 for c in p_r.coeffs)
    ref = Poly()
    for j, (bj, aj) in enumerate(zip(inst.b, inst.alpha)):
        term = Poly.monomial(r, math.factorial(r) * bj)
        for l, al in enumerate(inst.alpha):
            if l != j:
                term = term * Poly((1, -al)) ** (r + 1)
        ref = ref + term
    matches = ref == p_r
    return Verdict.of(
        f"ur_identity_r{r}",
        tail_zero and integral and matches,
        p_r=[str(int(c)) if c.denominator == 1 else fmt_rat(c) for c in p_r.coeffs],
        degree=p_r.degree if not p_r.is_zero() else None,
        degree_bound=bound,
        closed_form_match=matches,
    )


def check_ode_identity(inst: BBRInstance, N: int, tab: VTable | None = None) -> Verdict:
    """``(1 - x) V - x^2 V' = sum_j b_j / (1 - alpha_j x)`` to horizon ``N - 1``."""
    if tab is None:
        tab = build_vtable(inst, N, 0)
    V = TruncSeries(tab.v[: N + 1])
    Vp = V.derivative()
    lhs = (TruncSeries.from_poly(Poly((1, -1)), N - 1) * V.truncate(N - 1)) - (
        TruncSeries.from_poly(Poly.monomial(2), N - 1) * Vp
    )
    rhs = expand(inst.u_generating(), N - 1)
    bad = [n for n in range(N) if lhs.coeffs[n] != rhs.coeffs[n]]
    return Verdict.of("ode_identity", not bad, horizon=N - 1, mismatches=bad[:10])


# ---------------------------------------------------------------------------
# growth and norm induction
# ---------------------------------------------------------------------------


def window_constant(tab: VTable, A: int) -> Fraction:
    """``max_n |v_n| / A^n`` over the table."""
    return max(Fraction(abs(x), A**n) for n, x in enumerate(tab.v))


def check_growth_items(tab: VTable, inst: BBRInstance, c=None) -> Verdict:
    """Implication check for ``|v_n(k)| <= c A^n C^k`` (``n >= t k``).

    The base hypothesis ``|v_n| <= c A^n`` is reported, not asserted.  What is
    asserted is the induction step: wherever the bound holds at
    ``(k, n-t..n)`` it must hold at ``(k+1, n)``.  ``c=None`` picks the window
    maximum, which makes the base hold by construction.
    """
    A, C, t = inst.A, inst.C, inst.t
    chosen = "window_max" if c is None else "supplied"
    c = window_constant(tab, A) if c is None else rat(c)
    if c < 0:
        raise ValueError("c must be >= 0")

    def holds(k, n):
        return abs(tab.vk[k][n]) <= c * A**n * C**k

    base_fail = next((n for n in range(tab.N + 1) if not holds(0, n)), None)
    step_bad = []
    for k in range(tab.K):
        for n in range(t * (k + 1), tab.N + 1):
            if all(holds(k, n - i) for i in range(t + 1)) and not holds(k + 1, n):
                step_bad.append([k + 1, n])
    row_bad = [[k, n] for k in range(tab.K + 1) for n in range(t * k, tab.N + 1) if not holds(k, n)]
    return Verdict.of(
        "growth_implication",
        not step_bad,
        c=fmt_rat(c),
        c_choice=chosen,
        A=A,
        C=C,
        base_holds=base_fail is None,
        base_first_violation=base_fail,
        bound_violations=row_bad[:10],
        step_violations=step_bad[:10],
    )


def least_k0(c, A: int, C: int, t: int, limit: int = 100000) -> int:
    """Least ``k0 >= 1`` with ``k! > c A^{2tk} C^k`` for every ``k >= k0``."""
    c = rat(c)
    B = A ** (2 * t) * C
    last_fail = 0
    fact = 1
    for k in range(1, limit):
        fact *= k
        if not fact > c * B**k:
            last_fail = k
        elif k >= B:
            # k!/B^k is increasing from here on
            return last_fail + 1
    raise RuntimeError("k0 search limit reached")


def norm_induction(
    t: int,
    k0: int,
    zero_oracle: Callable[[int, int], bool] | None,
    tab: VTable,
) -> Verdict:
    """Replay the induction on ``||<k, n>|| = n - 2 t k`` over a finite window.

    The examined window is ``M_w = {k0 <= k <= K-1, 2tk <= n <= min(N, 2tK-1)}``;
    inside it every predecessor ``<k+1, n>``, ``<k, n-i>`` lies either in
    ``M_w`` with smaller norm or in the region ``N = {tk <= n <= 2tk}``, where
    ``zero_oracle`` decides vanishing.  An entry is marked zero when the
    modified recurrence ``v_n(k) = v_n(k+1) + sum a_i v_{n-i}(k)`` writes it
    from entries already known to be zero.
    """
    if zero_oracle is None:
        def zero_oracle(k, n):
            return k <= tab.K and 0 <= n <= tab.N and tab.vk[k][n] == 0

    K, N = tab.K, tab.N
    n_hi = min(N, 2 * t * K - 1)
    window = [
        (k, n)
        for k in range(k0, K)
        for n in range(2 * t * k, n_hi + 1)
    ]
    if not window:
        return Verdict.of("norm_induction", True, window_size=0, vacuous=True, k0=k0)

    def in_n_region(k, n):
        return k >= k0 and t * k <= n <= 2 * t * k

    in_window = set(window)
    zero: set[tuple[int, int]] = set()
    witness = None
    # norm ascending; ties by k descending so <k+1, n> comes first
    for k, n in sorted(window, key=lambda kn: (kn[1] - 2 * t * kn[0], -kn[0])):
        preds = [(k + 1, n)] + [(k, n - i) for i in range(1, t + 1)]
        ok = True
        for pk, pn in preds:
            if (pk, pn) in in_window and pn >= 2 * t * pk:
                if (pk, pn) not in zero:
                    ok = False
                    break
            elif in_n_region(pk, pn):
                if not zero_oracle(pk, pn):
                    ok = False
                    if witness is None:
                        witness = {"k": pk, "n": pn, "value": str(tab.vk[pk][pn]) if pk <= K else None}
                    break
            else:
                ok = False
                break
        if ok:
            zero.add((k, n))
    marked_all = len(zero) == len(window)
    contradicted = [list(kn) for kn in sorted(zero) if tab.vk[kn[0]][kn[1]] != 0]
    return Verdict.of(
        "norm_induction",
        marked_all and not contradicted,
        window_size=len(window),
        window={"k": [k0, K - 1], "n_max": n_hi},
        marked_zero=len(zero),
        k0=k0,
        n_region_witness=witness,
        table_disagreements=contradicted[:10],
    )
