"""The Hilbert pipeline over exact exponential polynomials.

For integers ``a_0..a_n`` (``a_0 != 0``) and ``r >= 1`` with
``p_r(x) = x^r ((x-1)...(x-n))^{r+1}``:

* ``I_r = int_0^oo p_r Exp(-x)`` is an integer,
* ``B_r = sum_i a_i e^i int_i^oo p_r Exp(-x) = sum_i a_i int_0^oo p_r(x+i) Exp(-x)``,
* ``A_r = sum_i a_i e^i int_0^i p_r Exp(-x)``,

and ``A_r + B_r = P I_r`` with ``P = sum a_i e^i`` holds as an ENum identity
whatever the ``a_i`` are.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exactnum import ZERO, ENum, Ival, enclose_enum, enclose_exp, fmt_rat, rat
from .exppoly import ExpPoly, euler_eval, improper_integral, newton_integral, numeric_improper_check, series_value_enclosure
from .series import Poly
from .verdict import Status, Verdict, certify_le, combine


@dataclass(frozen=True)
class HilbertInstance:
    a: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        if len(self.a) < 2:
            raise ValueError("need a_0..a_n with n >= 1")
        if self.a[0] == 0:
            raise ValueError("a_0 must be nonzero")

    @property
    def n(self) -> int:
        return len(self.a) - 1

    @property
    def P(self) -> ENum:
        """``sum a_j e^j``."""
        return ENum({j: aj for j, aj in enumerate(self.a)})


@dataclass(frozen=True)
class HilbertReport:
    r: int
    B_r: int
    B_r_residue: int
    A_r_exact: ENum
    A_r_interval: Ival
    identity_ok: bool
    bound_c: Fraction

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "B_r": str(self.B_r),
            "B_r_residue": str(self.B_r_residue),
            "A_r_exact": self.A_r_exact.to_json(),
            "A_r_interval": self.A_r_interval.to_json(),
            "identity_ok": self.identity_ok,
            "bound_c": fmt_rat(self.bound_c),
        }


def build_pr(r: int, n: int) -> Poly:
    """``x^r ((x-1)(x-2)...(x-n))^{r+1}`` with integer coefficients."""
    if r < 1 or n < 1:
        raise ValueError("r and n must be >= 1")
    return Poly.monomial(r) * Poly.from_roots(range(1, n + 1)) ** (r + 1)


def leading_low_coeff(r: int, n: int) -> int:
    """``(-1)^{n(r+1)} (n!)^{r+1}``, the coefficient of ``x^r`` in ``p_r``."""
    return (-1) ** (n * (r + 1)) * math.factorial(n) ** (r + 1)


def compute_Br(inst: HilbertInstance, r: int) -> int:
    """``sum_j a_j * euler_eval(p_r(x + j))``."""
    p = build_pr(r, inst.n)
    return sum(aj * euler_eval(p.shift(j)) for j, aj in enumerate(inst.a))


def compute_Br_semiformal(inst: HilbertInstance, r: int) -> ENum:
    """``sum_i a_i e^i int_i^oo p_r Exp(-x)`` through exact improper integrals."""
    f = ExpPoly({-1: build_pr(r, inst.n)})
    total = ZERO
    for i, ai in enumerate(inst.a):
        if ai:
            total = total + improper_integral(f, i) * ENum.e(i) * ai
    return total


def check_Br_structure(inst: HilbertInstance, r: int, B: int) -> Verdict:
    """``r! | B``, the residue law modulo ``(r+1)!``, and ``B != 0`` at coprime ``r+1``."""
    n, a0 = inst.n, inst.a[0]
    rf = math.factorial(r)
    mod = rf * (r + 1)
    expected = leading_low_coeff(r, n) * a0 * rf
    divisible = B % rf == 0
    residue_ok = (B - expected) % mod == 0
    coprime = math.gcd(r + 1, a0 * math.factorial(n)) == 1
    nonzero_ok = B != 0 if coprime else True
    return Verdict.of(
        f"Br_structure_r{r}",
        divisible and residue_ok and nonzero_ok,
        B_r=str(B),
        divisible_by_r_factorial=divisible,
        residue=str(B % mod),
        expected_residue=str(expected % mod),
        coprime=coprime,
        nonzero=B != 0,
    )


def compute_Ar(inst: HilbertInstance, r: int, eps) -> tuple[ENum, Ival]:
    """Exact ``A_r`` and an enclosure of width ``<= eps``."""
    f = ExpPoly({-1: build_pr(r, inst.n)})
    total = ZERO
    for i, ai in enumerate(inst.a):
        if ai and i:
            total = total + newton_integral(f, 0, i) * ENum.e(i) * ai
    return total, enclose_enum(total, eps)


def interval_Ar(inst: HilbertInstance, r: int, eps) -> Ival:
    """``A_r`` from Taylor sums of the formal primitive, without the closed form."""
    eps = rat(eps)
    f = ExpPoly({-1: build_pr(r, inst.n)})
    terms = [(i, ai) for i, ai in enumerate(inst.a) if ai and i]
    total = Ival.point(0)
    if not terms:
        return total
    share = eps / (2 * len(terms))
    for i, ai in terms:
        # width(x * y) <= |x| w_y + |y| w_x + w_x w_y, all budgeted below share
        integral = series_value_enclosure(f, i, share / (4 * abs(ai) * 3**i), integrate=True)
        mag = max(abs(integral.lo), abs(integral.hi)) + 1
        e_i = enclose_exp(i, share / (4 * abs(ai) * mag))
        total = total + integral * e_i * ai
    return total


def check_decomposition(inst: HilbertInstance, r: int) -> Verdict:
    """``A_r + B_r = P I_r`` as exact ENum equality."""
    A, _ = compute_Ar(inst, r, Fraction(1))
    B = compute_Br(inst, r)
    I = euler_eval(build_pr(r, inst.n))
    lhs = A + B
    rhs = inst.P * I
    return Verdict.of(
        f"decomposition_r{r}",
        lhs == rhs,
        lhs=lhs.to_json(),
        rhs=rhs.to_json(),
        I_r=str(I),
    )


def ell(n: int) -> int:
    """An ``l`` with every coefficient of ``p_r`` bounded by ``l^{r+1}``.

    The sum of absolute coefficients of ``(x-1)...(x-n)``, i.e. ``(n+1)!``:
    coefficients of a product are bounded by the product of these sums.
    """
    return sum(abs(c) for c in Poly.from_roots(range(1, n + 1)).coeffs)


def newton_bound(n: int, r: int) -> ENum:
    """``(n+1)(r+1) l^{r+1} n^{(n+1)(r+1)} e^n`` as an exact ENum."""
    k = (n + 1) * (r + 1)
    return ENum.e(n) * (k * ell(n) ** (r + 1) * n**k)


def fake_lm(i: int, k: int, eps=Fraction(1, 10**8)) -> Verdict:
    """Certified ``|int_0^i x^k Exp(-x)| <= i^{k+1} e^i``."""
    val = newton_integral(ExpPoly.x_pow_exp(k, -1), 0, i)
    bound = ENum.e(i) * (i ** (k + 1))
    status, lhs, rhs = certify_le(lambda w: abs(enclose_enum(val, w)), lambda w: enclose_enum(bound, w), eps)
    return Verdict(
        f"fake_lm_i{i}_k{k}",
        status,
        {"integral": lhs.to_json(), "bound": rhs.to_json()},
    )


def _smallest_c(bound_hi: Fraction, r: int) -> int:
    """Least integer ``c >= 1`` with ``c^r >= bound_hi``."""
    lo, hi = 1, 2
    while hi**r < bound_hi:
        lo, hi = hi, hi * 2
    if lo**r >= bound_hi:
        return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid**r >= bound_hi:
            hi = mid
        else:
            lo = mid
    return hi


def check_Ar_bound(inst: HilbertInstance, r: int, eps=Fraction(1, 10**8)) -> Verdict:
    """``|A_r| <= sum |a_i| e^i * newton_bound`` certified, plus the derived ``c``."""
    n = inst.n
    A, _ = compute_Ar(inst, r, eps)
    bound = newton_bound(n, r) * sum(abs(ai) * ENum.e(i) for i, ai in enumerate(inst.a) if i)
    status, lhs, rhs = certify_le(lambda w: abs(enclose_enum(A, w)), lambda w: enclose_enum(bound, w), eps)
    c = _smallest_c(rhs.hi, r)
    return Verdict(
        f"Ar_bound_r{r}",
        status,
        {
            "l": ell(n),
            "abs_A_r": lhs.to_json(),
            "bound": rhs.to_json(),
            "c": str(c),
        },
    )


def check_Ar_power(inst: HilbertInstance, rs: Sequence[int], eps=Fraction(1, 10**8)) -> Verdict:
    """One ``c`` (the max of the per-``r`` values) with ``|A_r| <= c^r`` on every ``r``."""
    per_r = [check_Ar_bound(inst, r, eps) for r in rs]
    c = max([int(v.detail["c"]) for v in per_r] + [1])
    rows = []
    for r in rs:
        A, _ = compute_Ar(inst, r, eps)
        status, lhs, _ = certify_le(lambda w: abs(enclose_enum(A, w)), lambda w: Ival.point(c**r), eps)
        rows.append(Verdict(f"Ar_power_r{r}", status, {"abs_A_r": lhs.to_json()}))
    return combine("Ar_power_bound", per_r + rows, c=str(c), eps=fmt_rat(rat(eps)))


def hilbert_report(inst: HilbertInstance, r: int, eps=Fraction(1, 10**8)) -> tuple[HilbertReport, list[Verdict]]:
    B = compute_Br(inst, r)
    A, A_ival = compute_Ar(inst, r, eps)
    dec = check_decomposition(inst, r)
    bound = check_Ar_bound(inst, r, eps)
    report = HilbertReport(
        r=r,
        B_r=B,
        B_r_residue=B % math.factorial(r + 1),
        A_r_exact=A,
        A_r_interval=A_ival,
        identity_ok=dec.ok,
        bound_c=Fraction(int(bound.detail["c"])),
    )
    return report, [check_Br_structure(inst, r, B), dec, bound]


def verify_euler_numeric(k: int, points: Sequence, eps, alt_points: Sequence | None = None) -> Verdict:
    """Numeric side of ``int_0^oo x^k Exp(-x) = k!``.

    Combines :func:`numeric_improper_check` with the integration-by-parts step
    ``int_0^b F_k = k int_0^b F_{k-1} - F_k(b)`` (exact at every ``b``) and a
    check that the enclosures of ``F_k(b)`` shrink towards 0 along the points.
    """
    eps = rat(eps)
    Fk = ExpPoly.x_pow_exp(k, -1)
    main = numeric_improper_check(Fk, 0, math.factorial(k), points, eps, alt_points)
    steps = []
    tails = []
    for b in points:
        b = rat(b)
        lhs = newton_integral(Fk, 0, b)
        if k:
            rhs = newton_integral(ExpPoly.x_pow_exp(k - 1, -1), 0, b) * k - (Fk.value(b) - Fk.value(0))
        else:
            rhs = ENum.coerce(1) - ENum.e(-b)
        steps.append(lhs == rhs)
        tails.append(enclose_enum(Fk.value(b), eps / 16))
    # non-increasing along the second half, up to the enclosure width
    half = tails[len(tails) // 2 :]
    shrinking = all(t2.hi <= t1.hi + eps / 16 for t1, t2 in zip(half, half[1:]))
    last_small = tails[-1].hi <= eps if tails else True
    statuses = [main.status]
    if not (all(steps) and shrinking and last_small):
        statuses.append(Status.FAIL)
    status = Status.FAIL if Status.FAIL in statuses else main.status
    return Verdict(
        f"euler_numeric_k{k}",
        status,
        {
            "improper_check": main.detail,
            "by_parts_exact": all(steps),
            "limit_term_final": tails[-1].to_json() if tails else None,
            "limit_term_shrinking": shrinking,
        },
    )


def growth_separation(inst: HilbertInstance, rs: Sequence[int], eps=Fraction(1, 10**8)) -> Verdict:
    """``|B_r| >= r!`` at every coprime ``r`` while ``|A_r|`` stays below ``c^r``.

    ``c`` here is the least integer with ``|A_r| <= c^r`` certified on the
    whole range; the detail lists where ``|B_r|`` exceeds ``c^r``.
    """
    rows = []
    c = 1
    for r in rs:
        A, ival = compute_Ar(inst, r, eps)
        c = max(c, _smallest_c(abs(ival).hi, r))
        rows.append((r, compute_Br(inst, r)))
    a0n = inst.a[0] * math.factorial(inst.n)
    coprime = [r for r, _ in rows if math.gcd(r + 1, a0n) == 1]
    big = all(abs(B) >= math.factorial(r) for r, B in rows if r in coprime)
    overtakes = [r for r, B in rows if abs(B) > c**r]
    return Verdict.of(
        "growth_separation",
        big,
        c_empirical=str(c),
        coprime_r=coprime,
        B_over_c_pow_r=overtakes,
    )
