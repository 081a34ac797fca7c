"""Seeded randomized suites for the algebraic laws of series and exponential polynomials.

Each suite draws ``cases`` random instances from a :class:`random.Random`
seeded by the caller, checks one family of identities with exact equality,
and returns a :class:`Verdict` carrying the pass count and the first few
failing case indices.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

from .exactnum import ENum, enclose_enum
from .exppoly import ExpPoly, improper_integral, newton_integral, series_value_enclosure, to_interval_series
from .rational import RatFun, check_pole_prop
from .series import Poly, TruncSeries
from .verdict import Status, Verdict

SMALL_RATS = [Fraction(p, q) for q in (1, 2, 3) for p in range(-3, 4)]
RATES = [Fraction(-2), Fraction(-1), Fraction(-1, 2), Fraction(0), Fraction(1, 2), Fraction(1)]
DECAYING = [Fraction(-3), Fraction(-2), Fraction(-1), Fraction(-1, 2)]


def rand_rat(rng: random.Random, nonzero: bool = False) -> Fraction:
    while True:
        x = rng.choice(SMALL_RATS)
        if x or not nonzero:
            return x


def rand_enum(rng: random.Random, rational: bool = False) -> ENum:
    if rational:
        return ENum.coerce(rand_rat(rng))
    return ENum({rng.choice([Fraction(0), Fraction(1), Fraction(-1), Fraction(1, 2)]): rand_rat(rng) for _ in range(rng.randint(1, 2))})


def rand_poly(rng: random.Random, max_deg: int = 3, rational: bool = False, enum: bool = True) -> Poly:
    deg = rng.randint(0, max_deg)
    if not enum:
        return Poly(rand_rat(rng) for _ in range(deg + 1))
    return Poly(rand_enum(rng, rational) for _ in range(deg + 1))


def rand_exppoly(rng: random.Random, rates=RATES, parts: int = 2, max_deg: int = 3, rational: bool = False) -> ExpPoly:
    chosen = rng.sample(list(rates), k=min(parts, len(rates)))
    return ExpPoly({c: rand_poly(rng, max_deg, rational) for c in chosen})


def rand_decaying(rng: random.Random) -> ExpPoly:
    f = rand_exppoly(rng, DECAYING, parts=rng.randint(1, 2), max_deg=3)
    return f if not f.is_zero() else ExpPoly.exp(-1)


def rand_series(rng: random.Random, N: int = 8) -> TruncSeries:
    return TruncSeries([rand_rat(rng) for _ in range(N + 1)])


def _suite(name: str, cases: int, rng: random.Random, case: Callable[[random.Random], bool]) -> Verdict:
    failures = []
    for i in range(cases):
        if not case(rng):
            failures.append(i)
    return Verdict(
        name,
        Status.PASS if not failures else Status.FAIL,
        {"cases": cases, "passed": cases - len(failures), "failed_cases": failures[:10]},
    )


# ---------------------------------------------------------------------------
# individual laws
# ---------------------------------------------------------------------------


def _shift_composition(rng):
    f, c, d = rand_exppoly(rng), rand_rat(rng), rand_rat(rng)
    return f.shift(c).shift(d) == f.shift(c + d)


def _shift_product(rng):
    f, g, c = rand_exppoly(rng), rand_exppoly(rng), rand_rat(rng)
    return (f * g).shift(c) == f.shift(c) * g.shift(c)


def _exponential_identity(rng):
    a, b = rand_rat(rng, nonzero=True), rand_rat(rng)
    base = ExpPoly.exp().inner_scale(a)
    return base.shift(b / a) == base.scale(ENum.e(b))


def _newton_linearity(rng):
    f, g = rand_exppoly(rng), rand_exppoly(rng)
    a, b = rand_enum(rng), rand_enum(rng)
    u, v = rand_rat(rng), rand_rat(rng)
    lhs = newton_integral(f.scale(a) + g.scale(b), u, v)
    return lhs == a * newton_integral(f, u, v) + b * newton_integral(g, u, v)


def _newton_additivity(rng):
    f = rand_exppoly(rng)
    u, v, w = rand_rat(rng), rand_rat(rng), rand_rat(rng)
    return newton_integral(f, u, w) == newton_integral(f, u, v) + newton_integral(f, v, w)


def _newton_shift(rng):
    f = rand_exppoly(rng)
    u, v, b = rand_rat(rng), rand_rat(rng), rand_rat(rng)
    return newton_integral(f.shift(b), u, v) == newton_integral(f, u + b, v + b)


def _improper_linearity(rng):
    f, g = rand_decaying(rng), rand_decaying(rng)
    a, b, u = rand_enum(rng), rand_enum(rng), rand_rat(rng)
    combo = f.scale(a) + g.scale(b)
    lhs = improper_integral(combo, u) if not combo.is_zero() else ENum.coerce(0)
    return lhs == a * improper_integral(f, u) + b * improper_integral(g, u)


def _improper_additivity(rng):
    f = rand_decaying(rng)
    u, v = rand_rat(rng), rand_rat(rng)
    return improper_integral(f, u) == newton_integral(f, u, v) + improper_integral(f, v)


def _improper_shift(rng):
    f = rand_decaying(rng)
    u, b = rand_rat(rng), rand_rat(rng)
    return improper_integral(f.shift(b), u) == improper_integral(f, u + b)


def _derivative_laws(rng):
    f, g = rand_exppoly(rng), rand_exppoly(rng)
    a, b = rand_enum(rng), rand_enum(rng)
    s = rand_rat(rng, nonzero=True)
    ok = (f.scale(a) + g.scale(b)).derivative() == f.derivative().scale(a) + g.derivative().scale(b)
    ok &= (f * g).derivative() == f.derivative() * g + f * g.derivative()
    ok &= f.inner_scale(s).derivative() == f.derivative().inner_scale(s).scale(s)
    # the same laws on truncated series
    F, G = rand_series(rng), rand_series(rng)
    ok &= (F * G).derivative() == F.derivative() * G.truncate(F.horizon - 1) + F.truncate(F.horizon - 1) * G.derivative()
    ok &= F.inner_scale(s).derivative() == F.derivative().inner_scale(s).scale(s)
    return ok


def _primitive_laws(rng):
    f = rand_exppoly(rng)
    s = rand_rat(rng, nonzero=True)
    ok = f.primitive().derivative() == f
    ok &= f.derivative().primitive() == f - ExpPoly.const(f.value(0))
    ok &= f.inner_scale(s).primitive() == f.primitive().inner_scale(s).scale(1 / s)
    ok &= f.primitive().value(0) == 0
    F = rand_series(rng)
    ok &= F.primitive().derivative() == F
    ok &= F.derivative().primitive() == F - TruncSeries.one(F.horizon).scale(F.coeff(0))
    ok &= F.inner_scale(s).primitive() == F.primitive().inner_scale(s).scale(1 / s)
    return ok


def _inner_product_laws(rng):
    f, g = rand_exppoly(rng), rand_exppoly(rng)
    c = rand_rat(rng)
    ok = (f * g).inner_scale(c) == f.inner_scale(c) * g.inner_scale(c)
    ok &= f.inner_scale(1) == f
    ok &= f.inner_scale(0) == ExpPoly.const(f.value(0))
    F, G = rand_series(rng), rand_series(rng)
    ok &= (F * G).inner_scale(c) == F.inner_scale(c) * G.inner_scale(c)
    return ok


def _exact_truncated_agreement(rng):
    f = rand_exppoly(rng, rational=True)
    N = 10
    ivals = to_interval_series(f, N, Fraction(1, 10**6))
    ref = f.to_series(N)
    return all(iv.lo == iv.hi == ref.coeff(n) for n, iv in enumerate(ivals))


def _contained(value: ENum, iv) -> bool:
    """``value`` provably inside ``iv``: some refined enclosure of it fits inside.

    Refinement is relative to the width of ``iv``, which can be far below the
    requested tolerance when the series route converges quickly.
    """
    if iv.width == 0:
        return value.is_rational() and value.rational_value() == iv.lo
    return any(iv.contains_ival(enclose_enum(value, iv.width / 2**k)) for k in (4, 20, 64))


def _enclosure_coherence(rng):
    f = rand_exppoly(rng, max_deg=2)
    v = rand_rat(rng)
    eps = Fraction(1, 10**6)
    indep = series_value_enclosure(f, v, eps)
    u = rand_rat(rng)
    indep_int = series_value_enclosure(f, u, eps, integrate=True)
    return (
        indep.width <= eps
        and _contained(f.value(v), indep)
        and indep_int.width <= eps
        and _contained(newton_integral(f, 0, u), indep_int)
    )


POLE_ALPHAS = [Fraction(1), Fraction(2), Fraction(3), Fraction(-1), Fraction(1, 2), Fraction(-2, 3)]


def rand_rational_A(rng: random.Random) -> RatFun:
    A = RatFun(rand_poly(rng, max_deg=2, enum=False))
    for alpha in rng.sample(POLE_ALPHAS, k=rng.randint(0, 3)):
        for order in range(1, rng.randint(1, 3) + 1):
            beta = rand_rat(rng)
            if beta:
                A = A + RatFun.geometric(alpha, order, beta)
    return A


def _pole_proposition(rng):
    p = rand_poly(rng, max_deg=3, enum=False)
    m = rng.randint(0, 3)
    c = rand_rat(rng, nonzero=True)
    A = rand_rational_A(rng)
    v = check_pole_prop(p, m, c, A)
    return v.ok and all(order >= 2 for order in v.detail["result_poles"].values())


SUITES: dict[str, tuple[str, Callable]] = {
    "shift_composition": ("f((x+c)+d) = f(x+(c+d))", _shift_composition),
    "shift_product": ("(fg)(x+c) = f(x+c) g(x+c)", _shift_product),
    "exponential_identity": ("Exp((ax)+b/a) = e^b Exp(ax)", _exponential_identity),
    "newton_linearity": ("int_u^v (af+bg) = a int_u^v f + b int_u^v g", _newton_linearity),
    "newton_additivity": ("int_u^w f = int_u^v f + int_v^w f", _newton_additivity),
    "newton_shift": ("int_u^v f(x+b) = int_{u+b}^{v+b} f", _newton_shift),
    "improper_linearity": ("int_u^oo (af+bg) = a int_u^oo f + b int_u^oo g", _improper_linearity),
    "improper_additivity": ("int_u^oo f = int_u^v f + int_v^oo f", _improper_additivity),
    "improper_shift": ("int_u^oo f(x+b) = int_{u+b}^oo f", _improper_shift),
    "derivative_laws": ("(af+bg)' = af'+bg', (fg)' = f'g+fg', f(ax)' = a f'(ax)", _derivative_laws),
    "primitive_laws": ("(int f)' = f, int f' = f - [x^0]f, int f(ax) = (1/a)(int f)(ax)", _primitive_laws),
    "inner_product_laws": ("(fg)(cx) = f(cx)g(cx), f(1x) = f, f(0x) = [x^0]f", _inner_product_laws),
    "exact_truncated_agreement": ("exact expansion = truncated series", _exact_truncated_agreement),
    "enclosure_coherence": ("exact ENum value inside independent series enclosure", _enclosure_coherence),
    "pole_proposition": ("p A + c x^m A' has no pole of order 1", _pole_proposition),
}


def run_suite(name: str, seed: int, cases: int) -> Verdict:
    """One suite with its own stream, so suites are independent of run order."""
    _, fn = SUITES[name]
    rng = random.Random(f"{seed}:{name}")
    return _suite(name, cases, rng, fn)


def run_all(seed: int = 42, cases: int = 100, names=None) -> list[Verdict]:
    return [run_suite(n, seed, cases) for n in (names or SUITES)]
