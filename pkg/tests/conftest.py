import sys
from fractions import Fraction

import mpmath
from hypothesis import settings, strategies as st

from semiformal import ENum, Ival

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

mpmath.mp.dps = 60

small_ints = st.integers(min_value=-6, max_value=6)
rats = st.fractions(min_value=-5, max_value=5, max_denominator=6)
nonzero_rats = rats.filter(lambda x: x != 0)
exps = st.sampled_from([Fraction(q, d) for q in range(-3, 4) for d in (1, 2)])


@st.composite
def enums(draw, max_terms=3):
    terms = draw(st.dictionaries(exps, rats, max_size=max_terms))
    return ENum(terms)


@st.composite
def ivals(draw):
    a, b = draw(rats), draw(rats)
    return Ival(min(a, b), max(a, b))


def mp_value(v: ENum):
    """High-precision float of an ENum, independent of the enclosure code."""
    return mpmath.fsum(mpmath.mpf(c.numerator) / c.denominator * mpmath.exp(mpmath.mpf(q.numerator) / q.denominator) for q, c in v.items())


def mp_in(x, iv: Ival) -> bool:
    return mpmath.mpf(iv.lo.numerator) / iv.lo.denominator <= x <= mpmath.mpf(iv.hi.numerator) / iv.hi.denominator


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
