import math
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from semiformal.props import rand_rational_A
from semiformal.rational import (
    BBRInstance,
    IrreducibleFactorError,
    RatFun,
    build_vtable,
    check_combination,
    check_divisibility,
    check_dual_construction,
    check_growth_items,
    check_ode_identity,
    check_pole_prop,
    check_ur_identity,
    check_vk_power_path,
    check_vk_recurrence,
    expand,
    falling,
    least_k0,
    norm_induction,
    partial_fractions,
    poles,
    rational_roots,
    v_by_factorial_sum,
    vtable_from_sequence,
)
from semiformal.series import Poly

X = sympy.Symbol("x")

instances = st.lists(st.tuples(st.integers(-3, 3).filter(bool), st.integers(1, 4)), min_size=1, max_size=3, unique_by=lambda p: p[1]).map(
    lambda pairs: BBRInstance(tuple(b for b, _ in pairs), tuple(a for _, a in pairs))
)


def sym_ratfun(f: RatFun):
    num = sum(sympy.Rational(c.numerator, c.denominator) * X**i for i, c in enumerate(f.num.coeffs))
    den = sum(sympy.Rational(c.numerator, c.denominator) * X**i for i, c in enumerate(f.den.coeffs))
    return num / den


class TestExpansion:
    def test_examples(self):
        assert expand(RatFun.geometric(2), 5).coeffs == (1, 2, 4, 8, 16, 32)
        assert expand(RatFun(Poly([0, 0, 1])), 4).coeffs == (0, 0, 1, 0, 0)
        assert expand(RatFun(Poly([1]), Poly([1, -3, 2])), 4).coeffs == (1, 3, 7, 15, 31)

    def test_pole_at_zero_rejected(self):
        with pytest.raises(ValueError):
            RatFun(Poly([1]), Poly([0, 1]))

    @given(st.integers(0, 10**6))
    def test_matches_sympy_series(self, seed):
        f = rand_rational_A(random.Random(seed))
        ref = sympy.series(sym_ratfun(f), X, 0, 8).removeO()
        got = expand(f, 7)
        for n in range(8):
            c = ref.coeff(X, n)
            assert got.coeff(n) == Fraction(int(c.p), int(c.q))


class TestPartialFractions:
    def test_examples(self):
        pf = partial_fractions(RatFun(Poly([1]), Poly([1, -3, 2])))
        assert pf.poly_part.is_zero()
        assert pf.terms == ((Fraction(1), 1, Fraction(-1)), (Fraction(2), 1, Fraction(2)))
        pf = partial_fractions(RatFun(Poly([0, 1])))
        assert pf.poly_part == Poly([0, 1]) and pf.terms == ()
        pf = partial_fractions(RatFun.geometric(1, 2))
        assert pf.terms == ((Fraction(1), 2, Fraction(1)),)

    def test_irreducible_factor(self):
        with pytest.raises(IrreducibleFactorError):
            partial_fractions(RatFun(Poly([1]), Poly([1, 0, 1])))

    def test_rational_roots(self):
        roots = rational_roots(Poly.from_roots([Fraction(1, 2), 3, 3]))
        assert roots == {Fraction(1, 2): 1, Fraction(3): 2}

    @given(st.integers(0, 10**6))
    def test_recombines(self, seed):
        f = rand_rational_A(random.Random(seed))
        assert partial_fractions(f).recombine() == f

    @given(st.integers(0, 10**6))
    def test_matches_sympy_apart(self, seed):
        f = rand_rational_A(random.Random(seed))
        pf = partial_fractions(f)
        expr = sum(sympy.Rational(b.numerator, b.denominator) / (1 - sympy.Rational(a.numerator, a.denominator) * X) ** k for a, k, b in pf.terms)
        expr += sum(sympy.Rational(c.numerator, c.denominator) * X**i for i, c in enumerate(pf.poly_part.coeffs))
        assert sympy.simplify(expr - sym_ratfun(f)) == 0


class TestPoleProposition:
    def test_examples(self):
        v = check_pole_prop(Poly([1]), 2, 1, RatFun.geometric(1))
        assert v.ok and v.detail["result_poles"] == {"1/1": 2}
        assert check_pole_prop(Poly([1]), 0, 1, RatFun(Poly([0, 1]))).detail["polynomial"]
        v = check_pole_prop(Poly([1, -1]), 0, 1, RatFun.geometric(1))
        assert v.ok and v.detail["result_poles"] == {"1/1": 2}

    def test_zero_c_rejected(self):
        with pytest.raises(ValueError):
            check_pole_prop(Poly([1]), 0, 0, RatFun.geometric(1))

    @given(st.integers(0, 10**6), st.integers(0, 3), st.sampled_from([Fraction(1), Fraction(-2), Fraction(1, 3)]))
    def test_orders_doubled(self, seed, m, c):
        rng = random.Random(seed)
        A = rand_rational_A(rng)
        p = Poly([rng.randint(-3, 3) for _ in range(3)])
        v = check_pole_prop(p, m, c, A)
        assert v.ok
        # independent: every pole of A of order k is a pole of order k + 1 of A'
        for alpha, k in poles(A).items():
            assert poles(A.derivative())[alpha] == k + 1


class TestBBRTables:
    inst = BBRInstance((1,), (1,))

    def test_v_prefix(self):
        tab = build_vtable(self.inst, 10, 3)
        assert tab.v[:6] == (1, 2, 5, 16, 65, 326)
        assert tab.vk[1][:5] == (1, 1, 3, 11, 49)
        assert tab.vk[2][2:5] == (2, 8, 38)
        assert tab.vk[0] == tab.v

    def test_v_by_factorial_sum_oracle(self):
        # brute force n! sum u_r / r! with a fresh loop
        for n in range(30):
            ref = math.factorial(n) * sum(Fraction(1, math.factorial(r)) for r in range(n + 1))
            assert v_by_factorial_sum(self.inst, 30)[n] == ref

    def test_combination_example(self):
        tab = build_vtable(self.inst, 12, 4)
        assert tab.v[3] == falling(3, 0) * tab.u[3] + falling(3, 1) * tab.u[2] + falling(3, 2) * tab.v[1]
        assert check_combination(tab, 2).ok
        assert tab.v[0] == tab.u[0]

    def test_divisibility_example(self):
        tab = build_vtable(self.inst, 12, 4)
        assert tab.vk[3][3] % 6 == 0
        assert check_divisibility(tab).ok

    def test_ur_examples(self):
        assert check_ur_identity(self.inst, 0, 10).detail["p_r"] == ["1"]
        assert check_ur_identity(self.inst, 1, 10).detail["p_r"] == ["0", "1"]
        v = check_ur_identity(BBRInstance((1, 1), (1, 2)), 0, 10)
        assert v.ok and v.detail["p_r"] == ["2", "-3"]

    def test_ode_examples(self):
        assert check_ode_identity(self.inst, 40).ok
        assert check_ode_identity(BBRInstance((2,), (3,)), 30).ok

    def test_invalid_instances(self):
        with pytest.raises(ValueError):
            BBRInstance((1, 2), (1,))
        with pytest.raises(ValueError):
            BBRInstance((1, 1), (2, 2))
        with pytest.raises(ValueError):
            BBRInstance((0,), (1,))
        with pytest.raises(ValueError):
            build_vtable(BBRInstance((1, 1), (1, 2)), 5, 3)

    @given(instances, st.integers(1, 4))
    def test_all_unconditional_checks(self, inst, K):
        N = inst.t * K + 12
        tab = build_vtable(inst, N, K)
        assert check_dual_construction(tab, inst).ok
        assert check_vk_recurrence(tab, inst).ok
        assert check_vk_power_path(tab, inst).ok
        assert check_divisibility(tab, inst).ok
        assert all(check_combination(tab, k).ok for k in range(1, K + 1))
        assert check_ode_identity(inst, N, tab).ok

    @given(instances, st.integers(0, 3))
    def test_ur_identity(self, inst, r):
        v = check_ur_identity(inst, r, inst.t * (r + 1) + r + 4)
        assert v.ok
        assert v.detail["degree"] is None or v.detail["degree"] < inst.t * (r + 1)

    def test_negative_controls(self):
        tab = build_vtable(self.inst, 20, 3)
        broken_v = list(tab.v)
        broken_v[7] += 1
        bad = vtable_from_sequence(broken_v, tab.a, 3)
        assert not check_dual_construction(bad, self.inst).ok
        # divisibility needs the v_n of an actual instance
        assert not check_divisibility(vtable_from_sequence([1, 3, 5, 7, 11, 13, 17, 19], (1,), 3)).ok


class TestGrowthAndInduction:
    def test_base_failure_reported(self):
        inst = BBRInstance((1,), (1,))
        tab = build_vtable(inst, 30, 4)
        v = check_growth_items(tab, inst, c=4)
        assert v.detail["base_holds"] is False
        assert v.detail["base_first_violation"] == 2

    def test_synthetic_bound(self):
        tab = vtable_from_sequence([2**n for n in range(40)], (2,), 6)
        inst = BBRInstance((1,), (2,))
        v = check_growth_items(tab, inst, c=1)
        assert v.ok and v.detail["base_holds"] and v.detail["bound_violations"] == []

    def test_window_constant_base(self):
        inst = BBRInstance((1,), (1,))
        v = check_growth_items(build_vtable(inst, 40, 5), inst)
        assert v.detail["c_choice"] == "window_max" and v.detail["base_holds"]

    def test_least_k0(self):
        k0 = least_k0(1, 2, 3, 1)
        assert all(math.factorial(k) > 12**k for k in range(k0, k0 + 200))
        assert not math.factorial(k0 - 1) > 12 ** (k0 - 1)

    def test_induction_rational_control(self):
        tab = vtable_from_sequence([2**n for n in range(201)], (2,), 12)
        assert all(tab.vk[1][n] == 0 for n in range(1, 201))
        v = norm_induction(1, 1, None, tab)
        assert v.ok and v.detail["marked_zero"] == v.detail["window_size"] > 0

    def test_induction_genuine_fails(self):
        tab = build_vtable(BBRInstance((1,), (1,)), 200, 12)
        v = norm_induction(1, 1, None, tab)
        assert not v.ok
        assert int(v.detail["n_region_witness"]["value"]) != 0

    def test_induction_vacuous(self):
        tab = vtable_from_sequence([1, 2, 4], (2,), 1)
        v = norm_induction(1, 5, None, tab)
        assert v.ok and v.detail["window_size"] == 0

    def test_lying_oracle_caught(self):
        # an oracle claiming zeros the table does not have
        tab = build_vtable(BBRInstance((1,), (1,)), 60, 6)
        v = norm_induction(1, 1, lambda k, n: True, tab)
        assert not v.ok and v.detail["table_disagreements"]
