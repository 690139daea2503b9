"""Polynomial and rational-function foundation.

Expected values for the small identities are frozen from independent
computation (direct product expansion); the randomized suites check field
axioms and normalisation canonicity exactly.
"""

import random
from fractions import Fraction

import pytest

from qbasis.errors import ExactDivisionError, SingularEvaluation
from qbasis.mpoly import MPoly, Shift, VarTable, gcd
from qbasis.ratfn import RatFn


def table_geo(e=1, params=()):
    return VarTable(params=tuple(params), shift_name="v", shift=Shift.geometric(e))


T = table_geo()
Q = RatFn.var(T, "q")
V = RatFn.var(T, "v")
ONE = RatFn.one(T)


def test_inverse_law_cancels():
    f = ONE / (1 - Q * V)
    assert f * (1 - Q * V) == ONE


def test_difference_of_squares_reduces():
    f = (1 - Q**2 * V**2) / (1 - Q * V)
    assert f == 1 + Q * V


def test_qq3_expansion():
    # (q;q)_3 = (1-q)(1-q^2)(1-q^3), frozen from direct multiplication
    p = (1 - Q) * (1 - Q**2) * (1 - Q**3)
    expected = 1 - Q - Q**2 + Q**4 + Q**5 - Q**6
    assert p == expected


def test_shift_substitution_geometric():
    assert V.shifted(1) == Q * V
    assert V.shifted(0) == V


def test_shift_substitution_negative_step_stride_two():
    t2 = table_geo(2)
    v = RatFn.var(t2, "v")
    q = RatFn.var(t2, "q")
    f = 1 / (1 - q * v)
    # v -> q**-2 v, so 1/(1 - q**-1 v), i.e. q/(q - v)
    assert f.shifted(-1) == q / (q - v)


def test_eval_index_examples():
    f = RatFn.q_power(T, -1) * V * (V - 1)  # q**(k-1) (q**k - 1) with v = q**k
    assert f.eval_index(0).is_zero()
    assert f.eval_index(2) == Q * (Q**2 - 1)


def test_eval_index_singular():
    f = 1 / (1 - V)
    with pytest.raises(SingularEvaluation) as err:
        f.eval_index(0)
    assert err.value.index == 0


def test_arithmetic_shift_var():
    ta = VarTable(params=(), shift_name="k", shift=Shift.arithmetic())
    k = RatFn.var(ta, "k")
    q = RatFn.var(ta, "q")
    f = k * k + q
    assert f.shifted(1) == (k + 1) * (k + 1) + q
    assert f.eval_index(3) == q + 9


def _random_ratfn(rng, table, max_terms=3):
    num = MPoly.zero(table)
    den = MPoly.zero(table)
    for _ in range(rng.randint(1, max_terms)):
        num = num + MPoly.monomial(
            table,
            Fraction(rng.randint(-4, 4), rng.randint(1, 3)),
            {"v": rng.randint(0, 2), "q": rng.randint(0, 2)},
        )
    while den.is_zero():
        den = MPoly.zero(table)
        for _ in range(rng.randint(1, max_terms)):
            den = den + MPoly.monomial(
                table,
                Fraction(rng.randint(-3, 3)),
                {"v": rng.randint(0, 1), "q": rng.randint(0, 2)},
            )
    return RatFn(num, den)


def test_field_axioms_randomized():
    rng = random.Random(20240901)
    for _ in range(60):
        a = _random_ratfn(rng, T)
        b = _random_ratfn(rng, T)
        c = _random_ratfn(rng, T)
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + b == b + a
        assert a * b == b * a
        if not a.is_zero():
            assert a * a.inverse() == ONE
        assert a + (-a) == RatFn.zero(T)


def test_normalization_canonicity():
    rng = random.Random(7311)
    for _ in range(40):
        x = _random_ratfn(rng, T)
        scale = MPoly.zero(T)
        while scale.is_zero():
            scale = MPoly.monomial(
                T, Fraction(rng.randint(-3, 3)), {"v": rng.randint(0, 1), "q": rng.randint(0, 2)}
            )
        y = RatFn(x.num * scale, x.den * scale)
        assert y.num.terms == x.num.terms
        assert y.den.terms == x.den.terms


def test_shift_then_eval_commutes():
    rng = random.Random(99)
    for _ in range(30):
        f = _random_ratfn(rng, T)
        s = rng.randint(-2, 2)
        k = rng.randint(0, 3)
        try:
            lhs = f.shifted(s).eval_index(k)
            rhs = f.eval_index(k + s)
        except SingularEvaluation:
            continue
        assert lhs == rhs


def test_reduction_preserves_function():
    rng = random.Random(4242)
    for _ in range(40):
        a = _random_ratfn(rng, T)
        b = _random_ratfn(rng, T)
        s = a * b
        # cross-multiplication check against unreduced product
        assert s.num * (a.den * b.den) == (a.num * b.num) * s.den


def test_gcd_divides_and_is_primitive():
    rng = random.Random(5150)
    for _ in range(25):
        a = _random_ratfn(rng, T).num
        b = _random_ratfn(rng, T).num
        g = gcd(a, b)
        if a.is_zero() and b.is_zero():
            continue
        if not a.is_zero():
            assert g.divides(a)
        if not b.is_zero():
            assert g.divides(b)
        assert g.fraction_content() == 1
        assert g.leading_coeff() > 0


def test_exact_division_error():
    p = (1 - Q * V).num
    d = (1 - Q).num
    with pytest.raises(ExactDivisionError):
        p.exact_div(d)


def test_negative_q_powers_in_denominator():
    f = RatFn.q_power(T, -3)
    assert f.den == MPoly.monomial(T, 1, {"q": 3})
    assert f * RatFn.q_power(T, 3) == ONE
