"""Compatibility tables, their verification, and induced recurrence operators.

The expected tables and operators are the worked q-power / q-falling /
q-binomial relations; each is also re-verified against element values
through verify_compat, which is an independent check (elements come from
the product recurrence, the tables from the symbolic expansion).
"""

import pytest

from qbasis.bases import ktable, q_binomial_basis, q_falling_basis, q_power_basis
from qbasis.compat import (
    Compatibility,
    beta_atom,
    compile_expression,
    mul_beta_compat,
    rec_matrix,
    rec_operator,
    refine_sections,
    shift_atom,
    shift_compat,
    verify_compat,
    _shift_compat_interpolated,
)
from qbasis.errors import NotCompatible
from qbasis.ore import OreOp
from qbasis.ratfn import RatFn


def w_of(basis):
    return RatFn.var(basis.table, basis.table.shift_name)


def q_of(basis):
    return RatFn.var(basis.table, "q")


KMAX = 25


# ------------------------------------------------------- mul-beta tables ---


def test_q_power_mul_beta_table():
    for e in (1, 2):
        P = q_power_basis(e)
        comp = mul_beta_compat(P)
        assert (comp.A, comp.B, comp.t) == (0, 1, 1)
        assert comp.entry(0, 0).is_zero()
        assert comp.entry(0, 1) == RatFn.one(P.table)
        assert verify_compat(P, beta_atom(P), comp, KMAX).ok


def test_q_falling_mul_beta_table():
    F = q_falling_basis()
    comp = mul_beta_compat(F)
    assert comp.entry(0, 0) == w_of(F)          # q^k
    assert comp.entry(0, 1) == RatFn.one(F.table)
    assert verify_compat(F, beta_atom(F), comp, KMAX).ok


def test_q_binomial_mul_beta_table():
    C = q_binomial_basis(1, 0, 0, 1)
    comp = mul_beta_compat(C)
    w, q = w_of(C), q_of(C)
    assert comp.entry(0, 0) == w                 # q^k
    assert comp.entry(0, 1) == w * (q * w - 1)   # q^k (q^(k+1) - 1)
    assert verify_compat(C, beta_atom(C), comp, KMAX).ok


# ---------------------------------------------------------- shift tables ---


def test_q_power_shift_table():
    P = q_power_basis(1)
    comp = shift_compat(P)
    assert (comp.A, comp.B) == (0, 0)
    assert comp.entry(0, 0) == w_of(P)           # q^k
    P3 = q_power_basis(3)
    comp3 = shift_compat(P3)
    assert comp3.entry(0, 0) == w_of(P3)         # q^(3k) as the stride-3 variable


def test_q_falling_shift_table():
    F = q_falling_basis()
    comp = shift_compat(F)
    w, q = w_of(F), q_of(F)
    assert (comp.A, comp.B) == (1, 0)
    assert comp.entry(0, -1) == w * (w - 1) / q  # q^(k-1) (q^k - 1)
    assert comp.entry(0, 0) == w                 # q^k
    assert verify_compat(F, shift_atom(F), comp, KMAX).ok


def test_q_binomial_shift_table():
    C = q_binomial_basis(1, 0, 0, 1)
    comp = shift_compat(C)
    w = w_of(C)
    assert (comp.A, comp.B) == (1, 0)
    assert comp.entry(0, -1) == RatFn.one(C.table)
    assert comp.entry(0, 0) == w
    assert verify_compat(C, shift_atom(C), comp, KMAX).ok


def test_q_binomial_shift_A_matches_first_argument():
    # E is (a, 0)-compatible with [a*n + c choose k + t]
    for a in (1, 2, 3):
        C = q_binomial_basis(a, 0, 0, 1)
        comp = shift_compat(C)
        assert comp.A == a
        assert comp.B == 0


def test_corrupted_table_fails_verification():
    C = q_binomial_basis(1, 0, 0, 1)
    comp = mul_beta_compat(C)
    bad = Compatibility(
        comp.table, comp.A, comp.B, comp.t,
        ((comp.entry(0, 0) + 1, comp.entry(0, 1)),),
    )
    report = verify_compat(C, beta_atom(C), bad, 5)
    assert not report.ok
    assert report.failure[0] == 0


def test_shifted_seed_family_not_shift_compatible():
    # elements [n+1 choose k+1] have a non-trivial seed; E leaves the span
    C = q_binomial_basis(1, 1, 1, 1)
    with pytest.raises(NotCompatible):
        shift_compat(C)


def test_interpolation_fallback_agrees_with_telescoping():
    from qbasis.compat import _shift_compat_telescoped

    for basis in (q_falling_basis(), q_binomial_basis(1, 0, 0, 2)):
        direct = _shift_compat_telescoped(basis, None, 3)
        fitted = _shift_compat_interpolated(basis, None, 3)
        assert fitted.A == direct.A
        for i in range(-direct.A, 1):
            assert fitted.entry(0, i) == direct.entry(0, i)


# ------------------------------------------------------- induced operators --


def test_rec_operator_mul_beta_on_falling():
    # R_F(q^n) = S^-1 + q^k
    F = q_falling_basis()
    op = rec_operator(mul_beta_compat(F))
    expected = OreOp(F.table, {-1: RatFn.one(F.table), 0: w_of(F)})
    assert op == expected


def test_rec_operator_shift_on_falling():
    # R_F(E) = q^k + q^k (q^(k+1) - 1) S
    F = q_falling_basis()
    op = rec_operator(shift_compat(F))
    w, q = w_of(F), q_of(F)
    expected = OreOp(F.table, {0: w, 1: w * (q * w - 1)})
    assert op == expected


def test_rec_operator_shift_on_power():
    # R_P(e)(E) = q^(e k)
    for e in (1, 2):
        P = q_power_basis(e)
        op = rec_operator(shift_compat(P))
        assert op == OreOp.scalar(w_of(P))


def test_rec_operator_mul_beta_on_binomial():
    # R(q^n) over the q-binomial basis: q^(k-1)(q^k - 1) S^-1 + q^k
    C = q_binomial_basis(1, 0, 0, 1)
    op = rec_operator(mul_beta_compat(C))
    w, q = w_of(C), q_of(C)
    expected = OreOp(C.table, {-1: w * (w - 1) / q, 0: w})
    assert op == expected


def test_rec_operator_shift_on_binomial():
    # R(E) over the q-binomial basis: q^k + S
    C = q_binomial_basis(1, 0, 0, 1)
    op = rec_operator(shift_compat(C))
    expected = OreOp(C.table, {0: w_of(C), 1: RatFn.one(C.table)})
    assert op == expected


def test_rec_matrix_of_one_section_equals_operator():
    F = q_falling_basis()
    comp = mul_beta_compat(F)
    mat = rec_matrix(comp)
    assert mat.t == 1
    assert mat.entry(0, 0) == rec_operator(comp)


# ------------------------------------------------------ section refinement --


def test_refine_identity():
    C = q_binomial_basis(1, 0, 0, 1)
    comp = shift_compat(C)
    assert refine_sections(comp, 1) == comp


def test_refined_values_agree_pointwise():
    C = q_binomial_basis(1, 0, 0, 1)
    for comp in (shift_compat(C), mul_beta_compat(C)):
        ref = refine_sections(comp, 2)
        assert ref.t == 2
        for k in range(41):
            for i in range(-comp.A, comp.B + 1):
                assert ref.value(k, i) == comp.value(k, i).migrated(ref.table)


def test_refined_table_still_verifies():
    C = q_binomial_basis(1, 0, 0, 1)
    ref = refine_sections(shift_compat(C), 2)
    assert verify_compat(C, shift_atom(C), ref, 12).ok


# ------------------------------------------------------ compiled operators --


def test_compile_zq_annihilator():
    # R(E - 1 + z q^n) over the q-binomial basis:
    # (z q^(k-1))(q^k - 1) S^-1 + ((1+z) q^k - 1) + S
    C = q_binomial_basis(1, 0, 0, 1, params=("z",))
    ntab = shift_atom(C).table
    u = RatFn.var(ntab, "qn")
    z = RatFn.var(ntab, "z")
    L = OreOp(ntab, {1: RatFn.one(ntab), 0: z * u - 1})
    got = compile_expression(C, L, sections=1)
    w, q = w_of(C), q_of(C)
    zk = RatFn.var(C.table, "z")
    expected = OreOp(C.table, {
        -1: zk * w * (w - 1) / q,
        0: (1 + zk) * w - 1,
        1: RatFn.one(C.table),
    })
    assert got == expected


def test_compile_is_multiplicative():
    C = q_binomial_basis(1, 0, 0, 1)
    ntab = shift_atom(C).table
    u = RatFn.var(ntab, "qn")
    L1 = OreOp(ntab, {1: RatFn.one(ntab), 0: u})          # E + qn
    L2 = OreOp(ntab, {1: u, 0: RatFn.one(ntab)})          # qn E + 1
    lhs = compile_expression(C, L1 * L2, 1)
    rhs = compile_expression(C, L1, 1) * compile_expression(C, L2, 1)
    assert lhs == rhs
    lhs_add = compile_expression(C, L1 + L2, 1)
    rhs_add = compile_expression(C, L1, 1) + compile_expression(C, L2, 1)
    assert lhs_add == rhs_add
