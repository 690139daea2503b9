"""Product bases: interlacing, inherited compatibilities, recurrence matrices.

The two 2x2 recurrence matrices of the stride-2 power/binomial product are
pinned entry by entry; they are the ground truth for the matrix index
conventions used everywhere else.
"""

import pytest

from qbasis.bases import q_binomial_basis, q_falling_basis, q_power_basis
from qbasis.compat import (
    beta_atom,
    mul_beta_compat,
    rec_matrix,
    shift_atom,
    shift_compat,
    verify_compat,
)
from qbasis.errors import QBasisError
from qbasis.ore import OreMat, OreOp
from qbasis.products import inherit_compat, product_basis
from qbasis.qseries import qbinom
from qbasis.ratfn import RatFn


def example_product():
    return product_basis([q_power_basis(2), q_binomial_basis(1, 0, 0, 2)])


def small_product():
    return product_basis([q_power_basis(1), q_binomial_basis(1, 0, 0, 1)])


def test_single_factor_rejected():
    with pytest.raises(QBasisError):
        product_basis([q_power_basis(1)])


def test_mixed_beta_rejected():
    with pytest.raises(QBasisError):
        product_basis([q_power_basis(1), q_power_basis(2)])


def test_element_identity_example():
    spec = example_product()
    B = spec.result
    P, Q = spec.factors
    assert B.t == 2
    for k in range(6):
        for n in range(6):
            even = B.element(2 * k, n)
            odd = B.element(2 * k + 1, n)
            pk = P.element(k, n).migrated(B.table)
            pk1 = P.element(k + 1, n).migrated(B.table)
            qk = Q.element(k, n).migrated(B.table)
            assert even == pk * qk
            assert odd == pk1 * qk


def test_element_identity_small():
    spec = small_product()
    B = spec.result
    q = RatFn.var(B.table, "q")
    for k in range(6):
        for n in range(6):
            assert B.element(2 * k, n) == q ** (k * n) * qbinom(B.table, n, k)


def test_leading_index_pairs():
    B = example_product().result
    for k in range(8):
        assert B.leading_index(2 * k) == k
        assert B.leading_index(2 * k + 1) == k
    prev = -1
    for k in range(41):
        n = B.leading_index(k)
        assert n is not None and n >= prev
        prev = n


def test_inherited_mul_beta_table():
    spec = example_product()
    comp = inherit_compat(spec, "mul_beta")
    B = spec.result
    w = RatFn.var(B.table, B.table.shift_name)  # q^(2k)
    q = RatFn.var(B.table, "q")
    assert (comp.A, comp.B, comp.t) == (0, 1, 2)
    assert comp.entry(0, 0).is_zero()
    assert comp.entry(0, 1) == RatFn.one(B.table)
    assert comp.entry(1, 0) == w
    assert comp.entry(1, 1) == w * (q**2 * w - 1)
    assert verify_compat(B, beta_atom(B), comp, 25).ok


def test_inherited_shift_table():
    spec = example_product()
    comp = inherit_compat(spec, "shift")
    B = spec.result
    w = RatFn.var(B.table, B.table.shift_name)
    q = RatFn.var(B.table, "q")
    assert (comp.A, comp.B, comp.t) == (2, 0, 2)
    assert comp.entry(0, -2).is_zero()
    assert comp.entry(0, -1) == w
    assert comp.entry(0, 0) == w * w
    assert comp.entry(1, -2) == w * w
    assert comp.entry(1, -1) == w * w * (w - 1)
    assert comp.entry(1, 0) == q**2 * w * w
    assert verify_compat(B, shift_atom(B), comp, 25).ok


def test_inherited_orders_respect_bounds():
    spec = small_product()
    shift = inherit_compat(spec, "shift")
    mul = inherit_compat(spec, "mul_beta")
    factor_a = [shift_compat(f).A for f in spec.factors]
    assert shift.A <= len(spec.factors) * max(factor_a)
    assert mul.B <= max(mul_beta_compat(f).B for f in spec.factors)
    assert shift.t == mul.t == 2


def test_recurrence_matrix_mul_beta():
    # R(q^(2n)) = [[0, q^(2k-2)(q^(2k)-1) S^-1], [1, q^(2k)]]
    spec = example_product()
    B = spec.result
    comp = inherit_compat(spec, "mul_beta")
    mat = rec_matrix(comp)
    w = RatFn.var(B.table, B.table.shift_name)
    q = RatFn.var(B.table, "q")
    tb = B.table
    expected = OreMat([
        [OreOp.zero(tb), OreOp(tb, {-1: w * (w - 1) / q**2})],
        [OreOp.one(tb), OreOp.scalar(w)],
    ])
    assert mat == expected


def test_recurrence_matrix_shift():
    # R(E) = [[q^(4k), q^(4k)(q^(2k)-1)], [q^(2k+2) S, q^(4k+2) + q^(4k+4) S]]
    spec = example_product()
    B = spec.result
    comp = inherit_compat(spec, "shift")
    mat = rec_matrix(comp)
    w = RatFn.var(B.table, B.table.shift_name)
    q = RatFn.var(B.table, "q")
    tb = B.table
    expected = OreMat([
        [OreOp.scalar(w**2), OreOp.scalar(w**2 * (w - 1))],
        [OreOp(tb, {1: q**2 * w}), OreOp(tb, {0: q**2 * w**2, 1: q**4 * w**2})],
    ])
    assert mat == expected


def test_falling_power_product():
    spec = product_basis([q_power_basis(1), q_falling_basis()])
    B = spec.result
    comp = inherit_compat(spec, "shift")
    assert verify_compat(B, shift_atom(B), comp, 12).ok
    mul = inherit_compat(spec, "mul_beta")
    assert verify_compat(B, beta_atom(B), mul, 12).ok
