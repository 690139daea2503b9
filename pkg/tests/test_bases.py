"""Built-in factorial bases: elements, roots, leading indices.

The q-binomial family is cross-checked against an independent oracle: the
Pochhammer-quotient definition (q;q)_N / ((q;q)_k (q;q)_{N-k}) computed by
exact polynomial division.
"""

import pytest

from qbasis.bases import (
    BetaDescriptor,
    basis_from_roots,
    ktable,
    q_binomial_basis,
    q_falling_basis,
    q_power_basis,
)
from qbasis.errors import QBasisError
from qbasis.qseries import pochhammer, qbinom
from qbasis.ratfn import RatFn


def test_q_power_elements():
    P = q_power_basis(1)
    q = RatFn.var(P.table, "q")
    assert P.element(3, 2) == q**6
    assert P.element(0, 5) == 1
    P2 = q_power_basis(2)
    q2 = RatFn.var(P2.table, "q")
    assert P2.element(1, 4) == q2**8


def test_q_power_roots_all_zero():
    P = q_power_basis(1)
    rho = P.roots()
    for k in range(6):
        assert rho.at(k, P.t).is_zero()


def test_q_falling_elements():
    F = q_falling_basis()
    q = RatFn.var(F.table, "q")
    assert F.element(2, 2) == (q**2 - 1) * (q**2 - q)
    for k in range(1, 5):
        for n in range(k):
            assert F.element(k, n).is_zero()
    assert F.roots().at(3, 1) == q**3


def _poch_quotient_qbinom(table, n, k):
    """Oracle: (q;q)_n / ((q;q)_k (q;q)_{n-k}) by exact division."""
    if k < 0 or k > n:
        return RatFn.zero(table)
    q = RatFn.var(table, "q")
    num = pochhammer(q, 1, n)
    den = pochhammer(q, 1, k) * pochhammer(q, 1, n - k)
    return num / den


def test_q_binomial_matches_pochhammer_oracle():
    C = q_binomial_basis(1, 0, 0, 1)
    for n in range(9):
        for k in range(9):
            assert C.element(k, n) == _poch_quotient_qbinom(C.table, n, k)


def test_q_binomial_small_values():
    C = q_binomial_basis(1, 0, 0, 1)
    q = RatFn.var(C.table, "q")
    # [4 choose 2] = (1+q^2)(1+q+q^2)
    assert C.element(2, 4) == (1 + q**2) * (1 + q + q**2)
    assert C.element(2, 2) == 1
    for n in range(4):
        for k in range(n + 1, 6):
            assert C.element(k, n).is_zero()


def test_q_binomial_roots():
    C = q_binomial_basis(1, 0, 0, 3)
    q = RatFn.var(C.table, "q")
    rho = C.roots()
    for k in range(5):
        assert rho.at(k, 1) == q ** (3 * k)


def test_q_binomial_shifted_family():
    # B_k(n) = [n+1 choose k+1]: nonunit seed
    C = q_binomial_basis(1, 1, 1, 1)
    for n in range(7):
        for k in range(7):
            assert C.element(k, n) == qbinom(C.table, n + 1, k + 1)


def test_q_binomial_base_two():
    C = q_binomial_basis(1, 0, 0, 2)
    for n in range(6):
        for k in range(6):
            assert C.element(k, n) == qbinom(C.table, n, k, step=2)


def test_recurrence_property():
    for basis in (q_power_basis(2), q_falling_basis(), q_binomial_basis(1, 0, 0, 1)):
        for k in range(6):
            step_a = basis.a_at(k)
            step_b = basis.b_at(k)
            for n in range(6):
                lhs = basis.element(k + 1, n)
                rhs = (step_a * basis.beta_value(n) + step_b) * basis.element(k, n)
                assert lhs == rhs, (basis.label, k, n)


def test_root_kills_step():
    for basis in (q_falling_basis(), q_binomial_basis(1, 0, 0, 1), q_binomial_basis(2, 1, 0, 1)):
        rho = basis.roots()
        for k in range(8):
            val = basis.a_at(k) * rho.at(k, basis.t) + basis.b_at(k)
            assert val.is_zero()


def test_leading_index_builtin():
    C = q_binomial_basis(1, 0, 0, 1)
    for k in range(8):
        assert C.leading_index(k) == k
    P = q_power_basis(2)
    for k in range(8):
        assert P.leading_index(k) == 0
    F = q_falling_basis()
    for k in range(8):
        assert F.leading_index(k) == k


def test_leading_index_nondecreasing():
    for basis in (q_power_basis(1), q_falling_basis(), q_binomial_basis(1, 0, 0, 2),
                  q_binomial_basis(1, 1, 0, 1)):
        prev = -1
        for k in range(0, 41):
            n = basis.leading_index(k)
            assert n is not None
            assert n >= prev
            prev = n


def test_degenerate_binomial_rejected():
    with pytest.raises(QBasisError):
        q_binomial_basis(1, 0, -1, 1)


def test_basis_from_roots_reproduces_falling():
    table = ktable(stride=1)
    w = RatFn.var(table, table.shift_name)
    beta = BetaDescriptor.geometric(table, 1)
    built = basis_from_roots(table, beta, [w], [RatFn.one(table)], label="F2")
    F = q_falling_basis()
    for k in range(6):
        for n in range(6):
            assert built.element(k, n) == F.element(k, n).migrated(table)
