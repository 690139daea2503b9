"""Interlaced products of factorial bases sharing one base sequence.

The product of bases B^(1), ..., B^(m) over the same beta(n) interlaces
their step data: the element at index K = j*m + i has consumed j+1 steps
of the factors before position i and j steps of the rest, so

    B_{K}(n) = prod_{i' < i} P^(i')_{j+1}(n) * prod_{i' >= i} P^(i')_j(n).

The result is again factorial with m * lcm(t_i) sections.  Compatibilities
are re-derived on the interlaced data by the same machinery used for plain
bases, which keeps a single verified code path; the inherited orders are
still subject to the product bounds A' <= m*max(A_i), B' <= max(B_i).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bases import BetaDescriptor, FactorialBasisSpec, ktable
from .compat import Compatibility, mul_beta_compat, shift_compat
from .errors import QBasisError
from .mpoly import Shift, VarTable
from .ratfn import RatFn


@dataclass(frozen=True)
class ProductSpec:
    factors: tuple[FactorialBasisSpec, ...]
    result: FactorialBasisSpec


def _refined_steps(basis: FactorialBasisSpec, big_t: int, new_table: VarTable):
    """Step data of `basis` re-sectioned to big_t sections over new_table."""
    lam = big_t // basis.t
    a_rows = []
    b_rows = []
    for u in range(lam):
        for r in range(basis.t):
            a_rows.append(basis.a[r].reindexed(lam, u, new_table))
            b_rows.append(basis.b[r].reindexed(lam, u, new_table))
    return a_rows, b_rows


def product_basis(factors: list[FactorialBasisSpec]) -> ProductSpec:
    """Interlaced product basis; factors must share beta and parameters."""
    if len(factors) < 2:
        raise QBasisError("a product basis needs at least two factors")
    first = factors[0]
    for f in factors[1:]:
        if f.beta.kind != first.beta.kind or f.beta.exponent != first.beta.exponent:
            raise QBasisError("product factors must share one base sequence")
        if f.table.params != first.table.params:
            raise QBasisError("product factors must share parameters")
    m = len(factors)
    big_t = 1
    for f in factors:
        big_t = big_t * f.t // math.gcd(big_t, f.t)
    geometric = first.beta.is_geometric
    if geometric:
        strides = [f.table.shift.stride * (big_t // f.t) for f in factors]
        h = strides[0]
        for s in strides[1:]:
            h = math.gcd(h, s)
        table = ktable(first.table.params, stride=h)
    else:
        table = ktable(first.table.params, arithmetic=True)

    refined = []
    for f in factors:
        lam = big_t // f.t
        if geometric:
            mid = f.table.with_shift(Shift.geometric(f.table.shift.stride * lam))
        else:
            mid = f.table
        a_rows, b_rows = _refined_steps(f, big_t, mid)
        if geometric:
            a_rows = [x.stride_rescaled(table) for x in a_rows]
            b_rows = [x.stride_rescaled(table) for x in b_rows]
        refined.append((a_rows, b_rows))

    # global section R = u*m + i: step u of the refined factor i
    a_total = []
    b_total = []
    for u in range(big_t):
        for i in range(m):
            a_total.append(refined[i][0][u])
            b_total.append(refined[i][1][u])

    if geometric:
        beta = BetaDescriptor.geometric(table, first.beta.exponent)
    else:
        beta = BetaDescriptor.arithmetic(table)

    seeds = [f for f in factors if f.seed is not None]

    def seed(n: int, _factors=tuple(factors), _table=table) -> RatFn:
        out = RatFn.one(_table)
        for f in _factors:
            out = out * f.seed_value(n).migrated(_table)
        return out

    label = "Product(" + ", ".join(f.label for f in factors) + ")"
    result = FactorialBasisSpec(
        table, beta, a_total, b_total, label=label,
        seed=seed if seeds else None,
    )
    return ProductSpec(tuple(factors), result)


def inherit_compat(product: ProductSpec, atom: str) -> Compatibility:
    """Compatibility of `atom` ("shift" or "mul_beta") with the product basis.

    Derived directly on the interlaced step data and verified there; the
    orders are checked against the product bounds from the factor tables.
    """
    basis = product.result
    if atom == "mul_beta":
        comp = mul_beta_compat(basis)
        bound_b = max(mul_beta_compat(f).B for f in product.factors)
        if comp.B > bound_b:
            raise QBasisError("inherited B exceeds the product bound")
        return comp
    if atom != "shift":
        raise QBasisError(f"unknown atom {atom!r}")
    comp = shift_compat(basis)
    factor_a = [shift_compat(f).A for f in product.factors]
    if comp.A > len(product.factors) * max(factor_a):
        raise QBasisError("inherited A exceeds the product bound")
    return comp
