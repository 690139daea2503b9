"""q-series utilities: Gaussian binomials, Pochhammer products, truncations.

Gaussian binomials are built by the q-Pascal recurrence (pure polynomial
additions), not by dividing factorial products; that keeps them cheap at
the sizes the identity checks need.  The same coefficients then serve as
an independent oracle against basis-element evaluation, which goes through
the product recurrence instead.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .errors import QBasisError
from .mpoly import MPoly, VarTable
from .ratfn import RatFn

# ------------------------------------------------------------ q-binomials --


@lru_cache(maxsize=None)
def _qbinom_coeffs(n: int, k: int, step: int) -> tuple[tuple[int, Fraction], ...]:
    """Coefficient list of the Gaussian binomial [n choose k] in base q**step."""
    if k < 0 or n < 0 or k > n:
        return ()
    if k == 0 or k == n:
        return ((0, Fraction(1)),)
    # [n,k] = [n-1,k-1] + q**(step*k) [n-1,k]
    out: dict[int, Fraction] = dict(_qbinom_coeffs(n - 1, k - 1, step))
    for e, c in _qbinom_coeffs(n - 1, k, step):
        e2 = e + step * k
        s = out.get(e2, Fraction(0)) + c
        if s:
            out[e2] = s
        else:
            out.pop(e2, None)
    return tuple(sorted(out.items()))


def qbinom(table: VarTable, n: int, k: int, step: int = 1) -> RatFn:
    """Gaussian binomial coefficient as a polynomial value; 0 outside 0<=k<=n."""
    terms = {}
    qi = table.q_index
    for e, c in _qbinom_coeffs(n, k, step):
        exp = [0] * table.nvars
        exp[qi] = e
        terms[tuple(exp)] = c
    return RatFn.from_mpoly(MPoly(table, terms))


# ------------------------------------------------------------- Pochhammer --


def pochhammer(a: RatFn, step_exp: int, n: int) -> RatFn:
    """Finite q-Pochhammer (a; q**step_exp)_n = prod_{j<n} (1 - a q**(step_exp j))."""
    table = a.table
    out = RatFn.one(table)
    for j in range(n):
        out = out * (1 - a * RatFn.q_power(table, step_exp * j))
    return out


# ---------------------------------------------------- truncated q-series ---


def q_valuation(p: MPoly) -> int | None:
    """Least power of q appearing in p; None for the zero polynomial."""
    if p.is_zero():
        return None
    qi = p.table.q_index
    return min(e[qi] for e in p.terms)


def series_truncate(p: MPoly, order: int) -> MPoly:
    """Drop monomials with q-power above `order`."""
    qi = p.table.q_index
    return MPoly(p.table, {e: c for e, c in p.terms.items() if e[qi] <= order})


def series_mul(a: MPoly, b: MPoly, order: int) -> MPoly:
    return series_truncate(a * b, order)


def series_inverse(p: MPoly, order: int) -> MPoly:
    """Inverse of a series with nonzero constant term, to the given q-order.

    The constant term (in q) must be a nonzero rational; parameter-dependent
    constant terms are not supported.
    """
    table = p.table
    qi = table.q_index
    c0 = Fraction(0)
    for e, c in p.terms.items():
        if e[qi] == 0:
            if any(e[i] for i in range(table.nvars) if i != qi):
                raise QBasisError("series inverse needs a scalar constant term")
            c0 = c
    if not c0:
        raise QBasisError("series has no constant term; not invertible")
    # p = c0 (1 - g) with val_q(g) >= 1; 1/p = (1/c0) sum g**i
    g = series_truncate(p.scaled(-1 / c0) + 1, order)
    out = MPoly.const(table, 1)
    power = MPoly.const(table, 1)
    for _ in range(order):
        if power.is_zero():
            break
        power = series_mul(power, g, order)
        out = out + power
    return series_truncate(out.scaled(1 / c0), order)


def ratfn_series(f: RatFn, order: int) -> MPoly:
    """Power-series expansion of a rational function to the given q-order."""
    inv = series_inverse(f.den, order)
    return series_mul(f.num, inv, order)


def product_series(
    table: VarTable,
    factors: list[tuple[RatFn, int, int, int]],
    order: int,
) -> MPoly:
    """Truncated infinite product prod_j (1 + coeff * q**(base + step*j))**sign.

    Each entry of `factors` is (coeff, base, step, sign) with step > 0 and
    sign +1 or -1; factors whose q-power exceeds `order` are dropped, which
    is exact for the truncation since base + step*j grows without bound.
    """
    out = MPoly.const(table, 1)
    for coeff, base, step, sign in factors:
        if step <= 0:
            raise QBasisError("product factor needs a positive step")
        if not coeff.is_polynomial():
            raise QBasisError("product factor coefficient must be polynomial")
        j = 0
        while base + step * j <= order:
            factor = (1 + coeff * RatFn.q_power(table, base + step * j)).num
            if sign == 1:
                out = series_mul(out, factor, order)
            else:
                out = series_mul(out, series_inverse(factor, order), order)
            j += 1
    return series_truncate(out, order)
