"""Exact linear algebra over the rational-function field.

Elimination is fraction-free (Bareiss): rows are cleared to polynomial
entries and every division in the update formula is exact by the Sylvester
determinant identity, so no gcd-based normalisation happens inside the
elimination loop.  Rational functions reappear only in the short
back-substitution phase.  Matrices here are small (ansatz systems for
lclm, guessing, and compatibility solves).
"""

from __future__ import annotations

import math
from fractions import Fraction

from . import mpoly
from .mpoly import MPoly
from .ratfn import RatFn


def _clear_row(row: list[RatFn], table) -> list[MPoly]:
    """Scale a row by a common denominator to get polynomial entries."""
    den = MPoly.const(table, 1)
    for x in row:
        if not x.is_zero() and not x.den.is_constant():
            den = mpoly.lcm(den, x.den)
    out = []
    for x in row:
        if x.is_zero():
            out.append(MPoly.zero(table))
        else:
            out.append(x.num * den.exact_div(x.den))
    # strip rational content so integer growth starts small
    num_gcd = 0
    den_lcm = 1
    for p in out:
        for c in p.terms.values():
            num_gcd = math.gcd(num_gcd, abs(c.numerator))
            den_lcm = math.lcm(den_lcm, c.denominator)
    if num_gcd not in (0, 1) or den_lcm != 1:
        s = Fraction(den_lcm, num_gcd)
        out = [p.scaled(s) for p in out]
    return out


def _bareiss_echelon(rows: list[list[MPoly]], ncols: int):
    """Fraction-free forward elimination.

    Returns (rows, pivots) where pivots is a list of (row, col) pairs and
    the rows below each pivot have been zeroed in that column.
    """
    m = len(rows)
    pivots: list[tuple[int, int]] = []
    prev = None
    r = 0
    for col in range(ncols):
        pivot = None
        for i in range(r, m):
            if not rows[i][col].is_zero():
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pk = rows[r][col]
        for i in range(r + 1, m):
            if all(rows[i][j].is_zero() for j in range(col, ncols)):
                continue
            fi = rows[i][col]
            new_row = []
            for j in range(ncols):
                if j < col:
                    new_row.append(rows[i][j])
                    continue
                val = pk * rows[i][j] - fi * rows[r][j]
                if prev is not None and not val.is_zero():
                    val = val.exact_div(prev)
                elif prev is not None:
                    val = MPoly.zero(val.table)
                new_row.append(val)
            rows[i] = new_row
        prev = pk
        pivots.append((r, col))
        r += 1
        if r == m:
            break
    return rows, pivots


def nullspace(matrix: list[list[RatFn]], table) -> list[list[RatFn]]:
    """Basis of the right nullspace of `matrix` (entries over `table`).

    One basis vector per free column, with that free coordinate set to 1
    and the remaining free coordinates 0; deterministic given the input.
    """
    if not matrix:
        return []
    ncols = len(matrix[0])
    rows = [_clear_row(r, table) for r in matrix]
    rows, pivots = _bareiss_echelon(rows, ncols)
    pivot_cols = [c for _, c in pivots]
    free = [c for c in range(ncols) if c not in pivot_cols]
    zero = RatFn.zero(table)
    one = RatFn.one(table)
    basis = []
    for fc in free:
        vec: list[RatFn] = [zero] * ncols
        vec[fc] = one
        for (ri, ci) in reversed(pivots):
            if ci > fc:
                continue
            acc = RatFn.zero(table)
            row = rows[ri]
            for j in range(ci + 1, ncols):
                if not row[j].is_zero() and not vec[j].is_zero():
                    acc = acc + RatFn.from_mpoly(row[j]) * vec[j]
            vec[ci] = -acc / RatFn.from_mpoly(row[ci])
        basis.append(vec)
    return basis


def solve(matrix: list[list[RatFn]], rhs: list[RatFn], table) -> list[RatFn] | None:
    """One exact solution of matrix * x = rhs, or None if inconsistent.

    Underdetermined systems get free variables set to zero.
    """
    if not matrix:
        return []
    ncols = len(matrix[0])
    rows = [_clear_row(list(r) + [b], table) for r, b in zip(matrix, rhs)]
    rows, pivots = _bareiss_echelon(rows, ncols + 1)
    if pivots and pivots[-1][1] == ncols:
        return None  # pivot in the augmented column: inconsistent
    # rows beyond the last pivot must be fully zero (they are, by echelon)
    zero = RatFn.zero(table)
    x: list[RatFn] = [zero] * ncols
    for (ri, ci) in reversed(pivots):
        row = rows[ri]
        acc = RatFn.from_mpoly(row[ncols])
        for j in range(ci + 1, ncols):
            if not row[j].is_zero() and not x[j].is_zero():
                acc = acc - RatFn.from_mpoly(row[j]) * x[j]
        x[ci] = acc / RatFn.from_mpoly(row[ci])
    return x
