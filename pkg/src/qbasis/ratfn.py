"""Normalised rational functions over a VarTable.

A RatFn is a reduced fraction num/den of MPoly values: gcd(num, den) is a
unit and den is integer-primitive with positive leading coefficient under
the graded-lex order.  Two representations of the same function are
therefore identical dicts, so == is mathematical equality.

Negative powers of q (from coefficients like q**(k-1) at k = 0) are held
in the denominator rather than as Laurent exponents, keeping one uniform
normal form.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from . import mpoly
from .errors import ExactDivisionError, SingularEvaluation, VarTableMismatch
from .mpoly import MPoly, Shift, VarTable


class RatFn:
    """Reduced fraction of sparse polynomials; immutable and exact."""

    __slots__ = ("num", "den")

    def __init__(self, num: MPoly, den: MPoly, _reduced: bool = False):
        if num.table != den.table:
            raise VarTableMismatch("numerator and denominator tables differ")
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _reduced:
            num, den = _reduce(num, den)
        self.num = num
        self.den = den

    # ---------------------------------------------------------------- build

    @classmethod
    def from_mpoly(cls, p: MPoly) -> "RatFn":
        return cls(p, MPoly.const(p.table, 1), _reduced=True)

    @classmethod
    def const(cls, table: VarTable, value) -> "RatFn":
        return cls.from_mpoly(MPoly.const(table, value))

    @classmethod
    def var(cls, table: VarTable, name: str) -> "RatFn":
        return cls.from_mpoly(MPoly.var(table, name))

    @classmethod
    def q_power(cls, table: VarTable, e: int) -> "RatFn":
        """q**e for any integer e, negative powers via the denominator."""
        one = MPoly.const(table, 1)
        if e >= 0:
            return cls(MPoly.monomial(table, 1, {"q": e}), one, _reduced=True)
        return cls(one, MPoly.monomial(table, 1, {"q": -e}), _reduced=True)

    @classmethod
    def zero(cls, table: VarTable) -> "RatFn":
        return cls.from_mpoly(MPoly.zero(table))

    @classmethod
    def one(cls, table: VarTable) -> "RatFn":
        return cls.const(table, 1)

    # ---------------------------------------------------------------- tests

    @property
    def table(self) -> VarTable:
        return self.num.table

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        return self.num.constant_value() / self.den.constant_value()

    def uses_shift_var(self) -> bool:
        t = self.table
        if t.shift_name is None:
            return False
        vi = t.shift_index
        return self.num.degree_in(vi) > 0 or self.den.degree_in(vi) > 0

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, MPoly)):
            other = self._coerce(other)
            if other is None:
                return NotImplemented
        if not isinstance(other, RatFn):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    # ----------------------------------------------------------- arithmetic

    def _coerce(self, other) -> "RatFn | None":
        if isinstance(other, RatFn):
            if other.table != self.table:
                raise VarTableMismatch("cannot combine values over different tables")
            return other
        if isinstance(other, MPoly):
            if other.table != self.table:
                raise VarTableMismatch("cannot combine values over different tables")
            return RatFn.from_mpoly(other)
        if isinstance(other, (int, Fraction)):
            return RatFn.const(self.table, other)
        return None

    def __add__(self, other) -> "RatFn":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        if self.den == rhs.den:
            return RatFn(self.num + rhs.num, self.den)
        return RatFn(self.num * rhs.den + rhs.num * self.den, self.den * rhs.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFn":
        return RatFn(-self.num, self.den, _reduced=True)

    def __sub__(self, other) -> "RatFn":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other) -> "RatFn":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return rhs + (-self)

    def __mul__(self, other) -> "RatFn":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return RatFn(self.num * rhs.num, self.den * rhs.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFn":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        if rhs.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFn(self.num * rhs.den, self.den * rhs.num)

    def __rtruediv__(self, other) -> "RatFn":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return rhs / self

    def __pow__(self, n: int) -> "RatFn":
        if n < 0:
            return (RatFn.one(self.table) / self) ** (-n)
        result = RatFn.one(self.table)
        base = self
        while n:
            if n & 1:
                result = result * base
            if n > 1:
                base = base * base
            n >>= 1
        return result

    def inverse(self) -> "RatFn":
        return RatFn.one(self.table) / self

    # --------------------------------------------------------- substitution

    def shifted(self, steps: int) -> "RatFn":
        """Image under the index step applied `steps` times (may be negative)."""
        if steps == 0 or not self.uses_shift_var():
            return self
        n, cn = self.num.shift_substituted(steps)
        d, cd = self.den.shift_substituted(steps)
        # value = (n / q**cn) / (d / q**cd) = n * q**(cd - cn) / d
        diff = cd - cn
        if diff >= 0:
            n = n * MPoly.monomial(n.table, 1, {"q": diff})
        else:
            d = d * MPoly.monomial(d.table, 1, {"q": -diff})
        return RatFn(n, d)

    def eval_index(self, k: int) -> "RatFn":
        """Instantiate the shift variable at index k, eliminating it.

        Raises SingularEvaluation if the denominator vanishes there.
        """
        if not self.uses_shift_var():
            return self
        n, cn = self.num.eval_shift_at(k)
        d, cd = self.den.eval_shift_at(k)
        if d.is_zero():
            raise SingularEvaluation(k)
        diff = cd - cn
        if diff >= 0:
            n = n * MPoly.monomial(n.table, 1, {"q": diff})
        else:
            d = d * MPoly.monomial(d.table, 1, {"q": -diff})
        return RatFn(n, d)

    def reindexed(self, lam: int, offset: int, new_table: VarTable) -> "RatFn":
        return RatFn(self.num.reindexed(lam, offset, new_table),
                     self.den.reindexed(lam, offset, new_table))

    def stride_rescaled(self, new_table: VarTable) -> "RatFn":
        return RatFn(self.num.stride_rescaled(new_table),
                     self.den.stride_rescaled(new_table), _reduced=True)

    def migrated(self, new_table: VarTable) -> "RatFn":
        if new_table == self.table:
            return self
        return RatFn(self.num.migrated(new_table), self.den.migrated(new_table),
                     _reduced=True)

    def eval_point(self, values: Mapping[str, Fraction]) -> Fraction:
        d = self.den.eval_point(values)
        if not d:
            raise ZeroDivisionError("denominator vanishes at sample point")
        return self.num.eval_point(values) / d

    # ------------------------------------------------------------ rendering

    def __str__(self) -> str:
        if self.den.is_constant():
            c = self.den.constant_value()
            if c == 1:
                return str(self.num)
            return f"({self.num})/{c}" if c.denominator == 1 else f"({self.num})/({c})"
        return f"({self.num})/({self.den})"

    def __repr__(self) -> str:
        return f"RatFn({self})"

    def sort_key(self) -> tuple:
        """Deterministic total order key, used only for tie-breaking."""

        def poly_key(p: MPoly):
            return tuple((e, (c.numerator, c.denominator)) for e, c in p._sorted_terms())

        return (poly_key(self.den), poly_key(self.num))


def _reduce(num: MPoly, den: MPoly) -> tuple[MPoly, MPoly]:
    if num.is_zero():
        return num, MPoly.const(den.table, 1)
    if not den.is_constant():
        # frequent case first: den divides num exactly (polynomial values)
        try:
            num = num.exact_div(den)
            den = MPoly.const(den.table, 1)
        except ExactDivisionError:
            g = mpoly.gcd(num, den)
            if not g.is_constant():
                num = num.exact_div(g)
                den = den.exact_div(g)
    unit, den = den.int_primitive()
    num = num.scaled(1 / unit)
    return num, den


def shift_of(table: VarTable) -> Shift:
    if table.shift is None:
        raise ValueError("table has no shift variable")
    return table.shift
