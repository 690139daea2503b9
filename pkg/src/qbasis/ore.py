"""Skew (Ore) operator algebra in one shift symbol over rational functions.

An OreOp is a Laurent polynomial sum(c_i * S**i) whose coefficients are
RatFn over a table with a shift variable.  Multiplication obeys the
commutation rule S * c = sigma(c) * S, where sigma is the index step
(geometric: v -> q**e v, arithmetic: v -> v+1).  The same type serves
operators in the original domain (symbol E over q**n) and in the
coefficient domain (symbol S over q**k); only the table differs.

Right division, GCRD, and LCLM are exact over the coefficient field.
Negative powers of S are allowed in storage; the Euclidean routines
require inputs with minimum exponent 0, which callers obtain via
shift_right_factor().
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from . import linalg, mpoly
from .errors import BudgetExceeded, VarTableMismatch
from .mpoly import MPoly, VarTable
from .ratfn import RatFn


class OreOp:
    """Laurent skew polynomial sum(c_i * S**i) with RatFn coefficients."""

    __slots__ = ("table", "coeffs")

    def __init__(self, table: VarTable, coeffs: dict[int, RatFn]):
        if table.shift is None:
            raise ValueError("operator table needs a shift variable")
        self.table = table
        self.coeffs = {i: c for i, c in coeffs.items() if not c.is_zero()}

    # ---------------------------------------------------------------- build

    @classmethod
    def zero(cls, table: VarTable) -> "OreOp":
        return cls(table, {})

    @classmethod
    def one(cls, table: VarTable) -> "OreOp":
        return cls(table, {0: RatFn.one(table)})

    @classmethod
    def scalar(cls, value: RatFn) -> "OreOp":
        return cls(value.table, {0: value})

    @classmethod
    def shift(cls, table: VarTable, power: int = 1) -> "OreOp":
        return cls(table, {power: RatFn.one(table)})

    @classmethod
    def from_coeffs(cls, table: VarTable, pairs: Iterable[tuple[int, RatFn]]) -> "OreOp":
        out: dict[int, RatFn] = {}
        for i, c in pairs:
            out[i] = out.get(i, RatFn.zero(table)) + c
        return cls(table, out)

    # ---------------------------------------------------------------- shape

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    @property
    def min_exp(self) -> int:
        if not self.coeffs:
            raise ValueError("zero operator has no support")
        return min(self.coeffs)

    @property
    def max_exp(self) -> int:
        if not self.coeffs:
            raise ValueError("zero operator has no support")
        return max(self.coeffs)

    def order(self) -> int:
        """Exponent span max - min; 0 for nonzero scalars."""
        if not self.coeffs:
            raise ValueError("zero operator has no order")
        return self.max_exp - self.min_exp

    def coeff(self, i: int) -> RatFn:
        return self.coeffs.get(i, RatFn.zero(self.table))

    def leading_coeff(self) -> RatFn:
        return self.coeffs[self.max_exp]

    def support(self) -> list[int]:
        return sorted(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, OreOp):
            return NotImplemented
        return self.table == other.table and self.coeffs == other.coeffs

    # ----------------------------------------------------------- arithmetic

    def _check(self, other: "OreOp") -> None:
        if self.table != other.table:
            raise VarTableMismatch("operators over different tables")

    def __add__(self, other) -> "OreOp":
        if isinstance(other, (int, Fraction, RatFn)):
            other = OreOp.scalar(self._scalar(other))
        if not isinstance(other, OreOp):
            return NotImplemented
        self._check(other)
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            s = out.get(i)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(i, None)
            else:
                out[i] = s
        return OreOp(self.table, out)

    __radd__ = __add__

    def __neg__(self) -> "OreOp":
        return OreOp(self.table, {i: -c for i, c in self.coeffs.items()})

    def __sub__(self, other) -> "OreOp":
        if isinstance(other, (int, Fraction, RatFn)):
            other = OreOp.scalar(self._scalar(other))
        if not isinstance(other, OreOp):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "OreOp":
        return (-self) + other

    def _scalar(self, value) -> RatFn:
        if isinstance(value, RatFn):
            if value.table != self.table:
                raise VarTableMismatch("scalar over a different table")
            return value
        return RatFn.const(self.table, value)

    def __mul__(self, other) -> "OreOp":
        """Skew product: S**i * c = sigma**i(c) * S**i."""
        if isinstance(other, (int, Fraction, RatFn)):
            other = OreOp.scalar(self._scalar(other))
        if not isinstance(other, OreOp):
            return NotImplemented
        self._check(other)
        out: dict[int, RatFn] = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                c = a * b.shifted(i)
                k = i + j
                s = out.get(k)
                s = c if s is None else s + c
                if s.is_zero():
                    out.pop(k, None)
                else:
                    out[k] = s
        return OreOp(self.table, out)

    def __rmul__(self, other) -> "OreOp":
        # scalar * operator (scalars commute into coefficients unshifted)
        if isinstance(other, (int, Fraction, RatFn)):
            c = self._scalar(other)
            return OreOp(self.table, {i: c * v for i, v in self.coeffs.items()})
        return NotImplemented

    def __pow__(self, n: int) -> "OreOp":
        if n < 0:
            raise ValueError("negative operator power")
        result = OreOp.one(self.table)
        base = self
        while n:
            if n & 1:
                result = result * base
            if n > 1:
                base = base * base
            n >>= 1
        return result

    def conjugated(self, steps: int) -> "OreOp":
        """Apply sigma**steps to every coefficient (exponents unchanged)."""
        return OreOp(self.table, {i: c.shifted(steps) for i, c in self.coeffs.items()})

    # -------------------------------------------------------- normalisation

    def monic(self) -> "OreOp":
        """Divide on the left by the leading coefficient."""
        if not self.coeffs:
            return self
        inv = self.leading_coeff().inverse()
        return OreOp(self.table, {i: inv * c for i, c in self.coeffs.items()})

    def primitive(self) -> "OreOp":
        """Scale by a unit so coefficients are coprime polynomials, leading sign +."""
        if not self.coeffs:
            return self
        table = self.table
        common_den = MPoly.const(table, 1)
        for c in self.coeffs.values():
            common_den = mpoly.lcm(common_den, c.den)
        nums = {}
        for i, c in self.coeffs.items():
            nums[i] = c.num * common_den.exact_div(c.den)
        g = None
        for p in nums.values():
            g = p if g is None else mpoly.gcd(g, p)
            if g.is_constant():
                break
        if not g.is_constant():
            nums = {i: p.exact_div(g) for i, p in nums.items()}
        gnum, dlcm = 0, 1
        for p in nums.values():
            for c in p.terms.values():
                gnum = math.gcd(gnum, abs(c.numerator))
                dlcm = math.lcm(dlcm, c.denominator)
        scale = Fraction(gnum, dlcm)
        if nums[max(nums)].leading_coeff() < 0:
            scale = -scale
        return OreOp(table, {
            i: RatFn.from_mpoly(p.scaled(1 / scale)) for i, p in nums.items()
        })

    def proportional(self, other: "OreOp") -> bool:
        """True when the operators agree up to a unit (nonzero RatFn factor)."""
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        return self.monic() == other.monic()

    def shift_right_factor(self) -> tuple["OreOp", int]:
        """Write self = S**power * core with core having trailing exponent 0.

        The core's coefficients are sigma-adjusted: core_i = sigma**(-power)
        of the coefficient of S**(power+i).
        """
        if not self.coeffs:
            raise ValueError("zero operator")
        p = self.min_exp
        if p == 0:
            return self, 0
        core = {i - p: c.shifted(-p) for i, c in self.coeffs.items()}
        return OreOp(self.table, core), p

    # ------------------------------------------------------------ division

    def quo_rem(self, den: "OreOp") -> tuple["OreOp", "OreOp"]:
        """Right division: self = quo * den + rem, order(rem) < order(den).

        Both operators must have minimum exponent 0.
        """
        self._check(den)
        if den.is_zero():
            raise ZeroDivisionError("division by zero operator")
        if (not self.is_zero() and self.min_exp < 0) or den.min_exp < 0:
            raise ValueError("Laurent operators: strip shift factors before division")
        quo = OreOp.zero(self.table)
        rem = self
        dd = den.max_exp
        while not rem.is_zero() and rem.max_exp >= dd:
            delta = rem.max_exp - dd
            c = rem.leading_coeff() / den.leading_coeff().shifted(delta)
            t = OreOp(self.table, {delta: c})
            quo = quo + t
            rem = rem - t * den
        return quo, rem

    def __mod__(self, other: "OreOp") -> "OreOp":
        return self.quo_rem(other)[1]

    # ----------------------------------------------------------- evaluation

    def apply_to_terms(self, terms: Sequence[RatFn], start: int = 0) -> list[RatFn]:
        """Apply to a window of sequence values terms[j] = s(start + j).

        Returns [(L s)(k) for k in range(k_lo, k_hi)] with
        k_lo = start + max(0, -min_exp) and k_hi = start + len(terms) - max_exp
        so that every touched index lies inside the window.
        """
        if self.is_zero():
            return [RatFn.zero(self.table) for _ in range(len(terms))]
        lo, hi = self.min_exp, self.max_exp
        k_lo = start + max(0, -lo)
        k_hi = start + len(terms) - hi
        out = []
        for k in range(k_lo, k_hi):
            acc = RatFn.zero(self.table)
            for i, c in self.coeffs.items():
                acc = acc + c.eval_index(k) * terms[k + i - start]
            out.append(acc)
        return out

    def applied_window(self, nterms: int, start: int = 0) -> tuple[int, int]:
        """Index range [k_lo, k_hi) that apply_to_terms covers."""
        lo, hi = self.min_exp, self.max_exp
        return start + max(0, -lo), start + nterms - hi

    # -------------------------------------------------- leading coefficient

    def leading_nonvanishing(self, from_index: int = 0) -> list[int]:
        """All k >= from_index where the leading coefficient evaluates to 0.

        Finiteness: a nonzero rational function of q and v cannot vanish at
        v = q**(e k) for infinitely many k; the top v-degree term dominates
        beyond a bound read off from the q-degrees of the numerator.
        """
        lead = self.leading_coeff()
        return zero_indices(lead, from_index)

    # ------------------------------------------------------------ rendering

    def __str__(self) -> str:
        return self.format()

    def format(self, symbol: str = "S") -> str:
        if not self.coeffs:
            return "0"
        chunks = []
        for i in sorted(self.coeffs, reverse=True):
            c = self.coeffs[i]
            if i == 0:
                chunks.append(f"({c})")
            else:
                s = symbol if i == 1 else f"{symbol}^({i})" if i < 0 else f"{symbol}^{i}"
                if c == RatFn.one(self.table):
                    chunks.append(s)
                else:
                    chunks.append(f"({c})*{s}")
        return " + ".join(chunks)

    def __repr__(self) -> str:
        return f"OreOp({self})"


# ----------------------------------------------------------- zero finding ---


def zero_indices(f: RatFn, from_index: int = 0) -> list[int]:
    """All integer k >= from_index with f(k) = 0 (empty if f is index-free).

    Raises SingularEvaluation if a candidate k is a pole of f.
    """
    if f.is_zero():
        raise ValueError("zero function vanishes everywhere")
    if not f.uses_shift_var():
        return []
    table = f.table
    num = f.num
    vi = table.shift_index
    qi = table.q_index
    if table.shift.is_geometric:
        e = table.shift.stride
        by_deg: dict[int, int] = {}
        for exp in num.terms:
            d = exp[vi]
            by_deg[d] = max(by_deg.get(d, -1), exp[qi])
        top = max(by_deg)
        bound = from_index - 1
        for d, qd in by_deg.items():
            if d == top:
                continue
            # beyond this k the top term's q-degree strictly dominates
            need = (qd - by_deg[top]) // (e * (top - d)) + 1
            bound = max(bound, need)
        zeros = []
        for k in range(from_index, bound + 1):
            if f.eval_index(k).is_zero():
                zeros.append(k)
        return zeros
    # arithmetic index: integer roots of a nonzero polynomial in v.  A random
    # specialisation of q and the parameters keeps every integer root and
    # yields a Cauchy bound to scan against.
    rng_vals = [Fraction(3, 2), Fraction(5, 3), Fraction(7, 2), Fraction(11, 7)]
    names = [n for n in table.names if n != table.shift_name]
    for attempt in range(len(rng_vals)):
        assign = {n: rng_vals[(attempt + j) % len(rng_vals)] + j for j, n in enumerate(names)}
        buckets: dict[int, Fraction] = {}
        for exp, c in num.terms.items():
            val = c
            for name in names:
                i = table.index_of(name)
                if exp[i]:
                    val *= assign[name] ** exp[i]
            buckets[exp[vi]] = buckets.get(exp[vi], Fraction(0)) + val
        buckets = {d: v for d, v in buckets.items() if v}
        if not buckets:
            continue
        top = max(buckets)
        if top == 0:
            return []
        cauchy = 1 + max(abs(v / buckets[top]) for d, v in buckets.items() if d != top) \
            if len(buckets) > 1 else Fraction(1)
        hi = int(cauchy) + 1
        zeros = []
        for k in range(from_index, hi + 1):
            if f.eval_index(k).is_zero():
                zeros.append(k)
        return zeros
    raise ArithmeticError("could not find a non-degenerate specialisation")


# ------------------------------------------------------------ gcrd / lclm ---


def gcrd(p: OreOp, q: OreOp) -> OreOp:
    """Monic greatest common right divisor via the skew Euclidean algorithm.

    Laurent inputs are stripped of their S-power unit factors first, which
    does not change right divisibility up to units.
    """
    if p.is_zero() or q.is_zero():
        raise ValueError("gcrd of the zero operator")
    a, _ = p.shift_right_factor()
    b, _ = q.shift_right_factor()
    if a.order() < b.order():
        a, b = b, a
    while not b.is_zero():
        _, r = a.quo_rem(b)
        if not r.is_zero():
            r = r.primitive()
        a, b = b, r
    return a.monic()


def lclm(p: OreOp, q: OreOp, max_order: int | None = None) -> tuple[OreOp, OreOp, OreOp]:
    """Least common left multiple: returns (l, u, w) with l = u*p = w*q.

    Found by linear algebra: for increasing target order N, look for a
    nontrivial combination of S**i * p and S**j * q that cancels.  Since the
    algebra has no zero divisors, any nontrivial nullspace vector yields a
    nonzero common multiple, and the first N with a solution is minimal.
    """
    if p.is_zero() or q.is_zero():
        raise ValueError("lclm of the zero operator")
    p0, _ = p.shift_right_factor()
    q0, _ = q.shift_right_factor()
    table = p.table
    dp, dq = p0.order(), q0.order()
    cap = dp + dq if max_order is None else max_order
    for n in range(max(dp, dq), cap + 1):
        rows_p = [OreOp.shift(table, i) * p0 for i in range(n - dp + 1)]
        rows_q = [OreOp.shift(table, j) * q0 for j in range(n - dq + 1)]
        # unknowns: coefficients of u then of w; equations per S-power
        ncols = len(rows_p) + len(rows_q)
        matrix = []
        for m in range(n + 1):
            row = [op.coeff(m) for op in rows_p]
            row += [-op.coeff(m) for op in rows_q]
            matrix.append(row)
        basis = linalg.nullspace(matrix, table)
        if not basis:
            continue
        vec = basis[0]
        u = OreOp.from_coeffs(table, ((i, vec[i]) for i in range(len(rows_p))))
        w = OreOp.from_coeffs(
            table, ((j, vec[len(rows_p) + j]) for j in range(len(rows_q)))
        )
        left = u * p0
        if left.is_zero() or not (left == w * q0):
            raise ArithmeticError("lclm ansatz produced an invalid combination")
        lead = left.leading_coeff().inverse()
        return lead * left, lead * u, lead * w
    raise BudgetExceeded(f"no common left multiple up to order {cap}")


# --------------------------------------------------------------- matrices ---


class OreMat:
    """Square matrix of Ore operators sharing one table."""

    __slots__ = ("table", "rows")

    def __init__(self, rows: Sequence[Sequence[OreOp]]):
        t = len(rows)
        if t == 0 or any(len(r) != t for r in rows):
            raise ValueError("OreMat must be square and non-empty")
        table = rows[0][0].table
        for r in rows:
            for op in r:
                if op.table != table:
                    raise VarTableMismatch("matrix entries over different tables")
        self.table = table
        self.rows = [list(r) for r in rows]

    @property
    def t(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, table: VarTable, t: int) -> "OreMat":
        return cls(
            [[OreOp.one(table) if i == j else OreOp.zero(table) for j in range(t)]
             for i in range(t)]
        )

    @classmethod
    def scalar(cls, value: RatFn, t: int) -> "OreMat":
        table = value.table
        return cls(
            [[OreOp.scalar(value) if i == j else OreOp.zero(table) for j in range(t)]
             for i in range(t)]
        )

    def entry(self, i: int, j: int) -> OreOp:
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, OreMat):
            return NotImplemented
        return self.t == other.t and all(
            self.rows[i][j] == other.rows[i][j]
            for i in range(self.t) for j in range(self.t)
        )

    def __add__(self, other: "OreMat") -> "OreMat":
        if self.t != other.t:
            raise ValueError("size mismatch")
        return OreMat(
            [[self.rows[i][j] + other.rows[i][j] for j in range(self.t)]
             for i in range(self.t)]
        )

    def __neg__(self) -> "OreMat":
        return OreMat([[-x for x in row] for row in self.rows])

    def __sub__(self, other: "OreMat") -> "OreMat":
        return self + (-other)

    def __mul__(self, other) -> "OreMat":
        if isinstance(other, OreMat):
            if self.t != other.t:
                raise ValueError("size mismatch")
            t = self.t
            out = []
            for i in range(t):
                row = []
                for j in range(t):
                    acc = OreOp.zero(self.table)
                    for s in range(t):
                        acc = acc + self.rows[i][s] * other.rows[s][j]
                    row.append(acc)
                out.append(row)
            return OreMat(out)
        if isinstance(other, (int, Fraction, RatFn)):
            return OreMat([[op * other for op in row] for row in self.rows])
        return NotImplemented

    def __pow__(self, n: int) -> "OreMat":
        if n < 0:
            raise ValueError("negative matrix power")
        result = OreMat.identity(self.table, self.t)
        base = self
        while n:
            if n & 1:
                result = result * base
            if n > 1:
                base = base * base
            n >>= 1
        return result

    def __str__(self) -> str:
        return "[" + "; ".join(
            ", ".join(str(op) for op in row) for row in self.rows
        ) + "]"

    __repr__ = __str__
