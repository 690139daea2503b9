"""Exact sparse multivariate polynomials over the rationals.

Variables live in a VarTable: an ordered tuple of parameter symbols, an
optional distinguished *shift variable*, and always ``q`` as the last
variable.  A polynomial maps exponent tuples to Fraction coefficients;
zero coefficients are never stored, so equality of dicts is equality of
polynomials.

The shift variable stands for an index-dependent quantity.  With a
geometric shift of stride ``e`` the variable v represents q**(e*m) for a
running index m, and stepping m -> m+1 multiplies v by q**e.  With an
arithmetic shift v represents m itself and stepping adds 1.  Keeping the
index inside an ordinary commutative variable keeps all arithmetic in a
plain polynomial ring; the non-commutativity lives in the operator layer.

Monomials are ordered graded-lexicographically with q least significant,
which fixes canonical leading terms for normalisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .errors import ExactDivisionError, VarTableMismatch

GEOMETRIC = "geometric"
ARITHMETIC = "arithmetic"


@dataclass(frozen=True)
class Shift:
    """Action of the index step on the shift variable.

    kind "geometric" with stride e: v -> q**e * v   (v stands for q**(e*m))
    kind "arithmetic":              v -> v + 1      (v stands for m)
    """

    kind: str
    stride: int = 1

    def __post_init__(self):
        if self.kind not in (GEOMETRIC, ARITHMETIC):
            raise ValueError(f"unknown shift kind {self.kind!r}")
        if self.kind == GEOMETRIC and self.stride < 1:
            raise ValueError("geometric stride must be >= 1")

    @staticmethod
    def geometric(stride: int) -> "Shift":
        return Shift(GEOMETRIC, stride)

    @staticmethod
    def arithmetic() -> "Shift":
        return Shift(ARITHMETIC, 1)

    @property
    def is_geometric(self) -> bool:
        return self.kind == GEOMETRIC


@dataclass(frozen=True)
class VarTable:
    """Ordered variable context: parameters, optional shift variable, then q.

    All values combined by arithmetic must share one table.  The table is
    immutable; section refinement and stride changes produce new tables
    with the same symbol names.
    """

    params: tuple[str, ...] = ()
    shift_name: str | None = None
    shift: Shift | None = None

    def __post_init__(self):
        names = list(self.params)
        if self.shift_name is not None:
            names.append(self.shift_name)
        names.append("q")
        if len(set(names)) != len(names):
            raise ValueError(f"variable names must be distinct, got {names}")
        if (self.shift_name is None) != (self.shift is None):
            raise ValueError("shift_name and shift must be given together")

    @property
    def names(self) -> tuple[str, ...]:
        base = self.params
        if self.shift_name is not None:
            base = base + (self.shift_name,)
        return base + ("q",)

    @property
    def nvars(self) -> int:
        return len(self.params) + (2 if self.shift_name is not None else 1)

    @property
    def q_index(self) -> int:
        return self.nvars - 1

    @property
    def shift_index(self) -> int:
        if self.shift_name is None:
            raise ValueError("table has no shift variable")
        return len(self.params)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None

    def with_shift(self, shift: Shift) -> "VarTable":
        """Same symbols, different shift action (e.g. after section refinement)."""
        if self.shift_name is None:
            raise ValueError("table has no shift variable")
        return VarTable(self.params, self.shift_name, shift)

    def without_shift(self) -> "VarTable":
        return VarTable(self.params, None, None)


def _check_same_table(a: "MPoly", b: "MPoly") -> None:
    if a.table != b.table:
        raise VarTableMismatch(f"cannot combine values over {a.table} and {b.table}")


class MPoly:
    """Sparse multivariate polynomial with Fraction coefficients."""

    __slots__ = ("table", "terms")

    def __init__(self, table: VarTable, terms: Mapping[tuple[int, ...], Fraction]):
        self.table = table
        self.terms = {e: c for e, c in terms.items() if c}

    # ---------------------------------------------------------------- build

    @classmethod
    def zero(cls, table: VarTable) -> "MPoly":
        return cls(table, {})

    @classmethod
    def const(cls, table: VarTable, value) -> "MPoly":
        c = Fraction(value)
        if not c:
            return cls(table, {})
        return cls(table, {(0,) * table.nvars: c})

    @classmethod
    def var(cls, table: VarTable, name: str) -> "MPoly":
        idx = table.index_of(name)
        exp = [0] * table.nvars
        exp[idx] = 1
        return cls(table, {tuple(exp): Fraction(1)})

    @classmethod
    def monomial(cls, table: VarTable, coeff, powers: Mapping[str, int]) -> "MPoly":
        c = Fraction(coeff)
        if not c:
            return cls(table, {})
        exp = [0] * table.nvars
        for name, p in powers.items():
            if p < 0:
                raise ValueError("MPoly exponents must be non-negative")
            exp[table.index_of(name)] = p
        return cls(table, {tuple(exp): c})

    # ---------------------------------------------------------------- tests

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return next(iter(self.terms.values()))

    def is_monomial(self) -> bool:
        return len(self.terms) <= 1

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = MPoly.const(self.table, other)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.table == other.table and self.terms == other.terms

    # ----------------------------------------------------------- arithmetic

    def _coerce(self, other) -> "MPoly | None":
        if isinstance(other, MPoly):
            _check_same_table(self, other)
            return other
        if isinstance(other, (int, Fraction)):
            return MPoly.const(self.table, other)
        return None

    def __add__(self, other) -> "MPoly":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        out = dict(self.terms)
        for e, c in rhs.terms.items():
            s = out.get(e, Fraction(0)) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MPoly(self.table, out)

    __radd__ = __add__

    def __neg__(self) -> "MPoly":
        return MPoly(self.table, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MPoly":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other) -> "MPoly":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return rhs + (-self)

    def __mul__(self, other) -> "MPoly":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        if not self.terms or not rhs.terms:
            return MPoly.zero(self.table)
        out: dict[tuple[int, ...], Fraction] = {}
        for ea, ca in self.terms.items():
            for eb, cb in rhs.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(e, Fraction(0)) + ca * cb
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return MPoly(self.table, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial; use RatFn")
        result = MPoly.const(self.table, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def scaled(self, c) -> "MPoly":
        c = Fraction(c)
        if not c:
            return MPoly.zero(self.table)
        return MPoly(self.table, {e: co * c for e, co in self.terms.items()})

    # -------------------------------------------------------------- degrees

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def degree_in(self, idx: int) -> int:
        if not self.terms:
            return 0
        return max(e[idx] for e in self.terms)

    def min_degree_in(self, idx: int) -> int:
        if not self.terms:
            return 0
        return min(e[idx] for e in self.terms)

    def leading_key(self) -> tuple[int, ...]:
        """Largest exponent tuple under graded lex (q least significant)."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self.terms, key=lambda e: (sum(e), e))

    def leading_coeff(self) -> Fraction:
        return self.terms[self.leading_key()]

    # ---------------------------------------------- integer content / signs

    def fraction_content(self) -> Fraction:
        """Positive rational c such that self/c has coprime integer coefficients."""
        if not self.terms:
            return Fraction(1)
        num = 0
        den = 1
        for c in self.terms.values():
            num = math.gcd(num, abs(c.numerator))
            den = den * c.denominator // math.gcd(den, c.denominator)
        return Fraction(num, den)

    def int_primitive(self) -> tuple[Fraction, "MPoly"]:
        """Split into (unit, primitive part): self = unit * part.

        The part has coprime integer coefficients and positive leading
        coefficient; this is the canonical representative up to units.
        """
        if not self.terms:
            return Fraction(1), self
        c = self.fraction_content()
        if self.leading_coeff() < 0:
            c = -c
        return c, self.scaled(1 / c)

    # --------------------------------------------------------- substitution

    def eval_point(self, values: Mapping[str, Fraction]) -> Fraction:
        """Evaluate at a rational point; every variable must be assigned."""
        vals = [Fraction(values[name]) for name in self.table.names]
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for ex, v in zip(e, vals):
                if ex:
                    t *= v**ex
            total += t
        return total

    def shift_substituted(self, steps: int) -> tuple["MPoly", int]:
        """Apply the index step `steps` times to the shift variable.

        Returns (poly, clear) with the substituted value equal to
        poly / q**clear; the clearing power is needed because negative
        steps introduce negative powers of q.
        """
        table = self.table
        if table.shift is None:
            raise ValueError("table has no shift variable")
        if steps == 0 or not self.terms:
            return self, 0
        vi = table.shift_index
        qi = table.q_index
        if table.shift.is_geometric:
            off = table.shift.stride * steps
            moved = {}
            min_q = 0
            for e, c in self.terms.items():
                dq = e[qi] + off * e[vi]
                if dq < min_q:
                    min_q = dq
            clear = -min_q
            for e, c in self.terms.items():
                ne = list(e)
                ne[qi] = e[qi] + off * e[vi] + clear
                moved[tuple(ne)] = c
            return MPoly(table, moved), clear
        # arithmetic: v -> v + steps, expanded by the binomial theorem
        v = MPoly.var(table, table.shift_name)
        image = v + steps
        out = MPoly.zero(table)
        powers = {0: MPoly.const(table, 1)}
        for e, c in self.terms.items():
            d = e[vi]
            if d not in powers:
                powers[d] = image**d
            rest = list(e)
            rest[vi] = 0
            out = out + powers[d] * MPoly(table, {tuple(rest): c})
        return out, 0

    def eval_shift_at(self, k: int) -> tuple["MPoly", int]:
        """Substitute the index value k for the shift variable.

        Geometric: v -> q**(e*k); arithmetic: v -> k.  Returns (poly, clear)
        with the value equal to poly / q**clear.
        """
        table = self.table
        if table.shift is None:
            raise ValueError("table has no shift variable")
        vi = table.shift_index
        qi = table.q_index
        out: dict[tuple[int, ...], Fraction] = {}
        if table.shift.is_geometric:
            off = table.shift.stride * k
            min_q = 0
            for e, c in self.terms.items():
                dq = e[qi] + off * e[vi]
                if dq < min_q:
                    min_q = dq
            clear = -min_q
            for e, c in self.terms.items():
                ne = list(e)
                ne[qi] = e[qi] + off * e[vi] + clear
                ne[vi] = 0
                key = tuple(ne)
                s = out.get(key, Fraction(0)) + c
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
            return MPoly(table, out), clear
        kf = Fraction(k)
        for e, c in self.terms.items():
            ne = list(e)
            ne[vi] = 0
            key = tuple(ne)
            s = out.get(key, Fraction(0)) + c * kf ** e[vi]
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return MPoly(table, out), 0

    def reindexed(self, lam: int, offset: int, new_table: VarTable) -> "MPoly":
        """Substitute index m -> lam*m' + offset, moving to new_table.

        Geometric: the new shift variable has stride e*lam, so v maps to
        q**(e*offset) * v'.  Arithmetic: v maps to lam*v' + offset.
        Requires lam >= 1 and offset >= 0.
        """
        table = self.table
        if table.shift is None:
            raise ValueError("table has no shift variable")
        if lam < 1 or offset < 0:
            raise ValueError("need lam >= 1 and offset >= 0")
        vi = table.shift_index
        qi = table.q_index
        if table.shift.is_geometric:
            if new_table.shift != Shift.geometric(table.shift.stride * lam):
                raise ValueError("new table stride must be old stride times lam")
            out = {}
            off = table.shift.stride * offset
            for e, c in self.terms.items():
                ne = list(e)
                ne[qi] = e[qi] + off * e[vi]
                out[tuple(ne)] = c
            return MPoly(new_table, out)
        if new_table.shift != Shift.arithmetic():
            raise ValueError("new table must be arithmetic")
        v = MPoly.var(new_table, new_table.shift_name)
        image = v.scaled(lam) + offset
        out_p = MPoly.zero(new_table)
        powers = {0: MPoly.const(new_table, 1)}
        for e, c in self.terms.items():
            d = e[vi]
            if d not in powers:
                powers[d] = image**d
            rest = list(e)
            rest[vi] = 0
            out_p = out_p + powers[d] * MPoly(new_table, {tuple(rest): c})
        return out_p

    def stride_rescaled(self, new_table: VarTable) -> "MPoly":
        """Re-express over a finer geometric stride dividing the current one.

        If v = q**(e*m) and the new variable is v' = q**(e'*m) with e' | e,
        then v = v'**(e/e').
        """
        table = self.table
        if table.shift is None or not table.shift.is_geometric:
            raise ValueError("stride rescaling needs a geometric shift variable")
        e_old = table.shift.stride
        e_new = new_table.shift.stride
        if e_old % e_new:
            raise ValueError(f"new stride {e_new} must divide old stride {e_old}")
        f = e_old // e_new
        vi = table.shift_index
        out = {}
        for e, c in self.terms.items():
            ne = list(e)
            ne[vi] = e[vi] * f
            out[tuple(ne)] = c
        return MPoly(new_table, out)

    def migrated(self, new_table: VarTable) -> "MPoly":
        """Re-home a value onto another table sharing the used variable names.

        Only legal when every variable actually appearing in self exists in
        new_table (typically: shift-free values moving between domains).
        """
        if new_table == self.table:
            return self
        old_names = self.table.names
        new_names = new_table.names
        pos = []
        for i, name in enumerate(old_names):
            if name in new_names:
                pos.append(new_names.index(name))
            else:
                if any(e[i] for e in self.terms):
                    raise VarTableMismatch(
                        f"value uses variable {name!r} absent from target table"
                    )
                pos.append(None)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * new_table.nvars
            for i, p in enumerate(pos):
                if e[i]:
                    ne[p] = e[i]
            key = tuple(ne)
            s = out.get(key, Fraction(0)) + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return MPoly(new_table, out)

    # ----------------------------------------------------- division and gcd

    def exact_div(self, divisor: "MPoly") -> "MPoly":
        """Divide exactly, raising ExactDivisionError on any remainder."""
        _check_same_table(self, divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.is_zero():
            return self
        if divisor.is_constant():
            return self.scaled(1 / divisor.constant_value())
        if divisor.is_monomial():
            de, dc = next(iter(divisor.terms.items()))
            out = {}
            for e, c in self.terms.items():
                ne = tuple(x - y for x, y in zip(e, de))
                if any(x < 0 for x in ne):
                    raise ExactDivisionError("monomial division leaves remainder")
                out[ne] = c / dc
            return MPoly(self.table, out)
        import heapq

        rem = dict(self.terms)
        out: dict[tuple[int, ...], Fraction] = {}
        dk = divisor.leading_key()
        dc = divisor.terms[dk]
        # max-heap with lazy deletion; graded-lex via negated keys
        heap = [(-sum(e), tuple(-x for x in e)) for e in rem]
        heapq.heapify(heap)
        while rem:
            while heap:
                ng, ne = heap[0]
                rk = tuple(-x for x in ne)
                if rk in rem:
                    break
                heapq.heappop(heap)
            qe = tuple(x - y for x, y in zip(rk, dk))
            if any(x < 0 for x in qe):
                raise ExactDivisionError("division leaves remainder")
            qc = rem[rk] / dc
            out[qe] = out.get(qe, Fraction(0)) + qc
            for e, c in divisor.terms.items():
                t = tuple(x + y for x, y in zip(qe, e))
                old = rem.get(t)
                s = -qc * c if old is None else old - qc * c
                if s:
                    if old is None:
                        heapq.heappush(heap, (-sum(t), tuple(-x for x in t)))
                    rem[t] = s
                else:
                    rem.pop(t, None)
        return MPoly(self.table, out)

    def divides(self, other: "MPoly") -> bool:
        try:
            other.exact_div(self)
            return True
        except ExactDivisionError:
            return False

    # ------------------------------------------------------------ rendering

    def _sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        return sorted(self.terms.items(), key=lambda ec: (sum(ec[0]), ec[0]), reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = self.table.names
        chunks = []
        for e, c in self._sorted_terms():
            factors = []
            for name, ex in zip(names, e):
                if ex == 1:
                    factors.append(name)
                elif ex > 1:
                    factors.append(f"{name}^{ex}")
            coeff = str(c)
            if factors and abs(c) == 1:
                body = "*".join(factors)
                text = body if c > 0 else f"-{body}"
            elif factors:
                text = f"{coeff}*" + "*".join(factors)
            else:
                text = coeff
            chunks.append(text)
        out = chunks[0]
        for t in chunks[1:]:
            out += " - " + t[1:] if t.startswith("-") else " + " + t
        return out

    def __repr__(self) -> str:
        return f"MPoly({self})"


# ------------------------------------------------------------------- gcd ---


def _as_univariate(p: MPoly, idx: int) -> dict[int, MPoly]:
    """View p as a univariate polynomial in variable idx with MPoly coefficients."""
    out: dict[int, dict] = {}
    for e, c in p.terms.items():
        d = e[idx]
        ne = list(e)
        ne[idx] = 0
        out.setdefault(d, {})[tuple(ne)] = c
    return {d: MPoly(p.table, t) for d, t in out.items()}


def _from_univariate(table: VarTable, idx: int, coeffs: dict[int, MPoly]) -> MPoly:
    terms = {}
    for d, p in coeffs.items():
        for e, c in p.terms.items():
            ne = list(e)
            ne[idx] = d
            terms[tuple(ne)] = c
    return MPoly(table, terms)


def _uni_scale(u: dict[int, MPoly], f: MPoly) -> dict[int, MPoly]:
    return {d: c * f for d, c in u.items() if c}


def _uni_sub(a: dict[int, MPoly], b: dict[int, MPoly]) -> dict[int, MPoly]:
    out = dict(a)
    for d, c in b.items():
        s = out.get(d)
        s = c.__neg__() if s is None else s - c
        if s.is_zero():
            out.pop(d, None)
        else:
            out[d] = s
    return out


def _uni_frac_normalize(u: dict[int, MPoly]) -> dict[int, MPoly]:
    """Rescale so all Fraction coefficients are integers with joint content 1.

    The primitive PRS only uses remainders up to unit factors, so stripping
    rational content after every reduction step is free and prevents the
    exponential integer growth of raw pseudo-division.
    """
    if not u:
        return u
    num = 0
    den = 1
    for p in u.values():
        for c in p.terms.values():
            num = math.gcd(num, abs(c.numerator))
            den = math.lcm(den, c.denominator)
    if num == 1 and den == 1:
        return u
    s = Fraction(den, num)
    return {d: p.scaled(s) for d, p in u.items()}


def _pseudo_rem(a: dict[int, MPoly], b: dict[int, MPoly]) -> dict[int, MPoly]:
    db = max(b)
    lb = b[db]
    r = dict(a)
    while r and max(r) >= db:
        dr = max(r)
        lr = r[dr]
        shifted = {d + dr - db: c * lr for d, c in b.items()}
        r = _uni_frac_normalize(_uni_sub(_uni_scale(r, lb), shifted))
    return r


def _uni_content(u: dict[int, MPoly]) -> MPoly:
    it = iter(u.values())
    g = next(it)
    for c in it:
        g = gcd(g, c)
        if g.is_constant():
            break
    _, g = g.int_primitive()
    return g


def _choose_main_var(a: MPoly, b: MPoly) -> int | None:
    """Variable of smallest positive joint degree; None if both constant."""
    best = None
    best_deg = None
    for i in range(a.table.nvars):
        d = max(a.degree_in(i), b.degree_in(i))
        if d > 0 and (best_deg is None or d < best_deg):
            best, best_deg = i, d
    return best


# ---------------------------------------------------------- heuristic gcd --


def _smod(n: int, m: int) -> int:
    """Symmetric remainder in (-m/2, m/2]."""
    r = n % m
    if 2 * r > m:
        r -= m
    return r


def _eval_var_int(p: MPoly, idx: int, xi: int) -> MPoly:
    """Substitute the integer xi for variable idx (integer coefficients)."""
    out: dict[tuple[int, ...], Fraction] = {}
    for e, c in p.terms.items():
        ne = list(e)
        d = ne[idx]
        ne[idx] = 0
        key = tuple(ne)
        out[key] = out.get(key, 0) + c * xi**d
    return MPoly(p.table, out)


def _int_norm(p: MPoly) -> int:
    return max(abs(c.numerator) for c in p.terms.values())


def _divides_int(d: MPoly, p: MPoly) -> bool:
    """True when p/d is a polynomial with integer coefficients."""
    try:
        quo = p.exact_div(d)
    except ExactDivisionError:
        return False
    return all(c.denominator == 1 for c in quo.terms.values())


def _gcd_heuristic(a: MPoly, b: MPoly, used: list[int]) -> MPoly | None:
    """Evaluation/reconstruction gcd over Z for integer-coefficient operands.

    Evaluates one variable at a large integer, recursively takes the Z-gcd
    of the images, lifts it back by balanced xi-adic expansion, and accepts
    a candidate only after exact division checks over Z.  Integer content is
    preserved through the recursion: the content of an inner gcd encodes the
    digits of the outer variable.  Returns None on failure (caller falls
    back to the primitive PRS).
    """
    if not used:
        g = 0
        for c in a.terms.values():
            g = math.gcd(g, abs(c.numerator))
        for c in b.terms.values():
            g = math.gcd(g, abs(c.numerator))
        return MPoly.const(a.table, g)
    x = used[-1]
    rest = used[:-1]
    xi = 2 * min(_int_norm(a), _int_norm(b)) + 29
    deg_cap = max(a.degree_in(x), b.degree_in(x)) + 1
    for _ in range(8):
        if xi.bit_length() * deg_cap > 600_000:
            return None
        ga = _eval_var_int(a, x, xi)
        gb = _eval_var_int(b, x, xi)
        if not ga.is_zero() and not gb.is_zero():
            gamma = _gcd_heuristic(ga, gb, rest)
            if gamma is not None and not gamma.is_zero():
                digits: list[MPoly] = []
                cur = gamma
                ok = True
                while not cur.is_zero():
                    if len(digits) > deg_cap:
                        ok = False
                        break
                    dig_terms = {e: Fraction(_smod(c.numerator, xi))
                                 for e, c in cur.terms.items()}
                    digit = MPoly(cur.table, dig_terms)
                    digits.append(digit)
                    cur = MPoly(cur.table, {
                        e: Fraction((c.numerator - dig_terms[e].numerator) // xi)
                        for e, c in cur.terms.items()
                    })
                if ok and digits:
                    terms: dict[tuple[int, ...], Fraction] = {}
                    for i, digit in enumerate(digits):
                        for e, c in digit.terms.items():
                            ne = list(e)
                            ne[x] += i
                            terms[tuple(ne)] = c
                    cand = MPoly(a.table, terms)
                    if cand.leading_coeff() < 0:
                        cand = -cand
                    if (not cand.is_zero() and _divides_int(cand, a)
                            and _divides_int(cand, b)):
                        return cand
        xi = xi * 73794 // 27011
    return None


def gcd(a: MPoly, b: MPoly) -> MPoly:
    """Greatest common divisor, canonical (integer-primitive, positive lead).

    Fast paths: monomials (exponent minima) and exact-division screens.
    The workhorse is the heuristic evaluation gcd with an exact division
    check; if that fails, content-and-primitive-part recursion over a main
    variable of least degree with a primitive pseudo-remainder sequence.
    """
    _check_same_table(a, b)
    if a.is_zero():
        return b.int_primitive()[1]
    if b.is_zero():
        return a.int_primitive()[1]
    if a.is_constant() or b.is_constant():
        return MPoly.const(a.table, 1)
    if a.is_monomial() or b.is_monomial():
        mono = a if a.is_monomial() else b
        other = b if a.is_monomial() else a
        me = next(iter(mono.terms))
        shared = me
        for e in other.terms:
            shared = tuple(min(x, y) for x, y in zip(shared, e))
        return MPoly(a.table, {shared: Fraction(1)})
    # cheap fast path: one operand divides the other (frequent in reduction)
    small, large = (a, b) if len(a.terms) <= len(b.terms) else (b, a)
    if small.divides(large):
        return small.int_primitive()[1]
    pa = a.int_primitive()[1]
    pb = b.int_primitive()[1]
    used = [i for i in range(a.table.nvars)
            if pa.degree_in(i) > 0 or pb.degree_in(i) > 0]
    heu = _gcd_heuristic(pa, pb, used)
    if heu is not None:
        return heu.int_primitive()[1]
    idx = _choose_main_var(a, b)
    if idx is None:
        return MPoly.const(a.table, 1)
    ua, ub = _as_univariate(a, idx), _as_univariate(b, idx)
    if max(ua) == 0 or max(ub) == 0:
        # main variable missing from one side: gcd lives in the content
        ca = _uni_content(ua)
        cb = _uni_content(ub)
        return gcd(ca, cb)
    ca, cb = _uni_content(ua), _uni_content(ub)
    pa = {d: c.exact_div(ca) for d, c in ua.items()}
    pb = {d: c.exact_div(cb) for d, c in ub.items()}
    cont = gcd(ca, cb)
    f, g = (pa, pb) if max(pa) >= max(pb) else (pb, pa)
    while True:
        r = _pseudo_rem(f, g)
        if not r:
            result = g
            break
        if max(r) == 0:
            result = None
            break
        rc = _uni_content(r)
        r = {d: c.exact_div(rc) for d, c in r.items()}
        f, g = g, r
    if result is None:
        out = cont
    else:
        rc = _uni_content(result)
        prim = {d: c.exact_div(rc) for d, c in result.items()}
        out = cont * _from_univariate(a.table, idx, prim)
    return out.int_primitive()[1]


def lcm(a: MPoly, b: MPoly) -> MPoly:
    if a.is_zero() or b.is_zero():
        return MPoly.zero(a.table)
    g = gcd(a, b)
    return (a * b).exact_div(g).int_primitive()[1]
