"""Factorial bases for q-sequences.

A basis {B_k(n)} here is *factorial* with respect to a base sequence
beta(n): each element satisfies B_{k+1}(n) = (a(k) beta(n) + b(k)) B_k(n).
The coefficient sequences a, b are stored per section (k = m*t + r) as
rational functions of the section index m, encoded through the table's
shift variable.  Supported base sequences: beta(n) = q**(e*n) (geometric)
and beta(n) = n (arithmetic, the classical case).

Elements are evaluated on demand through the product recurrence from a
seed B_0; closed forms are never required.  The built-in families: the
q-power basis q**(e*k*n), the q-falling basis prod_i (q**n - q**i), and
the q-binomial family of Gaussian binomials [a*n + c choose k + t] in
base q**e.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from . import qseries
from .errors import NotTriangular, QBasisError
from .mpoly import MPoly, Shift, VarTable
from .ratfn import RatFn


@dataclass(frozen=True)
class BetaDescriptor:
    """How the shift E acts on the base sequence: E beta = gamma*beta + nu."""

    kind: str  # "geometric" | "arithmetic"
    exponent: int  # beta(n) = q**(exponent*n) for geometric, unused otherwise
    gamma: RatFn
    nu: RatFn

    @staticmethod
    def geometric(table: VarTable, exponent: int) -> "BetaDescriptor":
        if exponent < 1:
            raise ValueError("geometric base needs exponent >= 1")
        return BetaDescriptor(
            "geometric", exponent, RatFn.q_power(table, exponent), RatFn.zero(table)
        )

    @staticmethod
    def arithmetic(table: VarTable) -> "BetaDescriptor":
        return BetaDescriptor("arithmetic", 0, RatFn.one(table), RatFn.one(table))

    @property
    def is_geometric(self) -> bool:
        return self.kind == "geometric"


@dataclass(frozen=True)
class RootSequence:
    """Per-section new roots rho_r(m) = -b_r(m)/a_r(m) of the step factors."""

    rho: tuple[RatFn, ...]

    def at(self, k: int, t: int) -> RatFn:
        m, r = divmod(k, t)
        return self.rho[r].eval_index(m)


class FactorialBasisSpec:
    """A factorial basis in t sections over a k-domain variable table.

    a[r], b[r] are rational functions of the section counter m (through the
    table's shift variable); the element with index k = m*t + r satisfies
    B_{k+1} = (a[r](m) beta(n) + b[r](m)) B_k.  The per-instance memo table
    for element values is only read and extended under the GIL with
    immutable values, so concurrent readers always see consistent results.
    """

    def __init__(
        self,
        table: VarTable,
        beta: BetaDescriptor,
        a: Sequence[RatFn],
        b: Sequence[RatFn],
        label: str,
        seed: Callable[[int], RatFn] | None = None,
    ):
        if len(a) != len(b) or not a:
            raise ValueError("need matching non-empty a and b section lists")
        if table.shift is None:
            raise ValueError("basis table needs a shift variable")
        for r, ar in enumerate(a):
            if ar.is_zero():
                raise QBasisError(f"step coefficient a[{r}] must be nonzero")
        self.table = table
        self.beta = beta
        self.t = len(a)
        self.a = tuple(a)
        self.b = tuple(b)
        self.label = label
        self.seed = seed
        self._memo: dict[tuple[int, int], RatFn] = {}
        # per n: (steps checked so far, index of first vanishing step or None)
        self._zero_scan: dict[int, tuple[int, int | None]] = {}
        self._compat_cache: dict[str, object] = {}

    def __repr__(self) -> str:
        return f"FactorialBasisSpec({self.label}, t={self.t})"

    # ------------------------------------------------------------- structure

    def a_at(self, k: int) -> RatFn:
        m, r = divmod(k, self.t)
        return self.a[r].eval_index(m)

    def b_at(self, k: int) -> RatFn:
        m, r = divmod(k, self.t)
        return self.b[r].eval_index(m)

    def roots(self) -> RootSequence:
        return RootSequence(tuple(-bb / aa for aa, bb in zip(self.a, self.b)))

    def beta_value(self, n: int) -> RatFn:
        if self.beta.is_geometric:
            return RatFn.q_power(self.table, self.beta.exponent * n)
        return RatFn.const(self.table, n)

    def seed_value(self, n: int) -> RatFn:
        if self.seed is None:
            return RatFn.one(self.table)
        return self.seed(n)

    # ------------------------------------------------------------ evaluation

    def element(self, k: int, n: int) -> RatFn:
        """Exact value of B_k(n) via the product recurrence."""
        if k < 0:
            return RatFn.zero(self.table)
        key = (k, n)
        got = self._memo.get(key)
        if got is not None:
            return got
        if k == 0:
            val = self.seed_value(n)
        else:
            step = self.a_at(k - 1) * self.beta_value(n) + self.b_at(k - 1)
            val = self.element(k - 1, n) * step
        self._memo[key] = val
        return val

    def element_is_zero(self, k: int, n: int) -> bool:
        """Whether B_k(n) = 0, decided factor by factor without expanding.

        B_k(n) is seed(n) times a product of step values; over a field the
        product vanishes iff the seed or some step factor does.
        """
        if k < 0:
            return True
        if self.seed_value(n).is_zero():
            return True
        checked, first_zero = self._zero_scan.get(n, (0, None))
        if first_zero is not None and first_zero < k:
            return True
        while checked < k:
            beta_n = self.beta_value(n)
            step = self.a_at(checked) * beta_n + self.b_at(checked)
            if step.is_zero():
                first_zero = checked
                self._zero_scan[n] = (checked + 1, first_zero)
                return first_zero < k
            checked += 1
            self._zero_scan[n] = (checked, None)
        return False

    def leading_index(self, k: int, bound: int | None = None) -> int | None:
        """Least n with B_k(n) != 0, scanned up to `bound` (default k + 8)."""
        if bound is None:
            bound = k + 8
        for n in range(bound + 1):
            if not self.element_is_zero(k, n):
                return n
        return None

    def strictly_triangular_prefix(self, count: int, step: int = 1, offset: int = 0) -> list[int]:
        """Leading indices for k = offset, offset+step, ...; must be strictly increasing."""
        lead = []
        last = -1
        for j in range(count):
            k = offset + j * step
            n = self.leading_index(k)
            if n is None or n <= last:
                raise NotTriangular(
                    f"basis {self.label}: leading index at k={k} is {n}, "
                    f"previous {last}; expansion not triangular"
                )
            lead.append(n)
            last = n
        return lead


# ------------------------------------------------------------ constructors --


def ktable(params: Sequence[str] = (), stride: int = 1, arithmetic: bool = False) -> VarTable:
    """Coefficient-domain table: shift variable qk (geometric) or k (arithmetic)."""
    if arithmetic:
        return VarTable(params=tuple(params), shift_name="k", shift=Shift.arithmetic())
    return VarTable(params=tuple(params), shift_name="qk", shift=Shift.geometric(stride))


def ntable(params: Sequence[str] = (), arithmetic: bool = False) -> VarTable:
    """Sequence-domain table: shift variable qn = q**n (or n)."""
    if arithmetic:
        return VarTable(params=tuple(params), shift_name="n", shift=Shift.arithmetic())
    return VarTable(params=tuple(params), shift_name="qn", shift=Shift.geometric(1))


def q_power_basis(e: int, params: Sequence[str] = ()) -> FactorialBasisSpec:
    """The basis {q**(e*k*n)}_k: one section, a = 1, b = 0, beta = q**(e*n)."""
    if e < 1:
        raise ValueError("q-power basis needs e >= 1")
    table = ktable(params, stride=e)
    return FactorialBasisSpec(
        table,
        BetaDescriptor.geometric(table, e),
        [RatFn.one(table)],
        [RatFn.zero(table)],
        label=f"P({e})",
    )


def q_falling_basis(params: Sequence[str] = ()) -> FactorialBasisSpec:
    """The basis f_k(n) = prod_{i<k} (q**n - q**i): a = 1, b = -q**k."""
    table = ktable(params, stride=1)
    w = RatFn.var(table, table.shift_name)
    return FactorialBasisSpec(
        table,
        BetaDescriptor.geometric(table, 1),
        [RatFn.one(table)],
        [-w],
        label="F",
    )


def q_binomial_basis(
    a: int, c: int, t: int, e: int, params: Sequence[str] = ()
) -> FactorialBasisSpec:
    """Gaussian-binomial family B_k(n) = [a*n + c choose k + t] in base q**e.

    Factorial with respect to beta(n) = q**(a*e*n); the step coefficients
    come from the binomial quotient identity, and the element seed is
    B_0(n) = [a*n + c choose t].
    """
    if a < 1 or e < 1:
        raise ValueError("q-binomial basis needs a >= 1 and e >= 1")
    if t < 0:
        raise QBasisError("offset t < 0 degenerates the step denominators")
    table = ktable(params, stride=e)
    w = RatFn.var(table, table.shift_name)
    den = 1 - RatFn.q_power(table, e * (t + 1)) * w
    a_sym = -RatFn.q_power(table, e * (c - t)) / (w * den)
    b_sym = RatFn.one(table) / den
    seed = None
    if t != 0 or c != 0:
        def seed(n: int, _table=table, _a=a, _c=c, _t=t, _e=e) -> RatFn:
            return qseries.qbinom(_table, _a * n + _c, _t, _e)
    return FactorialBasisSpec(
        table,
        BetaDescriptor.geometric(table, a * e),
        [a_sym],
        [b_sym],
        label=f"C({a},{c};{t};{e})",
        seed=seed,
    )


def basis_from_roots(
    table: VarTable,
    beta: BetaDescriptor,
    roots: Sequence[RatFn],
    lead_coeffs: Sequence[RatFn],
    label: str = "custom",
) -> FactorialBasisSpec:
    """Basis defined by its root sequence and leading-coefficient sequence.

    lead_coeffs[r](m) is the leading coefficient (in beta) of the element
    with index k = m*t + r; the step data follows from a(k) = c(k+1)/c(k)
    and b(k) = -rho(k) a(k).
    """
    if len(roots) != len(lead_coeffs) or not roots:
        raise ValueError("need matching non-empty roots and lead_coeffs")
    t = len(roots)
    a = []
    b = []
    for r in range(t):
        if r < t - 1:
            ar = lead_coeffs[r + 1] / lead_coeffs[r]
        else:
            ar = lead_coeffs[0].shifted(1) / lead_coeffs[t - 1]
        a.append(ar)
        b.append(-roots[r] * ar)
    return FactorialBasisSpec(table, beta, a, b, label=label)
