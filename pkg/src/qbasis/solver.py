"""End-to-end pipeline from an annihilating operator to certified
coefficient recurrences and closed forms.

The steps, each exact:

  1. expand_in_basis: triangular solve for expansion coefficients; this is
     the brute-force oracle everything else is checked against.
  2. transformed_annihilator: image of the operator under the coefficient
     map, with section streams uncoupled by least-common-left-multiple
     elimination when more than one section is requested.
  3. guess_minimal: lowest-order/degree operator annihilating given terms,
     by exact nullspace computation on an ansatz.
  4. certify: prove a guessed operator against a proven one through the
     LCLM residual argument (if l = u p = w g, then the residual s = g c of
     a p-annihilated sequence satisfies w s = 0, so finitely many zero
     checks plus a nonvanishing leading coefficient force s = 0).
  5. first_order_closed_form: hypergeometric product for order-one
     operators, with pattern matching for power / q-quadratic / Pochhammer
     shapes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import linalg
from .bases import FactorialBasisSpec
from .compat import compile_expression, n_table_for
from .errors import (
    BudgetExceeded,
    InconsistentExpansion,
    InsufficientTerms,
    MissingInitial,
    NotTriangular,
    QBasisError,
)
from .mpoly import MPoly, VarTable
from .ore import OreMat, OreOp, gcrd, lclm, zero_indices
from .qseries import pochhammer
from .ratfn import RatFn


# ------------------------------------------------------------ generation ---


@dataclass
class SeqGen:
    """Lazy exact sequence from an annihilator plus initial values.

    The annihilator must have trailing exponent 0; its relations are
    asserted for anchor indices k >= valid_from.  Initial values must cover
    the order, the validity offset, and every index where the leading
    coefficient vanishes.
    """

    annihilator: OreOp
    initials: list[RatFn]
    valid_from: int = 0
    singular: list[int] = field(default_factory=list)

    def __post_init__(self):
        op = self.annihilator
        if op.is_zero():
            raise QBasisError("zero operator does not define a sequence")
        if op.min_exp != 0:
            raise QBasisError("sequence annihilator needs trailing exponent 0")
        self.singular = op.leading_nonvanishing(self.valid_from)
        d = op.order()
        need = d + self.valid_from
        if self.singular:
            need = max(need, max(self.singular) + d + 1)
        if len(self.initials) < need:
            raise MissingInitial(len(self.initials))

    def order(self) -> int:
        return self.annihilator.order()


def unroll(gen: SeqGen, count: int) -> list[RatFn]:
    """First `count` terms; supplied initials are consistency-checked."""
    op = gen.annihilator
    table = op.table
    d = op.order()
    terms = [t.migrated(table) for t in gen.initials[:count]]
    # consistency of the provided window
    for k in range(gen.valid_from, len(terms) - d):
        acc = RatFn.zero(table)
        for i, c in op.coeffs.items():
            acc = acc + c.eval_index(k) * terms[k + i]
        if not acc.is_zero():
            raise InconsistentExpansion(
                k, f"initial values contradict the recurrence at index {k}"
            )
    lead = op.coeff(d)
    while len(terms) < count:
        j = len(terms)
        k = j - d
        if k < gen.valid_from or k in gen.singular:
            raise MissingInitial(j)
        lv = lead.eval_index(k)
        acc = RatFn.zero(table)
        for i, c in op.coeffs.items():
            if i != d:
                acc = acc + c.eval_index(k) * terms[k + i]
        terms.append(-acc / lv)
    return terms


# ------------------------------------------------------------- expansion ---


def expand_in_basis(
    y_terms: Sequence[RatFn],
    basis: FactorialBasisSpec,
    count: int,
    offset: int = 0,
    step: int = 1,
) -> list[RatFn]:
    """First `count` coefficients of y(n) = sum_j c_j B_{offset + j*step}(n).

    Solves the triangular system row by row in n; rows that introduce no
    new unknown are exact consistency checks, and a mismatch raises
    InconsistentExpansion (this is the negative-control mechanism for
    single-section expansions).
    """
    table = basis.table
    terms = [y.migrated(table) for y in y_terms]
    indices = [offset + j * step for j in range(count)]
    leads = basis.strictly_triangular_prefix(count, step=step, offset=offset)
    if len(terms) < leads[-1] + 1:
        raise InsufficientTerms(
            leads[-1] + 1,
            f"need y(0..{leads[-1]}) to determine {count} coefficients, "
            f"got {len(terms)} values",
        )
    next_lead = basis.leading_index(offset + count * step)
    coeffs: list[RatFn] = []
    by_lead = {n: j for j, n in enumerate(leads)}
    for n in range(len(terms)):
        if next_lead is not None and n >= next_lead and n > leads[-1]:
            break  # rows now involve coefficients beyond `count`
        acc = RatFn.zero(table)
        for j in range(len(coeffs)):
            el = basis.element(indices[j], n)
            if not el.is_zero():
                acc = acc + coeffs[j] * el
        residual = terms[n] - acc
        j_new = by_lead.get(n)
        if j_new is not None and j_new == len(coeffs):
            coeffs.append(residual / basis.element(indices[j_new], n))
        elif not residual.is_zero():
            raise InconsistentExpansion(
                n, f"value at n={n} is inconsistent with the expansion"
            )
        if len(coeffs) == count and (next_lead is None or n + 1 >= next_lead):
            break
    if len(coeffs) < count:
        raise InsufficientTerms(leads[-1] + 1)
    return coeffs


def initial_coefficients(
    y_initials: Sequence[RatFn],
    basis: FactorialBasisSpec,
    upto: int,
    offset: int = 0,
    step: int = 1,
) -> list[RatFn]:
    """Coefficients c(0..upto) from explicitly given y values."""
    return expand_in_basis(y_initials, basis, upto + 1, offset=offset, step=step)


# ------------------------------------------------- transformed annihilator --


def _laurent_normalize(op: OreOp) -> tuple[OreOp, int]:
    """Left-multiply by a power of S so the trailing exponent is >= 0.

    Relations derived with zero-extended coefficient streams hold at every
    index >= 0, so shifting them upward stays sound; the second component
    reports how many low-index instances were dropped.
    """
    if op.is_zero() or op.min_exp >= 0:
        return op, 0
    m = -op.min_exp
    return OreOp.shift(op.table, m) * op, m


def _eliminate_stream(rows: list[list[OreOp]], target: int, max_order: int) -> OreOp:
    """Operator annihilating the target stream, from the coupled system.

    Equations sum_r L[j][r] c_r = 0 are combined by LCLM eliminations of
    the non-target streams; any polynomial left-combination of valid
    equations remains valid at every index.
    """
    table = rows[0][0].table
    eqs = [list(r) for r in rows]
    t = len(rows)
    for r in range(t):
        if r == target:
            continue
        keep = [eq for eq in eqs if eq[r].is_zero()]
        active = [eq for eq in eqs if not eq[r].is_zero()]
        for i, eq in enumerate(active):
            norm, _ = _laurent_normalize_row(eq)
            active[i] = norm
        if len(active) > 1:
            pivot = min(active, key=lambda eq: eq[r].order())
            for eq in active:
                if eq is pivot:
                    continue
                l, u, w = lclm(pivot[r], eq[r], max_order=max_order)
                combo = [u * pivot[c] - w * eq[c] for c in range(t)]
                if not combo[r].is_zero():
                    raise ArithmeticError("elimination failed to cancel a stream")
                keep.append(combo)
        eqs = keep
        if not eqs:
            raise BudgetExceeded(
                f"stream elimination exhausted the equations for target {target}"
            )
    ops = [eq[target] for eq in eqs if not eq[target].is_zero()]
    if not ops:
        raise BudgetExceeded("no constraint remains on the target stream")
    result = ops[0]
    for op in ops[1:]:
        result = gcrd(*(x for x in (_laurent_normalize(result)[0],
                                    _laurent_normalize(op)[0])))
    return result


def _laurent_normalize_row(eq: list[OreOp]) -> tuple[list[OreOp], int]:
    m = 0
    for op in eq:
        if not op.is_zero():
            m = max(m, -min(0, op.min_exp))
    if m == 0:
        return eq, 0
    table = eq[0].table
    s = OreOp.shift(table, m)
    return [s * op if not op.is_zero() else op for op in eq], m


def transformed_annihilator(
    basis: FactorialBasisSpec,
    op_n: OreOp,
    sections: int = 1,
    section: int = 0,
    max_order: int | None = None,
    oracle_terms: Sequence[RatFn] | None = None,
) -> tuple[OreOp, int]:
    """Annihilator of the coefficient stream c(k*sections + section).

    Returns (operator, dropped) where the operator has trailing exponent 0
    and `dropped` counts the low-index relation instances lost to Laurent
    normalisation (its relations are asserted from that anchor on).  When
    oracle terms for the stream are supplied, the operator is applied to
    them and must annihilate exactly.
    """
    if not (0 <= section < sections):
        raise QBasisError("section index out of range")
    image = compile_expression(basis, op_n, sections)
    if sections == 1:
        raw = image
    else:
        raw = _eliminate_stream(image.rows, section,
                                max_order or 4 * sections + op_n.order() * sections)
    if raw.is_zero():
        raise QBasisError("operator image is zero; nothing to transform")
    normalized, dropped = _laurent_normalize(raw)
    result = normalized.primitive()
    if oracle_terms is not None:
        applied = result.apply_to_terms(list(oracle_terms), start=0)
        window = result.applied_window(len(oracle_terms))
        for k, val in zip(range(window[0], window[1]), applied):
            if k >= dropped and not val.is_zero():
                raise QBasisError(
                    f"transformed operator fails on oracle terms at k={k}"
                )
    return result, dropped


# ---------------------------------------------------------------- guessing --


@dataclass(frozen=True)
class GuessConfig:
    max_order: int = 4
    max_degree: int = 8
    terms_used: int = 60
    margin: int = 10

    def __post_init__(self):
        need = (self.max_order + 1) * (self.max_degree + 2) + self.margin
        if self.terms_used < need:
            raise QBasisError(
                f"terms_used={self.terms_used} below the ansatz requirement {need}"
            )


def guess_minimal(
    terms: Sequence[RatFn], table: VarTable, cfg: GuessConfig | None = None
) -> OreOp | None:
    """Lowest-(order, degree) operator annihilating all given terms, or None.

    The ansatz sum_{i,j} c_{ij} w^j S^i is solved exactly on a window of
    the terms and every candidate is re-checked against the full list.
    Ties are broken by support size, then by a deterministic coefficient
    order.
    """
    cfg = cfg or GuessConfig()
    terms = [t.migrated(table) for t in terms]
    if all(t.is_zero() for t in terms):
        return OreOp.one(table)
    geo = table.shift.is_geometric
    stride = table.shift.stride if geo else None

    def wval(k: int) -> RatFn:
        return (RatFn.q_power(table, stride * k) if geo
                else RatFn.const(table, k))

    for order in range(cfg.max_order + 1):
        for degree in range(cfg.max_degree + 1):
            unknowns = (order + 1) * (degree + 1)
            rows_avail = len(terms) - order
            rows_used = min(rows_avail, unknowns + cfg.margin)
            if rows_used < unknowns:
                continue
            matrix = []
            for k in range(rows_used):
                wk = wval(k)
                wpow = [RatFn.one(table)]
                for _ in range(degree):
                    wpow.append(wpow[-1] * wk)
                row = []
                for i in range(order + 1):
                    for j in range(degree + 1):
                        row.append(wpow[j] * terms[k + i])
                matrix.append(row)
            vecs = linalg.nullspace(matrix, table)
            candidates = []
            w = RatFn.var(table, table.shift_name) if table.shift_name else None
            for vec in vecs:
                coeffs = {}
                for i in range(order + 1):
                    c = RatFn.zero(table)
                    for j in range(degree + 1):
                        x = vec[i * (degree + 1) + j]
                        if not x.is_zero():
                            c = c + x * w**j
                    if not c.is_zero():
                        coeffs[i] = c
                if not coeffs:
                    continue
                cand = OreOp(table, coeffs)
                applied = cand.apply_to_terms(terms)
                if all(v.is_zero() for v in applied):
                    candidates.append(cand)
            if candidates:
                def tie_key(op: OreOp):
                    monic = op.monic()
                    vec_key = tuple(
                        monic.coeff(i).sort_key()
                        for i in range(monic.max_exp + 1)
                    )
                    return (len(op.coeffs), vec_key)

                best = min(candidates, key=tie_key)
                return best.primitive()
    return None


# ----------------------------------------------------------- certification --


@dataclass
class Certificate:
    """Proof record that `guessed` annihilates the sequence of `proven`.

    With l = u*proven = w*guessed, the residual s = guessed(sequence)
    satisfies w s = 0; s vanishes identically once it vanishes on the
    verified window and the leading coefficient of w stays nonzero beyond
    the checked singular indices.
    """

    proven: OreOp
    guessed: OreOp
    lclm_op: OreOp
    left_witness: OreOp
    right_witness: OreOp
    residual_checks: int
    leading_ok: bool
    valid: bool
    witness_index: int | None = None


def certify(
    proven: OreOp,
    proven_initials: Sequence[RatFn],
    guessed: OreOp,
    valid_from: int = 0,
) -> Certificate:
    """LCLM-based certificate; see Certificate for the underlying argument."""
    table = proven.table
    p, p_shift = proven.shift_right_factor()
    g, g_shift = guessed.shift_right_factor()
    l, u, w = lclm(p, g)
    if not (u * p == w * g and u * p == l):
        raise ArithmeticError("lclm witnesses failed re-verification")
    singular = w.leading_nonvanishing(0)
    jmax = w.order() + (max(singular) + 1 if singular else 0)
    need = jmax + guessed.order() + max(g_shift, 0) + 1
    gen = SeqGen(p, list(proven_initials), valid_from=valid_from + p_shift)
    seq = unroll(gen, need)
    residual = guessed.apply_to_terms(seq)
    window = guessed.applied_window(len(seq))
    checks = 0
    witness = None
    for k, val in zip(range(window[0], window[1]), residual):
        if k > jmax:
            break
        checks += 1
        if not val.is_zero():
            witness = k
            break
    valid = witness is None and checks >= jmax + 1 - window[0]
    return Certificate(
        proven=proven,
        guessed=guessed,
        lclm_op=l,
        left_witness=u,
        right_witness=w,
        residual_checks=checks,
        leading_ok=True,
        valid=valid,
        witness_index=witness,
    )


# ------------------------------------------------------------ closed forms --


@dataclass(frozen=True)
class PochFactor:
    base: RatFn          # (base; q**step-exponent)_k, inverted when power = -1
    step: int
    power: int


@dataclass
class ClosedForm:
    """Hypergeometric description c(k) = initial * prod_{j<k} ratio(j).

    When the ratio matches const * w**d * prod (1 - b w**d'), the structured
    fields hold the equivalent closed form
        base**k * q**(quad2 k^2 + quad1 k) * prod Pochhammer factors,
    with quad coefficients as exact fractions.  Unmatched ratios keep the
    product form only.
    """

    initial: RatFn
    ratio: RatFn
    matched: bool
    base: RatFn | None = None
    quad2: Fraction | None = None
    quad1: Fraction | None = None
    poch: tuple[PochFactor, ...] = ()

    def term(self, k: int) -> RatFn:
        table = self.initial.table
        if self.matched:
            e2, e1 = self.quad2 * k * k, self.quad1 * k
            e = e2 + e1
            if e.denominator != 1:
                raise ArithmeticError("non-integral q-exponent in closed form")
            out = self.initial * self.base**k * RatFn.q_power(table, int(e))
            for f in self.poch:
                p = pochhammer(f.base, f.step, k)
                out = out * (p if f.power == 1 else p.inverse())
            return out
        out = self.initial
        for j in range(k):
            out = out * self.ratio.eval_index(j)
        return out

    def describe(self) -> str:
        if not self.matched:
            return f"prod_{{j<k}} ({self.ratio}) from {self.initial}"
        bits = []
        if not self.base == RatFn.one(self.base.table):
            bits.append(f"({self.base})^k")
        if self.quad2 or self.quad1:
            quad = []
            if self.quad2:
                quad.append(f"{self.quad2}*k^2" if self.quad2 != 1 else "k^2")
            if self.quad1:
                sign = "+" if self.quad1 > 0 else "-"
                mag = abs(self.quad1)
                quad.append(f" {sign} {mag}*k" if mag != 1 else f" {sign} k")
            bits.append(f"q^({''.join(quad)})")
        for f in self.poch:
            txt = f"({f.base}; q^{f.step})_k"
            bits.append(txt if f.power == 1 else f"1/{txt}")
        body = " * ".join(bits) if bits else "1"
        if self.initial == RatFn.one(self.initial.table):
            return body
        return f"({self.initial}) * {body}"


def _monomial_split(p: MPoly) -> tuple[tuple[int, ...], MPoly]:
    """Factor out the exponent-min monomial: p = mono * rest."""
    mins = None
    for e in p.terms:
        mins = e if mins is None else tuple(min(x, y) for x, y in zip(mins, e))
    mono = MPoly(p.table, {mins: Fraction(1)})
    return mins, p.exact_div(mono)


def _match_binomial_product(
    p: MPoly, vi: int
) -> tuple[RatFn, list[tuple[RatFn, int]]] | None:
    """Write p as scalar * prod (1 - b w**d) by greedy extraction.

    Returns (scalar, factors) or None when the greedy peel (lowest positive
    w-level first) fails; products of same-degree binomials are out of its
    reach, which the caller treats as an unmatched ratio.
    """
    table = p.table
    w = RatFn.var(table, table.shift_name)
    out: list[tuple[RatFn, int]] = []
    cur = RatFn.from_mpoly(p)
    for _ in range(40):
        num = cur.num
        levels = sorted({e[vi] for e in num.terms})
        if levels == [0]:
            return cur, out
        if levels[0] != 0:
            return None
        d = levels[1]
        c0 = MPoly(table, {e: c for e, c in num.terms.items() if e[vi] == 0})
        cd_terms = {}
        for e, c in num.terms.items():
            if e[vi] == d:
                ne = list(e)
                ne[vi] = 0
                cd_terms[tuple(ne)] = c
        b = -RatFn.from_mpoly(MPoly(table, cd_terms)) / RatFn.from_mpoly(c0)
        quotient = cur / (1 - b * w**d)
        if quotient.den.degree_in(vi) > 0:
            return None
        out.append((b, d))
        cur = quotient
    return None


def first_order_closed_form(op: OreOp, initial: RatFn) -> ClosedForm:
    """Closed form for c defined by an order-one operator and c(0).

    op must be c1(w) S + c0(w); the term ratio is r = -c0/c1 and
    c(k) = initial * prod_{j<k} r(j).  The matcher recognises monomial
    ratios times products of binomials (1 - b w**d) on either side and
    self-checks the structured form against the raw product before
    returning it.
    """
    if op.is_zero() or op.order() != 1:
        raise QBasisError("closed form needs an operator of order exactly 1")
    core, _ = op.shift_right_factor()
    table = op.table
    ratio = -core.coeff(0) / core.coeff(1)
    initial = initial.migrated(table)
    if not ratio.uses_shift_var():
        return ClosedForm(initial, ratio, True, base=ratio,
                          quad2=Fraction(0), quad1=Fraction(0))
    if not table.shift.is_geometric:
        return ClosedForm(initial, ratio, False)
    vi = table.shift_index
    qi = table.q_index
    stride = table.shift.stride
    num_mins, num_rest = _monomial_split(ratio.num)
    den_mins, den_rest = _monomial_split(ratio.den)
    num_match = _match_binomial_product(num_rest, vi)
    den_match = _match_binomial_product(den_rest, vi)
    if num_match is None or den_match is None:
        return ClosedForm(initial, ratio, False)
    num_scalar, num_factors = num_match
    den_scalar, den_factors = den_match
    d = num_mins[vi] - den_mins[vi]
    qshift = num_mins[qi] - den_mins[qi]
    base = num_scalar / den_scalar
    for name in table.names:
        if name in (table.shift_name, "q"):
            continue
        i = table.index_of(name)
        e = num_mins[i] - den_mins[i]
        if e > 0:
            base = base * RatFn.var(table, name) ** e
        elif e < 0:
            base = base / RatFn.var(table, name) ** (-e)
    quad2 = Fraction(stride * d, 2)
    quad1 = Fraction(qshift) - Fraction(stride * d, 2)
    poch = tuple(
        [PochFactor(base=b, step=stride * dd, power=1) for b, dd in num_factors]
        + [PochFactor(base=b, step=stride * dd, power=-1) for b, dd in den_factors]
    )
    form = ClosedForm(initial, ratio, True, base=base, quad2=quad2,
                      quad1=quad1, poch=poch)
    # self-check the match on a few indices before returning it
    probe = initial
    for j in range(6):
        if form.term(j) != probe:
            return ClosedForm(initial, ratio, False)
        probe = probe * ratio.eval_index(j)
    return form


# ------------------------------------------------------- identity checking --


@dataclass(frozen=True)
class IdentityReport:
    ok: bool
    checks: tuple[tuple[int, bool], ...]

    def first_failure(self) -> int | None:
        for idx, good in self.checks:
            if not good:
                return idx
        return None


def verify_identity(
    lhs_terms: Sequence[RatFn], rhs_terms: Sequence[RatFn], upto: int
) -> IdentityReport:
    """Exact index-by-index comparison of two term lists."""
    checks = []
    ok = True
    for i in range(min(upto + 1, len(lhs_terms), len(rhs_terms))):
        good = lhs_terms[i] == rhs_terms[i]
        checks.append((i, good))
        ok = ok and good
    return IdentityReport(ok, tuple(checks))
