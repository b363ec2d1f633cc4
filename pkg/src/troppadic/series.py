"""Restricted power series with certified tail bounds.

A series is stored as finitely many terms up to a total-degree cutoff plus
a linear *tail bound* certifying ``v(a_I) >= slope*|I| + offset`` for every
exponent vector beyond the cutoff.  An offset of +Infinity is the exact
witness that no terms exist beyond the cutoff (polynomials).  The domain is
a product of valuation half-lines ``[r_i, oo)``; ``None`` stands for an
unbounded coordinate (all of R), which forces an empty tail.

Everything downstream (tropicalization, root counting, effective bounds)
rests on the operations here, so every transform recomputes a *sound* tail
bound and every certification failure raises instead of degrading.

Weierstrass division is a successive-approximation contraction in the
(p, X')-filtration: with ``f = c*Y^d + E`` (c the unit coefficient of the
regularity order), iterate ``Q <- c^{-1} * high_part(g - Q*E)``.  The
iteration contracts exactly when every pure-Y coefficient of ``E`` has
positive valuation; that condition (plus the matching tail certificate) is
checked up front and its failure raises BudgetExceeded, because without it
no restricted quotient exists (e.g. dividing by ``Y + Y^2``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BudgetExceeded,
    DomainViolation,
    NotRegular,
    PrecisionExhausted,
    ZeroSeries,
)
from .padic import INF, PadicScaled, val_min

F = Fraction


# ---------------------------------------------------------------------------
# tail bounds


@dataclass(frozen=True)
class TailBound:
    """Certifies v(a_I) >= slope*|I| + offset for every |I| > cutoff."""

    cutoff: int
    slope: Fraction
    offset: object  # Fraction, or INF for "no terms beyond the cutoff"

    def __post_init__(self):
        if self.cutoff < 0:
            raise ValueError("cutoff must be >= 0")

    @property
    def is_empty(self) -> bool:
        return self.offset is INF

    def floor_at(self, nu_min):
        """Certified infimum of v(a_I) + <I, nu> over the tail,
        for any nu with all coordinates >= nu_min.

        Returns INF for an empty tail, None when the infimum is -oo
        (uncertifiable).
        """
        if self.is_empty:
            return INF
        if nu_min is INF:
            return INF
        rate = self.slope + nu_min
        if rate < 0:
            return None
        if rate == 0:
            return self.offset
        return (self.cutoff + 1) * rate + self.offset

    @staticmethod
    def empty(cutoff: int = 0) -> "TailBound":
        return TailBound(cutoff, F(1), INF)


def _merge_tail_pieces(cutoff, pieces, fold_points):
    """Build one TailBound(cutoff, c, b) dominating several linear pieces
    plus finitely many (degree, valuation) point constraints."""
    pieces = [pc for pc in pieces if pc[1] is not INF]
    if not pieces and not fold_points:
        return TailBound.empty(cutoff)
    if pieces:
        c = min(s for s, _ in pieces)
    else:
        c = F(1)
    b = INF
    for s, o in pieces:
        b = val_min(b, o + (s - c) * (cutoff + 1))
    for deg, val in fold_points:
        b = val_min(b, val - c * deg)
    if b is INF:
        return TailBound.empty(cutoff)
    return TailBound(cutoff, c, b)


# ---------------------------------------------------------------------------
# the series type


def _coerce_coeff(p, c):
    if isinstance(c, PadicScaled):
        if c.p != p:
            raise ValueError("coefficient prime mismatch")
        return c
    return PadicScaled.exact(p, c)


class RestrictedSeries:
    """Finitely many certified terms plus a tail bound, over a domain."""

    __slots__ = ("p", "nvars", "terms", "tail", "domain")

    def __init__(self, p, nvars, terms, tail=None, domain=None):
        self.p = p
        self.nvars = nvars
        clean = {}
        maxdeg = 0
        for exps, c in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps}")
            c = _coerce_coeff(p, c)
            if c.is_zero():
                continue
            clean[exps] = c
            maxdeg = max(maxdeg, sum(exps))
        self.terms = clean
        if domain is None:
            domain = tuple(F(0) for _ in range(nvars))
        else:
            domain = tuple(None if r is None else F(r) for r in domain)
            if len(domain) != nvars:
                raise ValueError("domain length mismatch")
        self.domain = domain
        if tail is None:
            tail = TailBound.empty(maxdeg)
        if tail.is_empty and tail.cutoff < maxdeg:
            tail = TailBound.empty(maxdeg)
        if maxdeg > tail.cutoff:
            raise ValueError("stored term beyond the tail cutoff")
        if not tail.is_empty:
            rmin = self._domain_min()
            if rmin is None or tail.slope + rmin <= 0:
                raise DomainViolation(
                    "tail bound does not certify convergence on the domain"
                )
        self.tail = tail

    def _domain_min(self):
        if any(r is None for r in self.domain):
            return None
        if not self.domain:
            return F(0)
        return min(self.domain)

    # -- constructors --

    @classmethod
    def from_terms(cls, p, nvars, mapping, domain=None, tail=None):
        return cls(p, nvars, dict(mapping), tail=tail, domain=domain)

    @classmethod
    def constant(cls, p, value, nvars=1, domain=None):
        return cls(p, nvars, {(0,) * nvars: value}, domain=domain)

    @classmethod
    def variable(cls, p, i, nvars, domain=None):
        exps = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(p, nvars, {exps: 1}, domain=domain)

    # -- queries --

    def coeff(self, exps) -> PadicScaled:
        return self.terms.get(tuple(exps), PadicScaled.zero(self.p))

    def support(self):
        return sorted(self.terms)

    def max_degree(self) -> int:
        return max((sum(i) for i in self.terms), default=0)

    def is_certified_zero(self) -> bool:
        return not self.terms and self.tail.is_empty

    def coeff_valuations(self):
        return {i: c.valuation() for i, c in self.terms.items()}

    def gauss_valuation(self):
        """min of v(a_I) over all coefficients, tail included."""
        m = val_min(*(c.valuation() for c in self.terms.values()))
        t = self.tail.floor_at(F(0))
        if t is None:
            raise PrecisionExhausted("tail valuation unbounded below")
        return val_min(m, t)

    def axis_coeffs(self, axis=None):
        """Coefficients of pure powers of one variable: {j: a_(j on axis)}."""
        if axis is None:
            axis = self.nvars - 1
        out = {}
        for exps, c in self.terms.items():
            if all(e == 0 for k, e in enumerate(exps) if k != axis):
                out[exps[axis]] = c
        return out

    def __eq__(self, other):
        if not isinstance(other, RestrictedSeries):
            return NotImplemented
        return (
            self.p == other.p
            and self.nvars == other.nvars
            and self.terms == other.terms
            and self.tail == other.tail
            and self.domain == other.domain
        )

    def __repr__(self):
        body = " + ".join(
            f"{c!r}*X^{list(i)}" for i, c in sorted(self.terms.items())
        ) or "0"
        return f"RestrictedSeries({body}; p={self.p}, tail={self.tail})"

    # -- ring operations --

    def _common_domain(self, other):
        if self.p != other.p or self.nvars != other.nvars:
            raise ValueError("series are not over the same ring")
        dom = []
        for a, b in zip(self.domain, other.domain):
            if a is None:
                dom.append(b)
            elif b is None:
                dom.append(a)
            else:
                dom.append(max(a, b))
        return tuple(dom)

    def __neg__(self):
        return RestrictedSeries(
            self.p,
            self.nvars,
            {i: -c for i, c in self.terms.items()},
            tail=self.tail,
            domain=self.domain,
        )

    def __add__(self, other):
        dom = self._common_domain(other)
        ta, tb = self.tail, other.tail
        # a coefficient is fully known exactly where both sides are, so only
        # sides with genuine tails constrain the cutoff
        live = [t.cutoff for t in (ta, tb) if not t.is_empty]
        cutoff = min(live) if live else max(ta.cutoff, tb.cutoff)
        merged = dict(self.terms)
        for i, c in other.terms.items():
            cur = merged.get(i)
            merged[i] = c if cur is None else cur + c
        kept, folds = {}, []
        for i, c in merged.items():
            if c.is_zero():
                continue
            if sum(i) > cutoff:
                folds.append((sum(i), c.valuation()))
            else:
                kept[i] = c
        tail = _merge_tail_pieces(
            cutoff, [(ta.slope, ta.offset), (tb.slope, tb.offset)], folds
        )
        return RestrictedSeries(self.p, self.nvars, kept, tail=tail, domain=dom)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        dom = self._common_domain(other)
        ta, tb = self.tail, other.tail
        # unknown contributions to the coefficient at K need a tail factor,
        # so they first appear above cutoff_tail + mindeg(other side)
        mf = min((sum(i) for i in self.terms), default=None)
        mg = min((sum(j) for j in other.terms), default=None)
        bounds = []
        if not ta.is_empty:
            bounds.append(ta.cutoff + tb.cutoff if not tb.is_empty else None)
            if mg is not None:
                bounds.append(ta.cutoff + mg)
        if not tb.is_empty and mf is not None:
            bounds.append(tb.cutoff + mf)
        bounds = [b for b in bounds if b is not None]
        cutoff = min(bounds) if bounds else ta.cutoff + tb.cutoff
        prod = {}
        for i, a in self.terms.items():
            for j, b in other.terms.items():
                k = tuple(x + y for x, y in zip(i, j))
                c = a * b
                cur = prod.get(k)
                prod[k] = c if cur is None else cur + c
        kept, folds = {}, []
        for k, c in prod.items():
            if c.is_zero():
                continue
            if sum(k) > cutoff:
                folds.append((sum(k), c.valuation()))
            else:
                kept[k] = c
        pieces = []
        if not tb.is_empty:
            h = val_min(*(a.valuation() - tb.slope * sum(i) for i, a in self.terms.items()))
            if h is not INF:
                pieces.append((tb.slope, tb.offset + h))
        if not ta.is_empty:
            h = val_min(*(b.valuation() - ta.slope * sum(j) for j, b in other.terms.items()))
            if h is not INF:
                pieces.append((ta.slope, ta.offset + h))
        if not ta.is_empty and not tb.is_empty:
            pieces.append((min(ta.slope, tb.slope), ta.offset + tb.offset))
        tail = _merge_tail_pieces(cutoff, pieces, folds)
        return RestrictedSeries(self.p, self.nvars, kept, tail=tail, domain=dom)

    def scalar_mul(self, c) -> "RestrictedSeries":
        c = _coerce_coeff(self.p, c)
        if c.is_zero():
            return RestrictedSeries(self.p, self.nvars, {}, domain=self.domain)
        tail = self.tail
        if not tail.is_empty:
            tail = TailBound(tail.cutoff, tail.slope, tail.offset + c.valuation())
        return RestrictedSeries(
            self.p,
            self.nvars,
            {i: a * c for i, a in self.terms.items()},
            tail=tail,
            domain=self.domain,
        )

    def embed(self, nvars_new, var_map) -> "RestrictedSeries":
        """Reindex variables: old variable k becomes var_map[k]."""
        if len(set(var_map)) != self.nvars:
            raise ValueError("variable map must be injective")
        terms = {}
        for i, c in self.terms.items():
            exps = [0] * nvars_new
            for k, e in enumerate(i):
                exps[var_map[k]] = e
            terms[tuple(exps)] = c
        dom = [F(0)] * nvars_new
        for k in range(self.nvars):
            dom[var_map[k]] = self.domain[k]
        return RestrictedSeries(self.p, nvars_new, terms, tail=self.tail, domain=tuple(dom))


# ---------------------------------------------------------------------------
# evaluation


def trop_point(xs):
    """The tuple of coordinate valuations."""
    return tuple(x.valuation() for x in xs)


def _with_error_floor(x: PadicScaled, floor):
    """x + O(p^floor) as a PadicScaled; raises when no digit survives."""
    if floor is INF:
        return x
    v = x.valuation()
    if v is INF or v >= floor:
        raise PrecisionExhausted(
            "value is indistinguishable from zero at the certified floor",
            floor=floor,
        )
    digits = int(floor - v)
    if digits < 1:
        raise PrecisionExhausted("no certified digit", floor=floor)
    return PadicScaled.approx(x.p, v, x.unit_digits(digits), digits)


def evaluate(f: RestrictedSeries, xs) -> PadicScaled:
    """Value of f at a point, certified to the provable precision."""
    if len(xs) != f.nvars:
        raise ValueError("point dimension mismatch")
    nu = trop_point(xs)
    for v, r in zip(nu, f.domain):
        if r is not None and not (v is INF or v >= r):
            raise DomainViolation(f"trop {nu} outside the domain {f.domain}")
    total = PadicScaled.zero(f.p)
    for exps, c in f.terms.items():
        term = c
        skip = False
        for x, e in zip(xs, exps):
            if e == 0:
                continue
            if x.is_zero():
                skip = True
                break
            term = term * x ** e
        if not skip:
            total = total + term
    live = [v for v in nu if v is not INF]
    nu_min = min(live) if live else INF
    floor = f.tail.floor_at(nu_min)
    if floor is None:
        raise PrecisionExhausted("tail sum valuation unbounded below at this point")
    return _with_error_floor(total, floor)


# ---------------------------------------------------------------------------
# derivation


def _falling(n, k):
    out = 1
    for j in range(k):
        out *= n - j
    return out


def derivative(f: RestrictedSeries, i: int, k: int = 1) -> RestrictedSeries:
    """k-th formal partial derivative in variable i.

    The tail transform keeps the slope, lowers the offset by k*slope and
    the cutoff by k; this is the contracted (sound, not tight) bound.
    """
    if k < 0:
        raise ValueError("order must be >= 0")
    if k == 0:
        return f
    terms = {}
    for exps, c in f.terms.items():
        if exps[i] < k:
            continue
        mult = _falling(exps[i], k)
        new = list(exps)
        new[i] -= k
        terms[tuple(new)] = c * PadicScaled.exact(f.p, mult)
    cutoff = max(f.tail.cutoff - k, 0)
    if f.tail.is_empty:
        tail = TailBound.empty(cutoff)
    else:
        tail = TailBound(cutoff, f.tail.slope, f.tail.offset - k * f.tail.slope)
    return RestrictedSeries(f.p, f.nvars, terms, tail=tail, domain=f.domain)


# ---------------------------------------------------------------------------
# substitutions


@dataclass(frozen=True)
class Shift:
    """X_i -> X_i - c."""

    var: int
    c: PadicScaled


@dataclass(frozen=True)
class Scale:
    """X_i -> X_i * xi^{-1} with v(xi) = t (valuation bookkeeping)."""

    var: int
    t: Fraction


@dataclass(frozen=True)
class MonomialRule:
    """X_i -> Z_i - Z_n^(d^(n-i)) for i < n, X_n -> Z_n."""

    d: int
    degree_budget: int


def substitute(f: RestrictedSeries, rule) -> RestrictedSeries:
    if isinstance(rule, Shift):
        return shift_variable(f, rule.var, rule.c)
    if isinstance(rule, Scale):
        return scale_variable(f, rule.var, rule.t)
    if isinstance(rule, MonomialRule):
        return monomial_substitution(f, rule.d, rule.degree_budget)
    raise TypeError(f"unknown substitution rule {rule!r}")


def shift_variable(f: RestrictedSeries, i: int, c: PadicScaled) -> RestrictedSeries:
    """Substitute X_i -> X_i - c; requires v(c) >= r_i so the domain holds."""
    c = _coerce_coeff(f.p, c)
    r = f.domain[i]
    if r is not None and not (c.is_zero() or c.valuation() >= r):
        raise DomainViolation("shift constant leaves the domain")
    if not f.tail.is_empty and not (c.is_zero() or c.valuation() >= 0):
        raise DomainViolation("shift with v(c) < 0 cannot keep the tail bound")
    out = {}
    for exps, a in f.terms.items():
        e = exps[i]
        base = list(exps)
        for j in range(e + 1):
            coeff = a * PadicScaled.exact(f.p, math.comb(e, j)) * (-c) ** (e - j)
            if coeff.is_zero():
                continue
            base[i] = j
            k = tuple(base)
            cur = out.get(k)
            out[k] = coeff if cur is None else cur + coeff
        base[i] = e
    out = {k: v for k, v in out.items() if not v.is_zero()}
    if f.tail.is_empty:
        return RestrictedSeries(f.p, f.nvars, out, tail=f.tail, domain=f.domain)
    inj = f.tail.floor_at(F(0))
    degraded = {k: _with_error_floor(v, inj) for k, v in out.items()}
    return RestrictedSeries(f.p, f.nvars, degraded, tail=f.tail, domain=f.domain)


def scale_variable(f: RestrictedSeries, i: int, t) -> RestrictedSeries:
    """Valuation bookkeeping for X_i -> X_i*xi^{-1}, v(xi) = t.

    Coefficient valuations drop by I_i*t; the domain coordinate rises by t.
    """
    t = F(t)
    terms = {
        exps: c.shift_valuation(-exps[i] * t) for exps, c in f.terms.items()
    }
    dom = list(f.domain)
    if dom[i] is not None:
        dom[i] = dom[i] + t
    tail = f.tail
    if not tail.is_empty:
        tail = TailBound(tail.cutoff, tail.slope - max(t, F(0)), tail.offset)
    return RestrictedSeries(f.p, f.nvars, terms, tail=tail, domain=tuple(dom))


def monomial_substitution(f: RestrictedSeries, d: int, degree_budget: int) -> RestrictedSeries:
    """Substitute X_i -> Z_i - Z_n^(d^(n-i)) for i < n (X_n fixed).

    Raises BudgetExceeded as soon as the expansion would create a term of
    total degree above the budget.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    n = f.nvars
    for r in f.domain:
        if r is not None and r > 0:
            raise DomainViolation("monomial substitution needs domain containing [0,oo)^n")
    exps_of_i = [d ** (n - 1 - i) for i in range(n - 1)]  # Z_n exponent per variable
    out = {}
    for exps, a in f.terms.items():
        partial = {(0,) * (n - 1) + (exps[-1],): a}
        for i in range(n - 1):
            e = exps[i]
            if e == 0:
                continue
            nxt = {}
            for j in range(e + 1):
                cf = PadicScaled.exact(f.p, math.comb(e, j) * (-1) ** (e - j))
                for k, c in partial.items():
                    kk = list(k)
                    kk[i] += j
                    kk[-1] += (e - j) * exps_of_i[i]
                    kk = tuple(kk)
                    if sum(kk) > degree_budget:
                        raise BudgetExceeded(
                            f"monomial substitution exceeds degree budget {degree_budget}"
                        )
                    c2 = c * cf
                    cur = nxt.get(kk)
                    nxt[kk] = c2 if cur is None else cur + c2
            partial = nxt
        for k, c in partial.items():
            cur = out.get(k)
            out[k] = c if cur is None else cur + c
    out = {k: v for k, v in out.items() if not v.is_zero()}
    dom = tuple(F(0) for _ in range(n))
    if f.tail.is_empty:
        return RestrictedSeries(f.p, n, out, tail=TailBound.empty(degree_budget), domain=dom)
    # tail terms land at degree > cutoff with slope divided by the largest
    # exponent the substitution can multiply a degree by
    emax = max(exps_of_i, default=1)
    inj = f.tail.floor_at(F(0))
    degraded = {k: _with_error_floor(v, inj) for k, v in out.items()}
    tail = TailBound(degree_budget, f.tail.slope / emax, f.tail.offset)
    return RestrictedSeries(f.p, n, degraded, tail=tail, domain=dom)


# ---------------------------------------------------------------------------
# Weierstrass calculus


@dataclass(frozen=True)
class Budget:
    """Certification targets: valuation prec, total-degree cutoff degree."""

    prec: int
    degree: int


def regular_order(f: RestrictedSeries) -> int:
    """Smallest d with f(0,...,0,Y) = sum b_i Y^i, v(b_i) > 0 below d and
    b_d a unit, certified from stored terms and the tail."""
    if f.is_certified_zero():
        raise ZeroSeries("zero series has no regularity order")
    axis = f.nvars - 1
    by_j = f.axis_coeffs(axis)
    for j in sorted(by_j):
        v = by_j[j].valuation()
        if v < 0:
            raise NotRegular(f"pure-axis coefficient at {j} has negative valuation")
        if v == 0:
            return j
    raise NotRegular("no unit pure-axis coefficient within the cutoff")


def _split_high(terms, axis, d):
    """(low, high): axis-degree < d, and >= d shifted down by d."""
    low, high = {}, {}
    for exps, c in terms.items():
        if exps[axis] < d:
            low[exps] = c
        else:
            k = list(exps)
            k[axis] -= d
            high[tuple(k)] = c
    return low, high


def _dict_mul(p, a, b, degree_budget):
    out = {}
    for i, x in a.items():
        for j, y in b.items():
            k = tuple(s + t for s, t in zip(i, j))
            if sum(k) > degree_budget:
                continue
            c = x * y
            cur = out.get(k)
            out[k] = c if cur is None else cur + c
    return {k: v for k, v in out.items() if not v.is_zero()}


def _dict_sub(a, b):
    out = dict(a)
    for k, v in b.items():
        cur = out.get(k)
        w = -v if cur is None else cur - v
        if w.is_zero():
            out.pop(k, None)
        else:
            out[k] = w
    return out


def _check_division_inputs(f, g, d, budget):
    axis = f.nvars - 1
    for s in (f, g):
        for exps, c in s.terms.items():
            if c.valuation() < 0:
                raise ValueError("division requires integral series")
        if not s.tail.is_empty:
            fl = s.tail.floor_at(F(0))
            if fl is None or (s.tail.cutoff + 1 <= budget.degree - 1 and fl < budget.prec):
                raise BudgetExceeded(
                    "tail terms below the degree budget are not certified to the precision budget"
                )
    for j, c in f.axis_coeffs(axis).items():
        if j != d and c.valuation() == 0:
            raise BudgetExceeded(
                f"contraction cannot certify the budget: unit pure-axis coefficient at Y^{j}"
            )
    if not f.tail.is_empty:
        fl = f.tail.floor_at(F(0))
        if fl is None or fl <= 0:
            raise BudgetExceeded("tail cannot exclude unit pure-axis coefficients")


def weierstrass_divide(f: RestrictedSeries, g: RestrictedSeries, budget: Budget):
    """Division g = Q*f + (A_{d-1} Y^{d-1} + ... + A_0), certified to budget.

    Returns (Q, [A_0, ..., A_{d-1}]) with Q a series in all variables and
    A_j series in the first n-1 variables.  The identity holds up to terms
    of valuation >= budget.prec or total degree >= budget.degree.
    """
    if f.p != g.p or f.nvars != g.nvars:
        raise ValueError("series are not over the same ring")
    d = regular_order(f)
    _check_division_inputs(f, g, d, budget)
    p, n = f.p, f.nvars
    axis = n - 1
    c0 = f.terms[(0,) * axis + (d,)]
    e_dict = dict(f.terms)
    top = (0,) * axis + (d,)
    rem = e_dict.pop(top) - c0
    if not rem.is_zero():
        e_dict[top] = rem
    one_over = PadicScaled.exact(p, 1) / c0

    q_cur = {}
    rounds = budget.prec + budget.degree + 2
    g_low, g_high = _split_high(g.terms, axis, d)
    for _ in range(rounds):
        prod = _dict_mul(p, q_cur, e_dict, budget.degree)
        h = _dict_sub(g.terms, prod)
        _, h_high = _split_high(h, axis, d)
        q_next = {k: v * one_over for k, v in h_high.items()}
        q_next = {k: v for k, v in q_next.items() if not v.is_zero()}
        if q_next == q_cur:
            break
        q_cur = q_next

    prod = _dict_mul(p, q_cur, e_dict, budget.degree)
    h = _dict_sub(g.terms, prod)
    r_low, _ = _split_high(h, axis, d)

    # residue check: g - Q f - R must vanish to budget below the degree cutoff
    qf = _dict_mul(p, q_cur, f.terms, budget.degree)
    res = _dict_sub(_dict_sub(g.terms, qf), r_low)
    for exps, c in res.items():
        if sum(exps) < budget.degree and c.valuation() < budget.prec:
            raise BudgetExceeded(
                f"division residue at {exps} has valuation {c.valuation()} < {budget.prec}"
            )

    dom = f._common_domain(g)
    q_series = RestrictedSeries(p, n, q_cur, tail=TailBound.empty(budget.degree), domain=dom)
    a_list = []
    for j in range(d):
        a_terms = {
            exps[:axis]: c for exps, c in r_low.items() if exps[axis] == j
        }
        a_list.append(
            RestrictedSeries(
                p,
                axis,
                a_terms,
                tail=TailBound.empty(budget.degree),
                domain=dom[:axis],
            )
        )
    return q_series, a_list


def weierstrass_prepare(f: RestrictedSeries, budget: Budget):
    """f = (Y^d + A_{d-1} Y^{d-1} + ... + A_0) * U with U a unit, to budget.

    Returns ([A_0, ..., A_{d-1}], U).
    """
    d = regular_order(f)
    p, n = f.p, f.nvars
    axis = n - 1
    y_d = RestrictedSeries(p, n, {(0,) * axis + (d,): 1}, domain=f.domain)
    _, a1 = weierstrass_divide(f, y_d, budget)
    a_list = [-a for a in a1]
    dist_terms = {(0,) * axis + (d,): PadicScaled.exact(p, 1)}
    for j, a in enumerate(a_list):
        for exps, c in a.terms.items():
            dist_terms[exps + (j,)] = c
    dist = RestrictedSeries(p, n, dist_terms, domain=f.domain)
    if regular_order(dist) != d:
        raise BudgetExceeded("distinguished part is not regular of the same order")
    u_series, rem = weierstrass_divide(dist, f, budget)
    for a in rem:
        for exps, c in a.terms.items():
            if c.valuation() < budget.prec:
                raise BudgetExceeded("unit division remainder not certified to budget")
    const = u_series.coeff((0,) * n)
    if const.is_zero() or const.valuation() != 0:
        raise BudgetExceeded("unit part has no certified unit constant term")
    return a_list, u_series


def strassmann_count(f: RestrictedSeries) -> int:
    """Largest coefficient index attaining the minimal valuation.

    Counts the zeros of f in the closed unit ball (with multiplicity) and
    upper-bounds the zeros over the base ring.
    """
    if f.nvars != 1:
        raise ValueError("strassmann_count needs a univariate series")
    if f.is_certified_zero():
        raise ZeroSeries("cannot count zeros of the zero series")
    if not f.terms:
        raise PrecisionExhausted("no stored terms: minimum not certified")
    m = min(c.valuation() for c in f.terms.values())
    n = max(i[0] for i, c in f.terms.items() if c.valuation() == m)
    floor = f.tail.floor_at(F(0))
    if floor is None or floor <= m:
        raise PrecisionExhausted(
            "tail bound cannot exclude the minimum beyond the cutoff", floor=floor
        )
    return n


# ---------------------------------------------------------------------------
# composition (used by the term language)


def compose_univariate(base: RestrictedSeries, g: RestrictedSeries, budget: Budget):
    """base(g) for univariate base and polynomial g, certified to budget."""
    if base.nvars != 1:
        raise ValueError("base must be univariate")
    if not g.tail.is_empty:
        raise BudgetExceeded("composition with a non-polynomial argument")
    if base.p != g.p:
        raise ValueError("prime mismatch")
    p = g.p
    m = val_min(*(c.valuation() for c in g.terms.values()))
    r0 = base.domain[0]
    if m is not INF and (m < 0 or (r0 is not None and m < r0)):
        raise DomainViolation("argument values leave the base domain")
    deg_g = g.max_degree()
    # partial sum bound: stop once the base tail certifies the precision
    if base.tail.is_empty:
        k_max = base.tail.cutoff
        floor_beyond = INF
    else:
        c_b, b_b = base.tail.slope, base.tail.offset
        k_max = base.tail.cutoff
        while c_b * (k_max + 1) + b_b < budget.prec:
            k_max += 1
        floor_beyond = c_b * (k_max + 1) + b_b
    acc = {}
    power = {(0,) * g.nvars: PadicScaled.exact(p, 1)}
    folds = []
    full_degree = max(k_max * deg_g, budget.degree)
    for k in range(k_max + 1):
        a_k = base.coeff((k,))
        if not a_k.is_zero():
            for exps, c in power.items():
                w = c * a_k
                cur = acc.get(exps)
                acc[exps] = w if cur is None else cur + w
        if k < k_max:
            # powers are never truncated below their true degree, so every
            # overflow term is computed and folded into the tail soundly
            power = _dict_mul(p, power, g.terms, full_degree)
            if len(power) > 20000:
                raise BudgetExceeded("composition expansion too large for the budget")
    kept = {}
    for exps, c in acc.items():
        if c.is_zero():
            continue
        if sum(exps) > budget.degree:
            folds.append((sum(exps), val_min(c.valuation(), floor_beyond)))
        else:
            kept[exps] = c
    pieces = []
    if floor_beyond is not INF and deg_g > 0:
        pieces.append((base.tail.slope / deg_g, base.tail.offset))
    tail = _merge_tail_pieces(budget.degree, pieces, folds)
    if floor_beyond is not INF:
        kept = {k: _with_error_floor(v, floor_beyond) for k, v in kept.items()}
    return RestrictedSeries(p, g.nvars, kept, tail=tail, domain=g.domain)


# ---------------------------------------------------------------------------
# parameterized series


class ParamSeries:
    """A series in X whose coefficients are series in parameters Y.

    The X-support is finite (polynomial in X over series coefficients);
    that is what every finite-generation verification below needs.
    """

    __slots__ = ("p", "nx", "nparams", "coeffs", "param_domain")

    def __init__(self, p, nx, nparams, coeffs, param_domain=None):
        self.p = p
        self.nx = nx
        self.nparams = nparams
        clean = {}
        for exps, s in coeffs.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nx:
                raise ValueError("X-exponent length mismatch")
            if not isinstance(s, RestrictedSeries):
                s = RestrictedSeries.constant(p, s, nvars=nparams) if nparams else \
                    RestrictedSeries(p, 0, {(): s})
            if s.p != p or s.nvars != nparams:
                raise ValueError("coefficient series over the wrong parameter ring")
            if s.is_certified_zero():
                continue
            clean[exps] = s
        self.coeffs = clean
        if param_domain is None:
            param_domain = tuple(F(0) for _ in range(nparams))
        self.param_domain = tuple(param_domain)

    @classmethod
    def from_series(cls, f: RestrictedSeries) -> "ParamSeries":
        if not f.tail.is_empty:
            raise ValueError("parameter-free ParamSeries needs a polynomial")
        coeffs = {i: RestrictedSeries(f.p, 0, {(): c}) for i, c in f.terms.items()}
        return cls(f.p, f.nvars, 0, coeffs)

    def support(self):
        return sorted(self.coeffs)

    def max_degree(self) -> int:
        return max((sum(i) for i in self.coeffs), default=0)

    def is_identically_zero(self) -> bool:
        return not self.coeffs

    def specialize(self, ys, x_domain=None) -> RestrictedSeries:
        """Evaluate every coefficient at parameters ys."""
        terms = {}
        for exps, s in self.coeffs.items():
            terms[exps] = evaluate(s, ys) if self.nparams else s.coeff(())
        return RestrictedSeries(self.p, self.nx, terms, domain=x_domain)

    def slice_at_zero(self, s: int, k: int) -> "ParamSeries":
        """(1/s!) d^s/dX_k^s at X_k = 0: keeps X_k-exponent == s terms."""
        coeffs = {}
        for exps, c in self.coeffs.items():
            if exps[k] != s:
                continue
            rest = exps[:k] + exps[k + 1:]
            coeffs[rest] = c
        return ParamSeries(self.p, self.nx - 1, self.nparams, coeffs, self.param_domain)

    def canonical_key(self):
        parts = []
        for exps in sorted(self.coeffs):
            s = self.coeffs[exps]
            body = tuple(
                (i, c.valuation(), c.unit_digits(1) if not c.is_zero() else 0)
                for i, c in sorted(s.terms.items())
            )
            parts.append((exps, body))
        return (self.p, self.nx, self.nparams, tuple(parts))

    def __repr__(self):
        return f"ParamSeries(p={self.p}, nx={self.nx}, nparams={self.nparams}, support={self.support()})"
