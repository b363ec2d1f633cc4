"""Exact p-adic scaled arithmetic with explicit precision tracking.

A nonzero value is stored in one of two forms:

* exact: a nonzero rational ``r`` together with a fractional uniformizer
  offset ``shift`` in [0,1); the value is formally ``r * p**shift``.  Every
  digit of an exact value is recoverable at any precision, so integer
  literals stay exact through +, -, *, / and only genuinely approximate
  inputs introduce uncertainty.  ``shift`` is 0 except after valuation
  bookkeeping with fractional scalings (ramified uniformizer powers).
* approximate: unit digits ``u`` known modulo ``p**N`` at a certified
  valuation ``v`` (a rational); the value is ``u * p**v`` up to an error of
  valuation >= v + N.

Zero is a distinguished exact value of valuation +oo.  Values are
immutable and all operations are pure functions.
"""

from __future__ import annotations

from fractions import Fraction


class _Infinity:
    """The +oo valuation; absorbs addition, exceeds every rational."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "+Infinity"

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("troppadic-infinity")

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __neg__(self):
        raise ArithmeticError("cannot negate +Infinity")


INF = _Infinity()

# A valuation is either a Fraction or INF.
ValuationQ = object


def val_min(*vals):
    m = INF
    for v in vals:
        if v is INF:
            continue
        if m is INF or v < m:
            m = v
    return m


def val_add(a, b):
    if a is INF or b is INF:
        return INF
    return a + b


def vp_int(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is +Infinity")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_fraction(r: Fraction, p: int):
    if r == 0:
        return INF
    return Fraction(vp_int(r.numerator, p) - vp_int(r.denominator, p))


def _unit_digits_of_rational(r: Fraction, p: int, n_digits: int) -> int:
    """Digits of the unit part of a nonzero rational, modulo p**n_digits."""
    v = vp_fraction(r, p)
    num, den = r.numerator, r.denominator
    if v > 0:
        num //= p ** int(v)
    elif v < 0:
        den //= p ** int(-v)
    m = p ** n_digits
    return (num * pow(den, -1, m)) % m


from .errors import DivisionByZero, PrecisionExhausted  # noqa: E402


class PadicScaled:
    """A p-adic number as unit-times-p^v, exact or precision-tracked."""

    __slots__ = ("p", "_r", "_shift", "_v", "_u", "_N")

    def __init__(self, p, _r=None, _shift=None, _v=None, _u=None, _N=None):
        # Internal; use the exact()/approx()/zero() constructors.
        self.p = p
        self._r = _r
        self._shift = _shift
        self._v = _v
        self._u = _u
        self._N = _N

    # -- constructors ------------------------------------------------

    @classmethod
    def exact(cls, p: int, value, shift=Fraction(0)) -> "PadicScaled":
        """An exactly known rational value (times p**shift, shift in [0,1))."""
        if p < 2:
            raise ValueError("prime must be >= 2")
        r = Fraction(value)
        shift = Fraction(shift)
        if r == 0:
            return cls(p, _r=Fraction(0), _shift=Fraction(0))
        # fold integer part of the shift into the rational
        k = shift.numerator // shift.denominator
        if k:
            r *= Fraction(p) ** k
            shift -= k
        return cls(p, _r=r, _shift=shift)

    @classmethod
    def zero(cls, p: int) -> "PadicScaled":
        return cls.exact(p, 0)

    @classmethod
    def approx(cls, p: int, v, unit: int, prec: int) -> "PadicScaled":
        """A value known to be unit*p^v + O(p^(v+prec)), prec >= 1 digits."""
        if prec < 1:
            raise PrecisionExhausted("cannot construct a value with no certified digit")
        v = Fraction(v)
        m = p ** prec
        u = unit % m
        if u % p == 0:
            raise ValueError("unit digits must be coprime to p")
        return cls(p, _v=v, _u=u, _N=prec)

    @classmethod
    def from_int(cls, p: int, n: int) -> "PadicScaled":
        return cls.exact(p, n)

    # -- basic queries -----------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self._r is not None

    def is_zero(self) -> bool:
        return self._r is not None and self._r == 0

    def valuation(self):
        """The valuation v(self); +Infinity for exact zero."""
        if self.is_exact:
            if self._r == 0:
                return INF
            return vp_fraction(self._r, self.p) + self._shift
        return self._v

    def precision(self):
        """Number of certified unit digits (+Infinity when exact)."""
        return INF if self.is_exact else self._N

    def rational_value(self) -> Fraction:
        """The exact rational value; only for exact values with shift 0."""
        if not self.is_exact or self._shift != 0:
            raise ValueError("not an exact rational value")
        return self._r

    def unit_digits(self, n_digits: int) -> int:
        """The unit part modulo p**n_digits."""
        if self.is_zero():
            raise ValueError("zero has no unit part")
        if self.is_exact:
            return _unit_digits_of_rational(self._r, self.p, n_digits)
        if n_digits > self._N:
            raise PrecisionExhausted(
                f"only {self._N} digits certified, {n_digits} requested",
                floor=self._v + self._N,
            )
        return self._u % self.p ** n_digits

    def to_precision(self, prec: int) -> "PadicScaled":
        """Forget digits beyond prec (turns an exact value approximate)."""
        if self.is_zero():
            raise ValueError("cannot truncate exact zero to finite precision")
        return PadicScaled.approx(self.p, self.valuation(), self.unit_digits(prec), prec)

    # -- arithmetic --------------------------------------------------

    def _check_same(self, other):
        if not isinstance(other, PadicScaled):
            raise TypeError("operands must be PadicScaled")
        if other.p != self.p:
            raise ValueError(f"prime mismatch: {self.p} vs {other.p}")

    def __neg__(self):
        if self.is_exact:
            return PadicScaled(self.p, _r=-self._r, _shift=self._shift)
        m = self.p ** self._N
        return PadicScaled(self.p, _v=self._v, _u=(-self._u) % m, _N=self._N)

    def __add__(self, other):
        self._check_same(other)
        p = self.p
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.is_exact and other.is_exact:
            if self._shift == other._shift:
                return PadicScaled.exact(p, self._r + other._r, self._shift)
            # distinct fractional shifts never interact at integer spacing
            return self._add_mixed_shift(other)
        return self._add_approx(other)

    def _add_mixed_shift(self, other):
        # Both exact, different shifts: valuations differ by a non-integer,
        # so the sum's valuation is the smaller one; digits beyond the gap
        # are not representable in a single unit.
        a, b = (self, other) if self.valuation() < other.valuation() else (other, self)
        gap = b.valuation() - a.valuation()
        n = int(gap)  # floor; gap > 0 and non-integer
        if n < 1:
            raise PrecisionExhausted(
                "sum of incommensurable-valuation values has no certified digit",
                floor=a.valuation(),
            )
        return PadicScaled.approx(self.p, a.valuation(), a.unit_digits(n), n)

    def _add_approx(self, other):
        p = self.p
        va, vb = self.valuation(), other.valuation()
        fa = INF if self.is_exact else self._v + self._N
        fb = INF if other.is_exact else other._v + other._N
        floor = val_min(fa, fb)
        a, b = (self, other) if va <= vb else (other, self)
        vmin = min(va, vb)
        delta = max(va, vb) - vmin
        if delta.denominator != 1:
            n = int(delta)
            n = min(n, int(floor - vmin)) if floor is not INF else n
            if n < 1:
                raise PrecisionExhausted(
                    "no certified digit at incommensurable valuations", floor=vmin
                )
            return PadicScaled.approx(p, vmin, a.unit_digits(n), n)
        delta = int(delta)
        if floor is INF:  # unreachable: both exact handled by caller
            raise AssertionError
        m_digits = floor - vmin
        if m_digits <= 0:
            raise PrecisionExhausted("operands certify no overlapping digits", floor=floor)
        m_digits = int(m_digits)
        mod = p ** m_digits
        w = a.unit_digits(m_digits)
        if delta < m_digits:
            w = (w + b.unit_digits(m_digits - delta) * p ** delta) % mod
        if w == 0:
            raise PrecisionExhausted(
                "cancellation below certified precision", floor=vmin + m_digits
            )
        t = vp_int(w, p)
        if t >= m_digits:
            raise PrecisionExhausted(
                "cancellation below certified precision", floor=vmin + m_digits
            )
        return PadicScaled.approx(p, vmin + t, w // p ** t, m_digits - t)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check_same(other)
        p = self.p
        if self.is_zero() or other.is_zero():
            return PadicScaled.zero(p)
        if self.is_exact and other.is_exact:
            return PadicScaled.exact(p, self._r * other._r, self._shift + other._shift)
        n = min(self.precision(), other.precision())
        n = int(n)
        mod = p ** n
        u = (self.unit_digits(n) * other.unit_digits(n)) % mod
        return PadicScaled.approx(p, self.valuation() + other.valuation(), u, n)

    def __truediv__(self, other):
        self._check_same(other)
        p = self.p
        if other.is_zero():
            raise DivisionByZero("division by exact zero")
        if self.is_zero():
            return PadicScaled.zero(p)
        if self.is_exact and other.is_exact:
            shift = self._shift - other._shift
            return PadicScaled.exact(p, self._r / other._r, shift)
        n = int(min(self.precision(), other.precision()))
        mod = p ** n
        u = (self.unit_digits(n) * pow(other.unit_digits(n), -1, mod)) % mod
        return PadicScaled.approx(p, self.valuation() - other.valuation(), u, n)

    def __pow__(self, k: int):
        if k < 0:
            return PadicScaled.exact(self.p, 1) / self ** (-k)
        out = PadicScaled.exact(self.p, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def shift_valuation(self, delta) -> "PadicScaled":
        """Multiply by a formal uniformizer power p**delta (delta rational)."""
        delta = Fraction(delta)
        if self.is_zero():
            return self
        if self.is_exact:
            return PadicScaled.exact(self.p, self._r, self._shift + delta)
        return PadicScaled.approx(self.p, self._v + delta, self._u, self._N)

    # -- comparisons and helpers -------------------------------------

    def __eq__(self, other):
        if not isinstance(other, PadicScaled) or other.p != self.p:
            return NotImplemented
        if self.is_exact and other.is_exact:
            return self._r == other._r and self._shift == other._shift
        if self.is_exact or other.is_exact:
            return False
        return (self._v, self._u, self._N) == (other._v, other._u, other._N)

    def __hash__(self):
        if self.is_exact:
            return hash((self.p, self._r, self._shift))
        return hash((self.p, self._v, self._u, self._N))

    def __repr__(self):
        if self.is_zero():
            return f"PadicScaled(0; p={self.p})"
        if self.is_exact:
            s = f"*{self.p}^{self._shift}" if self._shift else ""
            return f"PadicScaled({self._r}{s}; p={self.p})"
        return f"PadicScaled({self._u}*{self.p}^{self._v} + O({self.p}^{self._v + self._N}))"


def valuation(x: PadicScaled):
    """v(x); +Infinity for exact zero."""
    return x.valuation()


def arith(a: PadicScaled, b: PadicScaled, op: str) -> PadicScaled:
    """Field operation dispatch: op in {add, sub, mul, div}."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def difference_floor(a: PadicScaled, b: PadicScaled):
    """A certified lower bound for v(a - b); never raises.

    Returns the exact valuation when the difference is representable,
    +Infinity when a and b are exactly equal, and the cancellation floor
    when subtraction runs out of certified digits.
    """
    try:
        return (a - b).valuation()
    except PrecisionExhausted as exc:
        if exc.floor is None:
            raise
        return exc.floor
