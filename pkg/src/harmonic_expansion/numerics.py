"""Exact rationals and fixed-point high-precision reals.

Rationals are plain :class:`fractions.Fraction` values (always in lowest
terms, positive denominator, zero stored as 0/1).  Reals are fixed-point:
a :class:`HighPrecisionReal` holds an integer mantissa ``M`` and a precision
``P`` and represents ``M * 2**-P`` exactly.  One ulp is ``2**-P``.

Rounding contract:

* ``+``/``-`` between reals are exact after aligning to the larger precision.
* ``*``/``/`` round once, to nearest-even, so the error is at most 1/2 ulp.
* :func:`rational_to_real` rounds once (<= 1/2 ulp).
* :func:`hp_ln` is evaluated with 40 guard bits and rounded once; the final
  error is below 1 ulp (the public bound is 4 ulp).
* :func:`hp_pow_int` uses enough guard bits to absorb the growth of the
  result and rounds once at the end (<= 1 ulp).
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Union

BigRational = Fraction

MIN_PRECISION = 64
DEFAULT_PRECISION = 256

NEAREST = "nearest"
FLOOR = "floor"
CEILING = "ceiling"
_ROUNDINGS = (NEAREST, FLOOR, CEILING)

Number = Union["HighPrecisionReal", int, Fraction]


class DomainError(ValueError):
    """Argument outside the domain of a real function."""


class PrecisionError(ArithmeticError):
    """Working precision is too low for the requested result.

    ``required_bits`` carries a precision that would be sufficient.
    """

    def __init__(self, message: str, required_bits: int | None = None):
        super().__init__(message)
        self.required_bits = required_bits


# ---------------------------------------------------------------------------
# integer rounding primitives


def _div_round(a: int, b: int, rounding: str = NEAREST) -> int:
    if b <= 0:
        raise ValueError("divisor must be positive")
    q, r = divmod(a, b)  # floor division, 0 <= r < b
    if rounding == FLOOR or r == 0:
        return q
    if rounding == CEILING:
        return q + 1
    twice = 2 * r
    if twice > b or (twice == b and q & 1):
        q += 1
    return q


def _shift_round(a: int, shift: int, rounding: str = NEAREST) -> int:
    if shift <= 0:
        return a << -shift
    return _div_round(a, 1 << shift, rounding)


def _fraction_round(q: Fraction, rounding: str) -> int:
    return _div_round(q.numerator, q.denominator, rounding)


# ---------------------------------------------------------------------------
# rationals


def format_rational(q: Fraction) -> str:
    """Text form ``-p/q``; ``p`` alone when the denominator is 1."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    text = text.strip().replace("−", "-")
    return Fraction(text)


def format_decimal(q: Fraction, places: int, rounding: str = NEAREST) -> str:
    """Fixed-point decimal with ``places`` digits after the point (half-even by default)."""
    if places < 0:
        raise ValueError("places must be >= 0")
    scaled = _fraction_round(Fraction(q) * 10**places, rounding)
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(places + 1, "0")
    if places == 0:
        return sign + digits
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def floor_log10(q: Fraction) -> int:
    """floor(log10|q|) computed exactly; q must be nonzero."""
    q = abs(q)
    e = len(str(q.numerator)) - len(str(q.denominator))
    while q >= Fraction(10) ** (e + 1):
        e += 1
    while q < Fraction(10) ** e:
        e -= 1
    return e


def format_scientific(q: Fraction, significant: int) -> str:
    """Scientific notation with ``significant`` digits, half-even (``1.50e-03``)."""
    if significant < 1:
        raise ValueError("significant must be >= 1")
    q = Fraction(q)
    if q == 0:
        return "0." + "0" * (significant - 1) + "e+00" if significant > 1 else "0e+00"
    e = floor_log10(q)
    mant = _fraction_round(abs(q) / Fraction(10) ** (e - significant + 1), NEAREST)
    if mant == 10**significant:
        mant //= 10
        e += 1
    digits = str(mant)
    body = digits[0] + ("." + digits[1:] if significant > 1 else "")
    sign = "-" if q < 0 else ""
    esign = "-" if e < 0 else "+"
    return f"{sign}{body}e{esign}{abs(e):02d}"


# ---------------------------------------------------------------------------
# fixed-point reals


def _check_precision(bits: int) -> int:
    if not isinstance(bits, int) or bits < MIN_PRECISION:
        raise ValueError(f"precision_bits must be an integer >= {MIN_PRECISION}, got {bits!r}")
    return bits


class HighPrecisionReal:
    """Immutable fixed-point real ``mantissa * 2**-precision_bits``."""

    __slots__ = ("_mantissa", "_precision")

    def __init__(self, mantissa: int, precision_bits: int = DEFAULT_PRECISION):
        if not isinstance(mantissa, int):
            raise TypeError("mantissa must be an int")
        self._mantissa = mantissa
        self._precision = _check_precision(precision_bits)

    @property
    def mantissa(self) -> int:
        return self._mantissa

    @property
    def precision_bits(self) -> int:
        return self._precision

    @property
    def ulp(self) -> Fraction:
        return Fraction(1, 1 << self._precision)

    @classmethod
    def from_int(cls, value: int, precision_bits: int = DEFAULT_PRECISION) -> HighPrecisionReal:
        return cls(value << precision_bits, precision_bits)

    def to_fraction(self) -> Fraction:
        return Fraction(self._mantissa, 1 << self._precision)

    def with_precision(self, precision_bits: int, rounding: str = NEAREST) -> HighPrecisionReal:
        """Re-express at another precision; exact when widening."""
        _check_precision(precision_bits)
        mant = _shift_round(self._mantissa, self._precision - precision_bits, rounding)
        return HighPrecisionReal(mant, precision_bits)

    def sign(self) -> int:
        return (self._mantissa > 0) - (self._mantissa < 0)

    def is_zero(self) -> bool:
        return self._mantissa == 0

    # -- helpers ------------------------------------------------------------
    def _coerce(self, other) -> HighPrecisionReal | Fraction | None:
        if isinstance(other, HighPrecisionReal):
            return other
        if isinstance(other, (int, Rational)):
            return Fraction(other)
        return None

    def _aligned(self, other: HighPrecisionReal) -> tuple[int, int, int]:
        p = max(self._precision, other._precision)
        return (
            self._mantissa << (p - self._precision),
            other._mantissa << (p - other._precision),
            p,
        )

    # -- arithmetic ---------------------------------------------------------
    def __neg__(self) -> HighPrecisionReal:
        return HighPrecisionReal(-self._mantissa, self._precision)

    def __pos__(self) -> HighPrecisionReal:
        return self

    def __abs__(self) -> HighPrecisionReal:
        return HighPrecisionReal(abs(self._mantissa), self._precision)

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if isinstance(other, Fraction):
            other = rational_to_real(other, self._precision)
        a, b, p = self._aligned(other)
        return HighPrecisionReal(a + b, p)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if isinstance(other, Fraction):
            other = rational_to_real(other, self._precision)
        a, b, p = self._aligned(other)
        return HighPrecisionReal(a - b, p)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def mul(self, other, rounding: str = NEAREST) -> HighPrecisionReal:
        """Product rounded once in the given direction.

        An int or Fraction operand is used exactly, so ``x.mul(q)`` is a
        single rounding of the exact product.
        """
        other = self._coerce(other)
        if other is None:
            raise TypeError(f"cannot multiply by {type(other).__name__}")
        if isinstance(other, Fraction):
            mant = _div_round(self._mantissa * other.numerator, other.denominator, rounding)
            return HighPrecisionReal(mant, self._precision)
        a, b, p = self._aligned(other)
        return HighPrecisionReal(_shift_round(a * b, p, rounding), p)

    def div(self, other, rounding: str = NEAREST) -> HighPrecisionReal:
        other = self._coerce(other)
        if other is None:
            raise TypeError(f"cannot divide by {type(other).__name__}")
        if isinstance(other, Fraction):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self.mul(1 / other, rounding)
        a, b, p = self._aligned(other)
        if b == 0:
            raise ZeroDivisionError("division by zero")
        if b < 0:
            a, b = -a, -b
        return HighPrecisionReal(_div_round(a << p, b, rounding), p)

    def __mul__(self, other):
        if self._coerce(other) is None:
            return NotImplemented
        return self.mul(other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if self._coerce(other) is None:
            return NotImplemented
        return self.div(other)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if isinstance(other, Fraction):
            other = rational_to_real(other, self._precision)
        return other.div(self)

    # -- comparisons --------------------------------------------------------
    def _cmp(self, other) -> int | None:
        other = self._coerce(other)
        if other is None:
            return None
        if isinstance(other, Fraction):
            a, b = self.to_fraction(), other
        else:
            a, b, _ = self._aligned(other)
        return (a > b) - (a < b)

    def __eq__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c == 0

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __hash__(self):
        return hash(self.to_fraction())

    # -- conversion ---------------------------------------------------------
    def __float__(self) -> float:
        return self._mantissa / (1 << self._precision)

    def to_decimal(self, places: int) -> str:
        return format_decimal(self.to_fraction(), places)

    def to_scientific(self, significant: int) -> str:
        return format_scientific(self.to_fraction(), significant)

    def __str__(self) -> str:
        return self.to_decimal(30)

    def __repr__(self) -> str:
        return f"HighPrecisionReal({self.to_scientific(20)!r}, P={self._precision})"


def rational_to_real(
    q: Fraction | int, precision_bits: int = DEFAULT_PRECISION, rounding: str = NEAREST
) -> HighPrecisionReal:
    """Nearest (or directed) fixed-point value of an exact rational."""
    _check_precision(precision_bits)
    if rounding not in _ROUNDINGS:
        raise ValueError(f"unknown rounding {rounding!r}")
    q = Fraction(q)
    mant = _div_round(q.numerator << precision_bits, q.denominator, rounding)
    return HighPrecisionReal(mant, precision_bits)


# ---------------------------------------------------------------------------
# logarithm

_LN_GUARD = 40


def _atanh_inverse(k: int, bits: int) -> int:
    """atanh(1/k) as a mantissa at ``bits``; error a few ulp per term."""
    k2 = k * k
    t = (1 << bits) // k
    s = 0
    j = 1
    while t:
        s += t // j
        t //= k2
        j += 2
    return s


@lru_cache(maxsize=64)
def _ln2_mantissa(bits: int) -> int:
    # ln 2 = 18 atanh(1/26) - 2 atanh(1/4801) + 8 atanh(1/8749)
    w = bits + 24
    s = 18 * _atanh_inverse(26, w) - 2 * _atanh_inverse(4801, w) + 8 * _atanh_inverse(8749, w)
    return _shift_round(s, 24)


def _atanh_series(z: int, bits: int) -> int:
    z2 = _shift_round(z * z, bits)
    t = z
    s = 0
    j = 1
    while t:
        s += _div_round(t, j)
        t = _shift_round(t * z2, bits)
        j += 2
    return s


def hp_ln(x: HighPrecisionReal) -> HighPrecisionReal:
    """Natural logarithm, error below 1 ulp.

    x is split as 2**k * y with y in [1/sqrt2, sqrt2); ln y = 2 atanh(z)
    with z = (y-1)/(y+1), |z| < 0.172.
    """
    if not isinstance(x, HighPrecisionReal):
        raise TypeError("hp_ln expects a HighPrecisionReal")
    m = x.mantissa
    if m <= 0:
        raise DomainError("ln is undefined for x <= 0")
    p = x.precision_bits
    w = p + _LN_GUARD
    k = m.bit_length() - 1 - p
    d = 1 << (p + k)
    if m * m > 2 * d * d:
        k += 1
        d <<= 1
    z = _div_round((m - d) << w, m + d)
    total = 2 * _atanh_series(z, w)
    if k:
        extra = abs(k).bit_length()  # ln2 carries extra bits so k*ln2 stays sub-ulp
        total += _shift_round(k * _ln2_mantissa(w + extra), extra)
    return HighPrecisionReal(_shift_round(total, w - p), p)


def hp_ln2(precision_bits: int = DEFAULT_PRECISION) -> HighPrecisionReal:
    _check_precision(precision_bits)
    return HighPrecisionReal(_shift_round(_ln2_mantissa(precision_bits + _LN_GUARD), _LN_GUARD), precision_bits)


def hp_pow_int(x: HighPrecisionReal, k: int) -> HighPrecisionReal:
    """x**k by binary exponentiation at a widened precision, rounded once.

    The guard width covers the magnitude of the result, so the error stays
    within 1 ulp (the public bound is 2|k| ulp).
    """
    p = x.precision_bits
    if k == 0:
        return HighPrecisionReal.from_int(1, p)
    if x.mantissa == 0:
        if k < 0:
            raise ZeroDivisionError("0 raised to a negative power")
        return HighPrecisionReal(0, p)
    n = abs(k)
    log2_abs = abs(x.mantissa.bit_length() - p) + 1
    # a negative power of a small base needs the bits twice: once for the
    # relative precision of the tiny intermediate, once for the large result
    w = p + (2 if k < 0 else 1) * n * log2_abs + 2 * n.bit_length() + 16
    base = x.mantissa << (w - p)
    acc = 1 << w
    e = n
    while True:
        if e & 1:
            acc = _shift_round(acc * base, w)
        e >>= 1
        if not e:
            break
        base = _shift_round(base * base, w)
    if k < 0:
        if acc == 0:
            raise PrecisionError("power underflowed before inversion", required_bits=2 * w)
        sign = -1 if acc < 0 else 1
        acc = sign * _div_round(1 << (2 * w), abs(acc))
    return HighPrecisionReal(_shift_round(acc, w - p), p)


# ---------------------------------------------------------------------------
# intervals


class Interval:
    """Closed interval ``[lo, hi]`` of fixed-point reals, outward-rounded."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: HighPrecisionReal, hi: HighPrecisionReal):
        if lo > hi:
            raise ValueError("interval requires lo <= hi")
        self.lo = lo
        self.hi = hi

    @classmethod
    def point(cls, x: HighPrecisionReal) -> Interval:
        return cls(x, x)

    @classmethod
    def from_rational(cls, q: Fraction | int, precision_bits: int = DEFAULT_PRECISION) -> Interval:
        return cls(
            rational_to_real(q, precision_bits, FLOOR),
            rational_to_real(q, precision_bits, CEILING),
        )

    @classmethod
    def hull(cls, *items: Interval | HighPrecisionReal) -> Interval:
        los, his = [], []
        for item in items:
            if isinstance(item, Interval):
                los.append(item.lo)
                his.append(item.hi)
            else:
                los.append(item)
                his.append(item)
        if not los:
            raise ValueError("hull of nothing")
        return cls(min(los), max(his))

    @property
    def precision_bits(self) -> int:
        return max(self.lo.precision_bits, self.hi.precision_bits)

    def width(self) -> HighPrecisionReal:
        return self.hi - self.lo

    def midpoint(self) -> HighPrecisionReal:
        return (self.lo + self.hi).mul(Fraction(1, 2))

    def contains(self, value: Number) -> bool:
        return self.lo <= value <= self.hi

    def contains_interval(self, other: Interval) -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __neg__(self) -> Interval:
        return Interval(-self.hi, -self.lo)

    def _as_interval(self, other) -> Interval:
        if isinstance(other, Interval):
            return other
        if isinstance(other, HighPrecisionReal):
            return Interval.point(other)
        if isinstance(other, (int, Rational)):
            return Interval.from_rational(Fraction(other), self.precision_bits)
        raise TypeError(f"cannot combine Interval with {type(other).__name__}")

    def __add__(self, other) -> Interval:
        o = self._as_interval(other)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, other) -> Interval:
        o = self._as_interval(other)
        return Interval(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other) -> Interval:
        return self._as_interval(other) - self

    def __mul__(self, other) -> Interval:
        o = self._as_interval(other)
        pairs = [(a, b) for a in (self.lo, self.hi) for b in (o.lo, o.hi)]
        return Interval(
            min(a.mul(b, FLOOR) for a, b in pairs),
            max(a.mul(b, CEILING) for a, b in pairs),
        )

    __rmul__ = __mul__

    def scale(self, q: Fraction | int) -> Interval:
        """Multiply by an exact rational, rounding outward."""
        q = Fraction(q)
        a, b = self.lo.mul(q, FLOOR), self.hi.mul(q, FLOOR)
        c, d = self.lo.mul(q, CEILING), self.hi.mul(q, CEILING)
        return Interval(min(a, b), max(c, d))

    def ln(self) -> Interval:
        """Enclosure of ln over the interval; widens hp_ln by 2 ulp each side."""
        lo, hi = hp_ln(self.lo), hp_ln(self.hi)
        return Interval(
            HighPrecisionReal(lo.mantissa - 2, lo.precision_bits),
            HighPrecisionReal(hi.mantissa + 2, hi.precision_bits),
        )

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self) -> str:
        return f"Interval({self.lo.to_scientific(20)}, {self.hi.to_scientific(20)})"
