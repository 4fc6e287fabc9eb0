"""Harmonic numbers and the three asymptotic expansions.

Families (``r`` is always the number of correction terms kept):

* ``euler``      ln n + gamma + 1/(2n) - sum_{k<=r} B_2k / (2k n^2k)
* ``dtw``        ln(n + 1/2) + gamma + sum_{p<=r} D_p / (n + 1/2)^(2p)
* ``ramanujan``  (1/2) ln(2m) + gamma + sum_{p<=r} R_p / m^p,  m = n(n+1)/2

Each correction term is formed as an exact rational and rounded once, so a
partial sum with ``r`` terms carries at most (r/2 + 3) ulp of rounding error
(log <= 1 ulp, halving <= 1/2 ulp, gamma <= 1 ulp).

gamma is never hard-coded: :func:`gamma_value` derives it from an
enclosure built on an exact H_n.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .coefficients import d_coefficient, euler_coefficient, r_closed
from .numerics import (
    CEILING,
    DEFAULT_PRECISION,
    HighPrecisionReal,
    Interval,
    PrecisionError,
    hp_ln,
    rational_to_real,
)

HARMONIC_GUARD = 10**6
GAMMA_REFERENCE_N = 10**4


class Family(str, enum.Enum):
    EULER = "euler"
    DTW = "dtw"
    RAMANUJAN = "ramanujan"

    def __str__(self) -> str:
        return self.value


class HarmonicGuardError(ValueError):
    """Exact H_n requested beyond the size guard."""


def _check_n(n: int) -> None:
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")


def _check_r(r: int) -> None:
    if not isinstance(r, int) or isinstance(r, bool) or r < 0:
        raise ValueError(f"term count must be a non-negative integer, got {r!r}")


@dataclass(frozen=True)
class HarmonicIndex:
    n: int

    def __post_init__(self):
        _check_n(self.n)

    @property
    def m(self) -> int:
        return self.n * (self.n + 1) // 2

    @property
    def half_shift(self) -> Fraction:
        """n + 1/2."""
        return Fraction(2 * self.n + 1, 2)

    def check_identity(self) -> bool:
        """(n + 1/2)^2 == 2m + 1/4, exactly."""
        return self.half_shift**2 == 2 * self.m + Fraction(1, 4)


def _as_index(idx: HarmonicIndex | int) -> HarmonicIndex:
    return idx if isinstance(idx, HarmonicIndex) else HarmonicIndex(idx)


# ---------------------------------------------------------------------------
# harmonic numbers


def _harmonic_split(a: int, b: int) -> tuple[int, int]:
    """(num, den) with num/den = sum_{k=a}^{b-1} 1/k, not reduced."""
    if b - a == 1:
        return 1, a
    mid = (a + b) // 2
    p1, q1 = _harmonic_split(a, mid)
    p2, q2 = _harmonic_split(mid, b)
    return p1 * q2 + p2 * q1, q1 * q2


@lru_cache(maxsize=4096)
def exact_harmonic(n: int) -> Fraction:
    """H_n = 1 + 1/2 + ... + 1/n in lowest terms."""
    _check_n(n)
    if n > HARMONIC_GUARD:
        raise HarmonicGuardError(
            f"exact H_n refused for n={n} > {HARMONIC_GUARD}; use harmonic_interval"
        )
    num, den = _harmonic_split(1, n + 1)
    return Fraction(num, den)


def harmonic_interval(n: int, precision_bits: int = DEFAULT_PRECISION) -> Interval:
    """Outward-rounded enclosure of H_n by summing 1/k; width <= n ulp."""
    _check_n(n)
    one = 1 << precision_bits
    lo = sum(one // k for k in range(1, n + 1))
    hi = sum(-(-one // k) for k in range(1, n + 1))
    return Interval(HighPrecisionReal(lo, precision_bits), HighPrecisionReal(hi, precision_bits))


# ---------------------------------------------------------------------------
# series pieces


def algebraic_partial_sum(family: Family | str, n: int, r: int) -> Fraction:
    """The exact rational part of the r-term partial sum (no log, no gamma)."""
    family = Family(family)
    _check_n(n)
    _check_r(r)
    if family is Family.EULER:
        return Fraction(1, 2 * n) + sum(
            (euler_coefficient(k) / Fraction(n) ** (2 * k) for k in range(1, r + 1)), Fraction(0)
        )
    if family is Family.DTW:
        x2 = Fraction(2 * n + 1, 2) ** 2
        return sum((d_coefficient(p) / x2**p for p in range(1, r + 1)), Fraction(0))
    m = n * (n + 1) // 2
    return sum((r_closed(p) / Fraction(m) ** p for p in range(1, r + 1)), Fraction(0))


def next_term(family: Family | str, n: int, r: int) -> Fraction:
    """First omitted term, with sign, as an exact rational."""
    family = Family(family)
    _check_n(n)
    _check_r(r)
    if family is Family.EULER:
        return euler_coefficient(r + 1) / Fraction(n) ** (2 * r + 2)
    if family is Family.DTW:
        return d_coefficient(r + 1) / Fraction(2 * n + 1, 2) ** (2 * r + 2)
    m = n * (n + 1) // 2
    return r_closed(r + 1) / Fraction(m) ** (r + 1)


def log_part(family: Family | str, n: int, precision_bits: int = DEFAULT_PRECISION) -> HighPrecisionReal:
    family = Family(family)
    if family is Family.EULER:
        return hp_ln(HighPrecisionReal.from_int(n, precision_bits))
    if family is Family.DTW:
        return hp_ln(rational_to_real(Fraction(2 * n + 1, 2), precision_bits))
    m = n * (n + 1) // 2
    return hp_ln(HighPrecisionReal.from_int(2 * m, precision_bits)).mul(Fraction(1, 2))


def _terms(family: Family, n: int, r: int) -> list[Fraction]:
    if family is Family.EULER:
        return [Fraction(1, 2 * n)] + [euler_coefficient(k) / Fraction(n) ** (2 * k) for k in range(1, r + 1)]
    if family is Family.DTW:
        x2 = Fraction(2 * n + 1, 2) ** 2
        return [d_coefficient(p) / x2**p for p in range(1, r + 1)]
    m = n * (n + 1) // 2
    return [r_closed(p) / Fraction(m) ** p for p in range(1, r + 1)]


# ---------------------------------------------------------------------------
# evaluators


@dataclass(frozen=True)
class ApproxResult:
    family: Family
    n: int
    r: int
    value: HighPrecisionReal
    next_term_bound: HighPrecisionReal
    next_term: Fraction
    precision_bits: int

    def residual(self) -> HighPrecisionReal:
        """H_n - value, with H_n exact and rounded once."""
        return rational_to_real(exact_harmonic(self.n), self.precision_bits) - self.value


def evaluate(
    family: Family | str,
    idx: HarmonicIndex | int,
    r: int,
    gamma: HighPrecisionReal | None = None,
    precision_bits: int = DEFAULT_PRECISION,
) -> ApproxResult:
    family = Family(family)
    n = _as_index(idx).n
    _check_r(r)
    if gamma is None:
        gamma = gamma_value(precision_bits)
    gamma = gamma.with_precision(precision_bits)
    value = log_part(family, n, precision_bits) + gamma
    for term in _terms(family, n, r):  # ascending order
        value = value + rational_to_real(term, precision_bits)
    nxt = next_term(family, n, r)
    return ApproxResult(
        family=family,
        n=n,
        r=r,
        value=value,
        next_term_bound=rational_to_real(abs(nxt), precision_bits, CEILING),
        next_term=nxt,
        precision_bits=precision_bits,
    )


def eval_ramanujan(idx, r, gamma=None, precision_bits=DEFAULT_PRECISION) -> ApproxResult:
    """(1/2) ln(2m) + gamma + sum_{p<=r} R_p / m^p."""
    return evaluate(Family.RAMANUJAN, idx, r, gamma, precision_bits)


def eval_dtw(idx, r, gamma=None, precision_bits=DEFAULT_PRECISION) -> ApproxResult:
    return evaluate(Family.DTW, idx, r, gamma, precision_bits)


def eval_euler(n, K, gamma=None, precision_bits=DEFAULT_PRECISION) -> ApproxResult:
    """K = 0 keeps only ln n + gamma + 1/(2n)."""
    return evaluate(Family.EULER, n, K, gamma, precision_bits)


# ---------------------------------------------------------------------------
# gamma


@dataclass(frozen=True)
class GammaEnclosure:
    interval: Interval
    n_used: int
    r_used: int

    @property
    def lo(self) -> HighPrecisionReal:
        return self.interval.lo

    @property
    def hi(self) -> HighPrecisionReal:
        return self.interval.hi

    def width(self) -> HighPrecisionReal:
        return self.interval.width()

    def midpoint(self) -> HighPrecisionReal:
        return self.interval.midpoint()

    def contains(self, value) -> bool:
        return self.interval.contains(value)


_LN_SLACK_ULP = 2


@lru_cache(maxsize=512)
def _gamma_endpoint(n: int, k: int, precision_bits: int) -> Interval:
    """Enclosure of H_n - ln(n + 1/2) - sum_{p<=k} D_p / (n + 1/2)^(2p)."""
    exact = exact_harmonic(n) - algebraic_partial_sum(Family.DTW, n, k)
    ln_x = hp_ln(rational_to_real(Fraction(2 * n + 1, 2), precision_bits))  # n + 1/2 is dyadic
    ln_lo = HighPrecisionReal(ln_x.mantissa - _LN_SLACK_ULP, precision_bits)
    ln_hi = HighPrecisionReal(ln_x.mantissa + _LN_SLACK_ULP, precision_bits)
    return Interval.from_rational(exact, precision_bits) - Interval(ln_lo, ln_hi)


def _neg_log2(q: Fraction) -> int:
    """Integer near -log2|q| (never more than one too large)."""
    q = abs(q)
    return q.denominator.bit_length() - q.numerator.bit_length() + 1


def gamma_enclosure(n: int, r: int, precision_bits: int = DEFAULT_PRECISION) -> GammaEnclosure:
    """Interval containing gamma, bracketed by the r- and (r+1)-term rearrangements.

    Raises PrecisionError when outward rounding would dominate the width.
    """
    _check_n(n)
    _check_r(r)
    a = _gamma_endpoint(n, r, precision_bits)
    b = _gamma_endpoint(n, r + 1, precision_bits)
    gap = abs(next_term(Family.DTW, n, r))
    slack = a.width().to_fraction() + b.width().to_fraction()
    if gap <= slack:
        raise PrecisionError(
            f"gamma_enclosure(n={n}, r={r}) at {precision_bits} bits is dominated by rounding",
            required_bits=_neg_log2(gap) + 16,
        )
    return GammaEnclosure(Interval.hull(a, b), n, r)


@lru_cache(maxsize=64)
def reference_gamma(precision_bits: int = DEFAULT_PRECISION) -> GammaEnclosure:
    """A tight gamma enclosure at n = 10^4, r chosen so the truncation is sub-ulp."""
    n = GAMMA_REFERENCE_N
    work = precision_bits + 32
    r = 0
    while _neg_log2(next_term(Family.DTW, n, r)) < precision_bits + 8:
        r += 1
    return GammaEnclosure(
        Interval.hull(_gamma_endpoint(n, r, work), _gamma_endpoint(n, r + 1, work)), n, r
    )


@lru_cache(maxsize=64)
def gamma_value(precision_bits: int = DEFAULT_PRECISION) -> HighPrecisionReal:
    """gamma to within 1 ulp at ``precision_bits``."""
    return reference_gamma(precision_bits).midpoint().with_precision(precision_bits)
