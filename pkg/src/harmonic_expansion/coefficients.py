"""Exact coefficients of the half-integer, triangular-index and Euler series.

Three independent routes produce the coefficient R_p of 1/m**p:

* :func:`r_closed` -- binomial sum over B_{2k}(1/2);
* :func:`r_convolution` -- re-expansion of the half-integer series
  (coefficients D_p in powers of (n+1/2)**-2) in powers of 1/m, plus the
  log term coming from ln(1 + 1/(8m));
* :func:`r_umbral` -- expand ((4B**2 - 1)/8)**p, then substitute
  B**(2j) -> B_{2j}(1/2).

All three must agree exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, lcm
from typing import Callable, Sequence

from .bernoulli import bernoulli_half, bernoulli_number
from .numerics import format_rational


def _require_positive(p: int, name: str = "p") -> None:
    if not isinstance(p, int) or isinstance(p, bool) or p < 1:
        raise ValueError(f"{name} must be a positive integer, got {p!r}")


@lru_cache(maxsize=None)
def d_coefficient(p: int) -> Fraction:
    """D_p = -B_{2p}(1/2) / (2p)."""
    _require_positive(p)
    return -bernoulli_half(p) / (2 * p)


@lru_cache(maxsize=None)
def r_closed(p: int) -> Fraction:
    _require_positive(p)
    bracket = Fraction(1)
    for k in range(1, p + 1):
        bracket += comb(p, k) * (-4) ** k * bernoulli_half(k)
    return Fraction((-1) ** (p - 1), 2 * p * 8**p) * bracket


def log_coefficient(p: int) -> Fraction:
    """Coefficient of 1/m**p in (1/2) ln(1 + 1/(8m))."""
    _require_positive(p)
    return Fraction((-1) ** (p - 1), 2 * p * 8**p)


@lru_cache(maxsize=None)
def reexpansion_coefficient(q: int) -> Fraction:
    """Coefficient of 1/m**q after expanding sum_p D_p / (2m + 1/4)**p in 1/m.

    sum_{s=1}^{q} (D_s / 2**s) (-1)**(q-s) C(q-1, q-s) / 8**(q-s)
    """
    _require_positive(q, "q")
    total = Fraction(0)
    for s in range(1, q + 1):
        total += (
            d_coefficient(s)
            / 2**s
            * (-1) ** (q - s)
            * comb(q - 1, q - s)
            / 8 ** (q - s)
        )
    return total


@lru_cache(maxsize=None)
def r_convolution(p: int) -> Fraction:
    _require_positive(p)
    return log_coefficient(p) + reexpansion_coefficient(p)


@dataclass(frozen=True)
class UmbralPolynomial:
    """sum_j coeffs[j] * B**(2j), kept symbolic until :meth:`substitute`."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coeffs", coeffs or (Fraction(0),))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, j: int) -> Fraction:
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else Fraction(0)

    def __add__(self, other: UmbralPolynomial) -> UmbralPolynomial:
        n = max(len(self.coeffs), len(other.coeffs))
        return UmbralPolynomial(tuple(self[j] + other[j] for j in range(n)))

    def _scaled(self) -> tuple[list[int], int]:
        den = lcm(*(c.denominator for c in self.coeffs))
        return [c.numerator * (den // c.denominator) for c in self.coeffs], den

    def __mul__(self, other: UmbralPolynomial) -> UmbralPolynomial:
        # integer convolution over a common denominator; Fraction sums are slow here
        a, da = self._scaled()
        b, db = other._scaled()
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        den = da * db
        return UmbralPolynomial(tuple(Fraction(c, den) for c in out))

    def __pow__(self, k: int) -> UmbralPolynomial:
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = UmbralPolynomial((Fraction(1),))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def substitute(self, value: Callable[[int], Fraction] = bernoulli_half) -> Fraction:
        """Replace B**(2j) by ``value(j)`` (default B_{2j}(1/2))."""
        return sum((c * value(j) for j, c in enumerate(self.coeffs) if c), Fraction(0))


_UMBRAL_BASE = UmbralPolynomial((Fraction(-1, 8), Fraction(1, 2)))  # (4B^2 - 1)/8


@lru_cache(maxsize=None)
def umbral_expand(p: int) -> UmbralPolynomial:
    _require_positive(p)
    return _UMBRAL_BASE**p


@lru_cache(maxsize=None)
def r_umbral(p: int) -> Fraction:
    _require_positive(p)
    return -umbral_expand(p).substitute() / (2 * p)


@lru_cache(maxsize=None)
def euler_coefficient(k: int) -> Fraction:
    """Coefficient of n**(-2k) in H_n ~ ln n + gamma + 1/(2n) - sum B_2k/(2k n^2k)."""
    _require_positive(k, "k")
    return -bernoulli_number(2 * k) / (2 * k)


@dataclass
class CoefficientTable:
    d: dict[int, Fraction] = field(default_factory=dict)
    r_closed: dict[int, Fraction] = field(default_factory=dict)
    r_conv: dict[int, Fraction] = field(default_factory=dict)
    r_umbral: dict[int, Fraction] = field(default_factory=dict)

    @classmethod
    def build(cls, p_max: int) -> CoefficientTable:
        table = cls()
        for p in range(1, p_max + 1):
            table.d[p] = d_coefficient(p)
            table.r_closed[p] = r_closed(p)
            table.r_conv[p] = r_convolution(p)
            table.r_umbral[p] = r_umbral(p)
        return table

    def disagreements(self) -> list[int]:
        return [
            p
            for p in self.r_closed
            if not (self.r_closed[p] == self.r_conv.get(p) == self.r_umbral.get(p))
        ]

    def dump_lines(self) -> list[str]:
        """Tab-separated ``p  D_p  R_p`` rows."""
        return [
            f"{p}\t{format_rational(self.d[p])}\t{format_rational(self.r_closed[p])}"
            for p in sorted(self.r_closed)
        ]


def coefficient_rows(p_max: int) -> Sequence[tuple[int, Fraction, Fraction]]:
    return [(p, d_coefficient(p), r_closed(p)) for p in range(1, p_max + 1)]
