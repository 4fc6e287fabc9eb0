"""Exact Bernoulli numbers and half-argument Bernoulli polynomial values.

Convention: B_1 = -1/2 (so that sum_{j=0}^{m} C(m+1, j) B_j = 0 for m >= 1).
"""
from __future__ import annotations

import threading
from fractions import Fraction
from math import comb


class BernoulliCache:
    """Growable table of B_k and B_{2k}(1/2).

    Entries are always filled in index order, whatever order queries arrive
    in.  Growth happens under a lock; reads of already published entries do
    not take it.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._numbers: list[Fraction] = [Fraction(1), Fraction(-1, 2)]
        self._half: list[Fraction] = [Fraction(1)]

    def __len__(self) -> int:
        return len(self._numbers)

    @property
    def numbers(self) -> tuple[Fraction, ...]:
        return tuple(self._numbers)

    @property
    def half_values(self) -> tuple[Fraction, ...]:
        return tuple(self._half)

    def _grow_numbers(self, k: int) -> None:
        with self._lock:
            nums = list(self._numbers)
            for m in range(len(nums), k + 1):
                if m % 2 == 1:
                    nums.append(Fraction(0))
                    continue
                # only B_0, B_1 and even-index terms are nonzero
                s = Fraction(1) + (m + 1) * nums[1]
                for j in range(2, m, 2):
                    s += comb(m + 1, j) * nums[j]
                nums.append(-s / (m + 1))
            self._numbers = nums  # publish the finished table in one step

    def number(self, k: int) -> Fraction:
        if k < 0:
            raise ValueError("Bernoulli index must be >= 0")
        if k >= len(self._numbers):
            self._grow_numbers(k)
        return self._numbers[k]

    def half(self, k: int) -> Fraction:
        """B_{2k}(1/2) = (2**(1-2k) - 1) * B_{2k}."""
        if k < 0:
            raise ValueError("index must be >= 0")
        if k >= len(self._half):
            self.number(2 * k)
            with self._lock:
                half = list(self._half)
                for j in range(len(half), k + 1):
                    half.append((Fraction(2, 4**j) - 1) * self._numbers[2 * j])
                self._half = half
        return self._half[k]


_CACHE = BernoulliCache()


def bernoulli_number(k: int) -> Fraction:
    """Exact B_k from the defining recurrence (memoized)."""
    return _CACHE.number(k)


def bernoulli_half(k: int) -> Fraction:
    """Exact B_{2k}(1/2)."""
    return _CACHE.half(k)


def bernoulli_polynomial(n: int, x: Fraction | int) -> Fraction:
    """B_n(x) = sum_j C(n, j) B_j x**(n-j).

    Only used to cross-check :func:`bernoulli_half`.
    """
    if n < 0:
        raise ValueError("degree must be >= 0")
    x = Fraction(x)
    return sum((comb(n, j) * bernoulli_number(j) * x ** (n - j) for j in range(n + 1)), Fraction(0))


def bernoulli_half_by_polynomial(k: int) -> Fraction:
    return bernoulli_polynomial(2 * k, Fraction(1, 2))
