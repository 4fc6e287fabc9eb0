from fractions import Fraction

import pytest
import sympy

from harmonic_expansion.bernoulli import bernoulli_half
from harmonic_expansion.coefficients import (
    CoefficientTable,
    UmbralPolynomial,
    d_coefficient,
    euler_coefficient,
    r_closed,
    r_convolution,
    r_umbral,
    umbral_expand,
)

R_TABLE_9 = [
    Fraction(1, 12),
    Fraction(-1, 120),
    Fraction(1, 630),
    Fraction(-1, 1680),
    Fraction(1, 2310),
    Fraction(-191, 360360),
    Fraction(29, 30030),
    Fraction(-2833, 1166880),
    Fraction(140051, 17459442),
]


def _sympy_r_coefficients(order):
    """Coefficients of u^p in (1/2)log(1 + u/8) + sum_p D_p (u/2)^p (1 + u/8)^-p, via sympy.

    Writing (n + 1/2)^2 = 2m(1 + 1/(8m)) with u = 1/m turns the half-integer
    series into a power series in u; sympy does the expansion.
    """
    u = sympy.symbols("u")
    expr = sympy.log(1 + u / 8) / 2
    for p in range(1, order + 1):
        d = sympy.Rational(d_coefficient(p).numerator, d_coefficient(p).denominator)
        expr += d * (u / 2) ** p * (1 + u / 8) ** (-p)
    poly = sympy.series(expr, u, 0, order + 1).removeO()
    return [Fraction(str(poly.coeff(u, p))) for p in range(1, order + 1)]


@pytest.mark.parametrize(
    "p, expected", [(1, Fraction(1, 24)), (2, Fraction(-7, 960)), (3, Fraction(31, 8064))]
)
def test_d_values(p, expected):
    assert d_coefficient(p) == expected


def test_d_signs_alternate():
    assert all((-1) ** (p - 1) * d_coefficient(p) > 0 for p in range(1, 51))


def test_first_nine_reproduced():
    assert [r_closed(p) for p in range(1, 10)] == R_TABLE_9


@pytest.mark.parametrize("route", [r_closed, r_convolution, r_umbral])
@pytest.mark.parametrize("p, expected", [(1, Fraction(1, 12)), (2, Fraction(-1, 120))])
def test_each_route_small_p(route, p, expected):
    assert route(p) == expected


def test_convolution_p1_by_hand():
    # log term 1/16 plus D_1/2 = 1/48
    assert Fraction(1, 16) + d_coefficient(1) / 2 == r_convolution(1)


def test_three_routes_agree():
    for p in range(1, 51):
        assert r_closed(p) == r_convolution(p) == r_umbral(p), p
        assert r_closed(p) != 0


def test_against_sympy_series():
    assert _sympy_r_coefficients(12) == [r_closed(p) for p in range(1, 13)]


def test_r_signs():
    # alternation is the pattern of the first nine; checked (not assumed) to p = 30
    assert all((-1) ** (p - 1) * r_closed(p) > 0 for p in range(1, 31))


class TestUmbral:
    def test_p1(self):
        assert umbral_expand(1).coeffs == (Fraction(-1, 8), Fraction(1, 2))

    def test_p2_is_square(self):
        assert umbral_expand(2).coeffs == (Fraction(1, 64), Fraction(-1, 8), Fraction(1, 4))

    def test_p3_leading(self):
        assert umbral_expand(3)[3] == Fraction(1, 8)

    def test_substitution_after_multiplication(self):
        # substituting before squaring gives a different (wrong) number
        base = umbral_expand(1)
        early = base.substitute() ** 2
        late = (base * base).substitute()
        assert late == umbral_expand(2).substitute()
        assert early != late

    def test_p1_substitution_by_hand(self):
        value = Fraction(-1, 8) * 1 + Fraction(1, 2) * Fraction(-1, 12)
        assert -value / 2 == r_umbral(1) == Fraction(1, 12)

    def test_substitute_is_linear(self):
        a = UmbralPolynomial((Fraction(1), Fraction(2, 3), Fraction(-5)))
        b = UmbralPolynomial((Fraction(-7), Fraction(0), Fraction(1, 9), Fraction(4)))
        assert (a + b).substitute() == a.substitute() + b.substitute()
        assert a.substitute(lambda j: Fraction(j + 1)) == 1 + Fraction(4, 3) - 15

    def test_binomial_coefficients(self):
        from math import comb

        for p in (5, 11):
            poly = umbral_expand(p)
            for j in range(p + 1):
                assert poly[j] == Fraction(comb(p, j) * 4**j * (-1) ** (p - j), 8**p)


@pytest.mark.parametrize(
    "k, expected", [(1, Fraction(-1, 12)), (2, Fraction(1, 120)), (3, Fraction(-1, 252))]
)
def test_euler_coefficients(k, expected):
    assert euler_coefficient(k) == expected


def test_euler_against_sympy():
    for k in range(1, 15):
        b = sympy.bernoulli(2 * k)
        assert euler_coefficient(k) == -Fraction(b.p, b.q) / (2 * k)


def test_table_dump():
    table = CoefficientTable.build(3)
    assert table.disagreements() == []
    assert table.dump_lines()[:2] == ["1\t1/24\t1/12", "2\t-7/960\t-1/120"]


def test_half_values_feed_d():
    assert d_coefficient(4) == -bernoulli_half(4) / 8


@pytest.mark.parametrize("fn", [d_coefficient, r_closed, r_convolution, r_umbral, umbral_expand, euler_coefficient])
def test_rejects_non_positive(fn):
    with pytest.raises(ValueError):
        fn(0)
