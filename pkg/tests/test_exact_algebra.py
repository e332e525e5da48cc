import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from newton_places.exact_algebra import (
    T, NFElement, NFPoly, NotInvertibleError, NumberField, RationalPoly,
    discriminant, poly_gcd, radical, rational_roots, resultant, squarefree_profile,
)
from conftest import P

tz = sympy.Symbol("t")

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
polys = st.lists(fractions, min_size=1, max_size=7).map(RationalPoly)
nonzero_polys = polys.filter(lambda f: not f.is_zero())


def to_sympy(f: RationalPoly):
    return sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(f.coeffs)] or [0], tz, domain="QQ")


def from_sympy(g) -> RationalPoly:
    return RationalPoly([Fraction(int(c.p), int(c.q)) for c in reversed(sympy.Poly(g, tz).all_coeffs())])


def sylvester_det(a: RationalPoly, b: RationalPoly) -> Fraction:
    # independent oracle: determinant of the Sylvester matrix
    m, n = a.degree, b.degree
    ca = [sympy.Rational(c.numerator, c.denominator) for c in reversed(a.coeffs)]
    cb = [sympy.Rational(c.numerator, c.denominator) for c in reversed(b.coeffs)]
    rows = [[0] * i + ca + [0] * (n - 1 - i) for i in range(n)]
    rows += [[0] * i + cb + [0] * (m - 1 - i) for i in range(m)]
    return Fraction(str(sympy.Matrix(rows).det()))


# --- basic arithmetic ------------------------------------------------------

def test_zero_polynomial_has_degree_minus_one():
    assert RationalPoly().degree == -1
    assert RationalPoly([0, 0]).is_zero()


def test_trailing_zeros_are_stripped():
    assert RationalPoly([1, 2, 0, 0]) == RationalPoly([1, 2])


@given(polys, polys)
def test_ring_operations_match_sympy(a, b):
    assert to_sympy(a * b) == to_sympy(a) * to_sympy(b)
    assert to_sympy(a + b) == to_sympy(a) + to_sympy(b)
    assert to_sympy(a - b) == to_sympy(a) - to_sympy(b)


@given(polys, nonzero_polys)
def test_division_with_remainder(a, b):
    q, r = divmod(a, b)
    assert q * b + r == a
    assert r.degree < b.degree


def test_exact_div_raises_when_inexact():
    with pytest.raises(ArithmeticError):
        (T ** 2 + 1).exact_div(T - 1)


@given(polys, fractions)
def test_taylor_shift_is_composition(f, a):
    assert f.taylor_shift(a) == f.compose(T + a)


def test_derivative():
    assert P(1, 0, 0, -1).derivative() == P(3, 0, 0)


def test_rendering_uses_parenthesised_fractions():
    assert str(P(2, 0, -1, Fraction(1, 2))) == "2*t^3 - t + (1/2)"
    assert str(RationalPoly()) == "0"


# --- gcd / squarefree / resultant -----------------------------------------

@given(polys, polys, polys)
def test_gcd_matches_sympy(a, b, c):
    a, b = a * c, b * c
    if a.is_zero() and b.is_zero():
        with pytest.raises(ValueError, match="undefined gcd"):
            poly_gcd(a, b)
        return
    g = poly_gcd(a, b)
    assert g.lc == 1
    assert to_sympy(g) == sympy.gcd(to_sympy(a), to_sympy(b)).monic()


@given(st.lists(st.tuples(fractions, st.integers(1, 3)), min_size=1, max_size=4), fractions.filter(bool))
def test_squarefree_profile_matches_sympy(roots, lead):
    f = RationalPoly.constant(lead)
    for q, m in roots:
        f = f * (T - q) ** m
    prof = squarefree_profile(f)
    assert prof.expand() == f
    lc, parts = sympy.sqf_list(to_sympy(f))
    expected = {m: from_sympy(g.as_expr()).monic() for g, m in parts}
    assert {m: g for g, m in prof.parts} == expected
    assert prof.distinct_root_count == len({q for q, _ in roots})
    for q, m in roots:
        assert prof.multiplicity_of(q) == sum(mm for qq, mm in roots if qq == q)


def test_radical_of_planted_profile():
    f = (T - 1) ** 3 * (T + 2) ** 2 * (T ** 2 + 1)
    assert radical(f) == (T - 1) * (T + 2) * (T ** 2 + 1)


@given(nonzero_polys, nonzero_polys)
def test_resultant_matches_sympy(a, b):
    if a.degree < 1 or b.degree < 1:
        return
    assert resultant(a, b) == sylvester_det(a, b)


@given(nonzero_polys)
def test_discriminant_matches_sympy(f):
    if f.degree < 2:
        return
    assert discriminant(f) == Fraction(str(sympy.discriminant(to_sympy(f))))


def test_discriminant_known_values():
    assert discriminant(T ** 3 - 1) == -27
    assert discriminant(T ** 3 - T) == 4


# --- rational roots ---------------------------------------------------------

def test_rational_roots_examples():
    assert rational_roots(T ** 3 - T) == {-1, 0, 1}
    assert rational_roots(T ** 3 - 1) == {1}
    assert rational_roots(2 * T ** 2 - 1) == set()
    assert rational_roots(6 * T ** 2 - 5 * T + 1) == {Fraction(1, 2), Fraction(1, 3)}


def test_rational_roots_evaluate_to_zero_and_non_roots_do_not():
    rng = random.Random(11)
    for _ in range(100):
        roots = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(rng.randint(1, 3))]
        f = RationalPoly.from_roots(roots, lead=rng.randint(1, 4)) * (T ** 2 + rng.randint(1, 6))
        found = rational_roots(f)
        assert found == set(roots)
        assert all(f(q) == 0 for q in found)
        x = Fraction(rng.randint(-50, 50), rng.randint(1, 7))
        if x not in found:
            assert f(x) != 0


# --- number fields ----------------------------------------------------------

def test_number_field_rejects_repeated_factor():
    with pytest.raises(ValueError):
        NumberField((T - 1) ** 2)


def test_nf_inverse_roundtrip():
    K = NumberField(T ** 2 + T + 1)
    rng = random.Random(5)
    w = K.gen
    assert w ** 3 == K.one
    for _ in range(100):
        a = K.element(RationalPoly([Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(2)]))
        b = K.element(RationalPoly([Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(2)]))
        if a.is_zero():
            continue
        assert (a * b) * a.inverse() == b


def test_zero_divisor_surfaces_on_inversion():
    K = NumberField((T - 1) * (T + 1))
    with pytest.raises(NotInvertibleError):
        (K.gen - 1).inverse()


def test_nfpoly_division_by_linear_factor():
    K = NumberField(T ** 2 - 2)
    s = K.gen
    g = NFPoly.lift(K, T ** 2 - 2)
    q, r = g.div_linear(s)
    assert r.is_zero()
    assert q == NFPoly(K, [s, K.one])
