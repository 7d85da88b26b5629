from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kmcf.errors import NonPolynomial, NonUnitConstantTerm
from kmcf.series import ONE, Q, ZERO, IntLaurent, IntSeries

coeff_maps = st.dictionaries(st.integers(-4, 8), st.integers(-50, 50), max_size=6)
laurents = coeff_maps.map(IntLaurent)
polys = st.lists(st.integers(-20, 20), max_size=6).map(IntLaurent.from_list)


def test_canonical_string_is_ascending():
    p = IntLaurent.from_list([0, -2, 3, -1])
    assert str(p) == "-2*q+3*q^2-q^3"
    assert str(ZERO) == "0"
    assert str(IntLaurent({-1: 1, 0: -4})) == "q^-1-4"


def test_no_stored_zeros():
    p = IntLaurent({0: 0, 2: 3})
    assert p.items() == [(2, 3)]
    assert (p - p).is_zero()


def test_evaluation_with_negative_powers():
    p = IntLaurent({-2: 4, 1: 1})
    assert p(2) == 3
    assert p(Fraction(1, 2)) == Fraction(33, 2)


def test_divmod_by_one_plus_q():
    quo, rem = (Q - Q**3).divmod(ONE + Q)
    assert quo == Q - Q**2 and rem.is_zero()
    _, rem = (ONE + Q**2).divmod(ONE + Q)
    assert rem == 2


def test_require_polynomial_rejects_negative_powers():
    with pytest.raises(NonPolynomial):
        IntLaurent({-1: 1}).require_polynomial()


def test_big_integers_do_not_overflow():
    p = IntLaurent.const(3**80) * IntLaurent.const(5**90)
    assert p[0] == 3**80 * 5**90


@given(laurents, laurents, laurents)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == ZERO


@given(polys, st.integers(0, 3))
def test_divmod_reconstructs(p, k):
    divisor = (ONE + Q) ** k
    quo, rem = p.divmod(divisor)
    assert quo * divisor + rem == p
    assert rem.degree < divisor.degree or rem.is_zero()


@given(laurents, st.integers(-3, 3))
def test_shift_is_multiplication_by_monomial(p, k):
    assert p.shift(k) == p * IntLaurent.monomial(k)


@given(st.lists(st.integers(-9, 9), min_size=1, max_size=8), st.sampled_from([1, -1]), st.integers(0, 9))
def test_series_inverse(tail, unit, prec):
    s = IntSeries([unit] + tail, prec)
    assert s * s.inverse() == IntSeries([1], prec)


def test_series_inverse_needs_unit():
    with pytest.raises(NonUnitConstantTerm):
        IntSeries([2, 1], 4).inverse()


def test_series_arithmetic_keeps_min_precision():
    a = IntSeries([1, 1, 1, 1], 3)
    b = IntSeries([1, -1], 5)
    assert (a * b).prec == 3
    assert (a + b).prec == 3
    assert a * b == IntSeries([1, 0, 0, 0], 3)


def test_series_compares_to_polynomial_mod_precision():
    s = IntSeries([0, 1, -2, 1], 6)
    assert s == Q - 2 * Q**2 + Q**3
    assert s != Q
    assert IntSeries([1, 2], 1) == ONE + 2 * Q + 7 * Q**5
    assert str(s) == "q-2*q^2+q^3+O(q^7)"


def test_geometric_series():
    inv = IntSeries.from_laurent(ONE - 2 * Q, 6).inverse()
    assert inv.coeffs == (1, 2, 4, 8, 16, 32, 64)
