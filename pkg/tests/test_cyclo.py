from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from erskit.cyclo import Cyc, ONE, ZERO, SQRT2, SQRT_M1, ZETA24, exp_pi_i_over

rationals = st.fractions(
    min_value=-20, max_value=20, max_denominator=6
)
elements = st.builds(Cyc, st.lists(rationals, min_size=8, max_size=8))


def test_constants():
    assert SQRT2 * SQRT2 == Cyc.from_rational(2)
    assert SQRT_M1 * SQRT_M1 == Cyc.from_rational(-1)
    assert ZETA24 ** 24 == ONE
    assert ZETA24 ** 12 == -ONE
    # primitive: no smaller power hits 1
    assert all(ZETA24 ** n != ONE for n in range(1, 24))


def test_exp_pi_i_over():
    assert exp_pi_i_over(1) == -ONE
    assert exp_pi_i_over(2) == SQRT_M1
    assert exp_pi_i_over(3) ** 3 == -ONE
    assert exp_pi_i_over(4) ** 2 == SQRT_M1
    assert exp_pi_i_over(4) == (ONE + SQRT_M1) / SQRT2


def test_rational_detection():
    assert (SQRT2 ** 2).is_rational()
    assert (SQRT2 ** 2).rational_value() == 2
    assert not SQRT2.is_rational()
    assert Cyc.from_rational(Fraction(3, 7)).rational_value() == Fraction(3, 7)


def test_mixed_arithmetic_with_fractions():
    assert Fraction(1, 2) + SQRT2 - SQRT2 == Cyc.from_rational(Fraction(1, 2))
    assert 3 * SQRT_M1 == SQRT_M1 + SQRT_M1 + SQRT_M1
    assert (2 * ONE) / 2 == ONE


def test_negative_powers():
    z = ZETA24
    assert z ** -1 == z ** 23
    assert (SQRT2 ** -2) == Cyc.from_rational(Fraction(1, 2))


@settings(max_examples=40)
@given(elements, elements, elements)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + ZERO == a
    assert a * ONE == a


@settings(max_examples=40)
@given(elements)
def test_field_inverse(a):
    if a.is_zero():
        with pytest.raises(ZeroDivisionError):
            a.inverse()
    else:
        assert a * a.inverse() == ONE


@given(elements)
def test_serialize_roundtrip(a):
    assert Cyc(Fraction(s) for s in a.serialize()) == a


@given(elements, elements)
def test_hash_consistency(a, b):
    if a == b:
        assert hash(a) == hash(b)
