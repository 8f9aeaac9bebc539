from fractions import Fraction

from hypothesis import given, strategies as st

from odelin.series import Series2, invert_map

coeff = st.fractions(min_value=-3, max_value=3, max_denominator=4)
series = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coeff, max_size=8).map(lambda d: Series2(d, 3))


@given(series, series, series)
def test_ring_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(series, coeff.filter(lambda x: x != 0))
def test_reciprocal(a, c0):
    s = a - a.const() + c0
    assert s * s.reciprocal() == Series2.constant(Fraction(1), 3)


@given(series, series)
def test_product_rule(a, b):
    for j in (1, 2):
        assert (a * b).deriv(j) == (a.deriv(j) * b + a * b.deriv(j)).truncate(2)


def test_invert_shear():
    x, y = Series2.variable(1, 4), Series2.variable(2, 4)
    g1, g2 = invert_map(x, y + x * x)
    assert g1 == x and g2 == y - x * x
