import random
from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from odelin.symexpr import Var, add, div, exp, mul, power, sin

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

small_fractions = st.fractions(min_value=-3, max_value=3, max_denominator=6)


def _leaf():
    return st.one_of(
        st.sampled_from([Var("x1"), Var("x2")]),
        small_fractions.map(lambda c: add(c)),
    )


def _extend(children):
    return st.one_of(
        st.tuples(children, children).map(lambda t: add(*t)),
        st.tuples(children, children).map(lambda t: mul(*t)),
        st.tuples(children, st.integers(0, 3)).map(lambda t: power(*t)),
        children.map(exp),
        children.map(sin),
    )


expressions = st.recursive(_leaf(), _extend, max_leaves=6)


def _poly_extend(children):
    return st.one_of(
        st.tuples(children, children).map(lambda t: add(*t)),
        st.tuples(children, children).map(lambda t: mul(*t)),
    )


polynomials = st.recursive(_leaf(), _poly_extend, max_leaves=8)
rational_functions = st.tuples(polynomials, polynomials).map(lambda t: div(t[0], add(mul(t[1], t[1]), 1)))


@pytest.fixture
def rng():
    return random.Random(20240601)


def frac(s):
    return Fraction(s)
