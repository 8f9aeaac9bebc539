from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from odelin.linalg import SingularSystemError, coordinates, in_span, matvec, nullspace, rank, rref, solve, span_equal

entries = st.fractions(min_value=-4, max_value=4, max_denominator=3)
matrices = st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(entries, min_size=n, max_size=n), min_size=0, max_size=5).map(lambda m: (m, n)))


@given(matrices)
def test_rank_nullity(mn):
    m, n = mn
    ns = nullspace(m, n)
    assert rank(m, n) + len(ns) == n
    for v in ns:
        assert all(x == 0 for x in matvec(m, v))


@given(matrices)
def test_rref_is_idempotent(mn):
    m, n = mn
    red, piv = rref(m, n)
    assert rref(red, n) == (red, piv)


def test_solve_and_errors():
    A = [[2, 1], [1, 3]]
    assert solve(A, [3, 4], 2) == [Fraction(1), Fraction(1)]
    with pytest.raises(SingularSystemError):
        solve([[1, 1], [2, 2]], [1, 3], 2)
    with pytest.raises(SingularSystemError):
        solve([[1, 1]], [1], 2)


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        rank([[1.0, 2]], 2)


def test_span_helpers():
    a = [[1, 0, 1], [0, 1, 1]]
    b = [[1, 1, 2], [1, -1, 0]]
    assert span_equal(a, b, 3)
    assert in_span([2, 3, 5], a, 3) and not in_span([0, 0, 1], a, 3)
    assert coordinates([2, 3, 5], a) == [2, 3]
