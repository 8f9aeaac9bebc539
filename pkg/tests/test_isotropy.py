import random
from fractions import Fraction

import pytest

from odelin.fieldlift import bracket
from odelin.isotropy import (
    GradeCompatibilityError,
    ambient_dimension,
    full_grade,
    isotropy_algebra,
    isotropy_space,
    isotropy_system,
    prolong,
    spencer_complex,
    symbol_complex,
    symbol_g,
    zero_grade,
)
from odelin.jetspace import JetPoint, Section, jet_dimension, jet_eval, project, random_jet
from odelin.symexpr import parse


def test_unknown_ordering_is_stable():
    names = isotropy_system(JetPoint.zero(0), 0, 1).to_json()["unknowns"]
    assert names == ["X1_1_0", "X1_0_1", "X1_2_0", "X1_1_1", "X1_0_2", "X2_1_0", "X2_0_1", "X2_2_0", "X2_1_1", "X2_0_2"]


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_zero_jet_dimensions(k):
    # the flat equation: 6-dimensional isotropy, 8-dimensional isotropy space (sl(3) has dimension 8)
    assert isotropy_algebra(JetPoint.zero(k)).dim == 6
    assert isotropy_space(JetPoint.zero(k + 1)).dim == 8


def test_zero_jet_rank_of_second_order_equations():
    sysm = isotropy_system(JetPoint.zero(0), 0, 1)
    assert sysm.rank() == 4


def test_generic_jet_dimensions():
    r = random.Random(1)
    got = []
    for k in range(4):
        theta = random_jet(r, k + 1)
        got.append((isotropy_algebra(project(theta, k)).dim, isotropy_space(theta).dim))
    assert got == [(6, 8), (6, 8), (4, 6), (0, 2)]


def test_first_order_part_of_isotropy_is_full(rng):
    for _ in range(10):
        g = isotropy_algebra(random_jet(rng, 0))
        assert g.project(1).dim == 4


def test_containment_projection_and_horizontal_complement(rng):
    for _ in range(10):
        theta2 = random_jet(rng, 2)
        theta1 = project(theta2, 1)
        g0, g1 = isotropy_algebra(project(theta2, 0)), isotropy_algebra(theta1)
        A1, A2 = isotropy_space(theta1), isotropy_space(theta2)
        assert A1.contains_space(g0) and A2.contains_space(g1)
        assert A2.project(2).same_span(A1)
        assert A1.dim == g0.dim + 2
        assert A1.project(0).dim == 2


def test_projection_of_higher_isotropy_space(rng):
    theta3 = random_jet(rng, 3)
    assert isotropy_space(project(theta3, 2)).contains_space(isotropy_space(theta3).project(3))


def test_bracket_closure(rng):
    for _ in range(3):
        theta2 = random_jet(rng, 2)
        A2, A1 = isotropy_space(theta2), isotropy_space(project(theta2, 1))
        fs = A2.fields()
        assert all(A1.contains(bracket(X, Y)) for a, X in enumerate(fs) for Y in fs[a + 1 :])


def test_isotropy_of_a_section_jet_is_exact():
    S = Section((parse("6*x2^2 + x1"), parse("0"), parse("0"), parse("0")))
    theta = jet_eval(S, (0, 0), 2)
    assert isotropy_algebra(theta).dim == 4


def test_float_jets_are_rejected():
    with pytest.raises(TypeError):
        isotropy_algebra(JetPoint(0, (0, 0), {(0, (0, 0)): 0.5}))


def test_symbol():
    g = symbol_g()
    assert g.dim == 2
    e1 = dict(zip(g.coords, g.vectors[0]))
    assert {(i, tuple(t)): v for (i, t), v in e1.items() if v} == {(1, (2, 0)): 2, (2, (1, 1)): 1}
    e2 = dict(zip(g.coords, g.vectors[1]))
    assert {(i, tuple(t)): v for (i, t), v in e2.items() if v} == {(2, (0, 2)): 2, (1, (1, 1)): 1}
    for v in g.vectors:
        X = dict(((i, tuple(t)), x) for (i, t), x in zip(g.coords, v))
        assert X[(2, (2, 0))] == 0 and X[(1, (0, 2))] == 0
        assert X[(1, (2, 0))] - 2 * X[(2, (1, 1))] == 0
        assert 2 * X[(1, (1, 1))] - X[(2, (0, 2))] == 0


def test_symbol_is_independent_of_the_zero_jet(rng):
    ref = symbol_g()
    for _ in range(10):
        assert symbol_g(random_jet(rng, 0)).same_span(ref)


def test_symbol_is_second_order_part_of_isotropy(rng):
    theta0 = random_jet(rng, 0)
    g = isotropy_algebra(theta0)
    # kernel of the projection to first order is the symbol
    assert g.dim - g.project(1).dim == 2
    assert g.contains_space(symbol_g())


def test_prolongations():
    assert prolong(symbol_g()).dim == 0
    assert prolong(full_grade(1)).dim == 6
    assert prolong(zero_grade(2)).dim == 0


def test_spencer_report():
    rep = symbol_complex()
    assert rep.dims == (0, 4, 4)
    assert rep.d1_injective
    assert rep.cohomology["H^1,2"] == 0
    assert rep.d0 == ((), (), (), ())
    assert [list(map(str, r)) for r in rep.d1] == [["0", "2", "-1", "0"], ["0", "0", "0", "1"], ["-1", "0", "0", "0"], ["0", "1", "-2", "0"]]


def test_full_complex_is_a_complex():
    rep = spencer_complex([full_grade(3), full_grade(2), full_grade(1)])
    assert rep.composite_is_zero()
    assert rep.dims == (8, 12, 4)


def test_grade_compatibility_is_checked():
    with pytest.raises(GradeCompatibilityError):
        spencer_complex([full_grade(3), symbol_g(), full_grade(1)])
    with pytest.raises(GradeCompatibilityError):
        spencer_complex([full_grade(2), full_grade(2), full_grade(1)])


def test_dimension_bookkeeping():
    assert ambient_dimension(4) == 30
    assert ambient_dimension(4) - isotropy_algebra(JetPoint.zero(2)).dim == jet_dimension(2) - 2 == 24
    assert isotropy_algebra(JetPoint.zero(1)).dim == isotropy_algebra(JetPoint.zero(2)).dim == 6
