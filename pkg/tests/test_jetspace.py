import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from odelin.jetspace import (
    JetPoint,
    MultiIndex,
    NotInClassError,
    Section,
    fiber_dimension,
    jet_dimension,
    jet_eval,
    multi_indices,
    project,
    random_jet,
    random_section,
    representative_section,
    rhs_to_section,
)
from odelin.symexpr import Var, add, mul, normalize, parse, power


def section(*texts):
    return Section(tuple(parse(t) for t in texts))


def test_multi_index_append_and_order():
    s = MultiIndex(1, 0).append(2).append(2)
    assert s == (1, 2) and s.order == 3
    assert MultiIndex.of(2, 1, 2) == MultiIndex(1, 2)
    assert len(list(multi_indices(3))) == 10


def test_dimensions():
    assert fiber_dimension(2) == 24
    assert jet_dimension(2) == 26
    assert jet_dimension(2) - 2 == 24


@pytest.mark.parametrize(
    "rhs, expected",
    [
        ("0", ("0", "0", "0", "0")),
        ("6*y^2 + x", ("6*x2^2 + x1", "0", "0", "0")),
        ("p^2/y", ("0", "0", "1/x2", "0")),
        ("x*p^3 - p + exp(y)", ("exp(x2)", "-1", "0", "x1")),
    ],
)
def test_rhs_to_section(rhs, expected):
    S = rhs_to_section(rhs)
    assert tuple(normalize(c) for c in S.u) == tuple(normalize(parse(t)) for t in expected)


@pytest.mark.parametrize("rhs", ["p^4", "1/p", "exp(p)"])
def test_rhs_not_in_class(rhs):
    with pytest.raises(NotInClassError):
        rhs_to_section(rhs)


def test_jet_eval_zero_section():
    theta = jet_eval(Section.zero(), (Fraction(3, 2), -1), 2)
    assert all(v == 0 for v in theta.coords.values())


def test_jet_eval_painleve():
    theta = jet_eval(section("6*x2^2 + x1", "0", "0", "0"), (0, 0), 2)
    nonzero = {k: v for k, v in theta.coords.items() if v}
    assert nonzero == {(0, (1, 0)): 1, (0, (0, 2)): 12}


def test_project_laws(rng):
    S = random_section(rng, 3)
    p = (Fraction(1, 2), Fraction(-1, 3))
    theta = jet_eval(S, p, 3)
    assert project(theta, 3) == theta
    assert project(project(theta, 2), 1) == project(theta, 1)
    for r in range(3):
        assert project(theta, r) == jet_eval(S, p, r)
    with pytest.raises(ValueError):
        project(theta, 4)


def test_json_round_trip(rng):
    for k in range(4):
        theta = random_jet(rng, k)
        data = json.loads(theta.dumps())
        assert JetPoint.from_json(data) == theta
        assert data["coords"][0] == {"i": 0, "sigma": [0, 0], "value": data["coords"][0]["value"]}
        assert isinstance(data["coords"][0]["value"], str)


def test_float_jet_is_flagged():
    theta = jet_eval(section("exp(x1)", "0", "0", "0"), (1, 0), 1)
    assert not theta.is_exact
    with pytest.raises(TypeError):
        representative_section(theta)


def test_representative_of_zero():
    S = representative_section(JetPoint.zero(2, (1, 1)))
    assert all(normalize(c) == normalize(parse("0")) for c in S.u)


def test_representative_round_trip_100_jets():
    rng = random.Random(3)
    for n in range(100):
        theta = random_jet(rng, n % 4)
        assert jet_eval(representative_section(theta), theta.base, theta.order) == theta


def test_representatives_differ_above_order(rng):
    theta = random_jet(rng, 2)
    S = representative_section(theta)
    dx = add(Var("x1"), -theta.base[0])
    bumped = Section(tuple(add(c, mul(5, power(dx, 3))) for c in S.u))
    assert jet_eval(bumped, theta.base, 2) == theta
    assert jet_eval(bumped, theta.base, 3) != jet_eval(S, theta.base, 3)


@given(st.integers(0, 10_000), st.integers(1, 3))
def test_jet_eval_commutes_with_project(seed, k):
    r = random.Random(seed)
    S = random_section(r, 3)
    p = (Fraction(r.randint(-4, 4), 3), Fraction(r.randint(-4, 4), 3))
    assert project(jet_eval(S, p, k), k - 1) == jet_eval(S, p, k - 1)
