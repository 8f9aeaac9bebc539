import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from odelin.fieldlift import (
    BaseMismatchError,
    InsufficientOrderError,
    PolynomialField,
    VectorFieldJet,
    bracket,
    bracket_field,
    flow_oracle,
    lift_field,
    psi,
    total_derivative_psi,
)
from odelin.jetspace import JetPoint, Section, jet_eval, random_jet, random_polynomial, random_section
from odelin.pointmap import PointTransform, lift_jet
from odelin.symexpr import add, mul, normalize, parse


def field_jet(X1, X2, p=(0, 0), m=3):
    return VectorFieldJet.from_field(X1, X2, p, m)


def rand_field_jet(r, m, base=(0, 0)):
    return VectorFieldJet(m, base, {(i, t): Fraction(r.randint(-5, 5), r.randint(1, 4)) for i in (1, 2) for t in _idx(m)})


def _idx(m):
    from odelin.jetspace import multi_indices

    return list(multi_indices(m))


def test_psi_of_zero_field(rng):
    assert tuple(psi(VectorFieldJet.zero(2), random_jet(rng, 1, base=(0, 0)))) == (0, 0, 0, 0)


def test_psi_of_translation(rng):
    theta = random_jet(rng, 1, base=(0, 0))
    v = psi(field_jet("1", "0", m=2), theta)
    assert tuple(v) == tuple(-theta.u(i, 1, 0) for i in range(4))


def test_psi_of_x2_11(rng):
    theta = random_jet(rng, 1, base=(0, 0))
    X = VectorFieldJet(2, (0, 0), {(2, (2, 0)): 1})
    assert tuple(psi(X, theta)) == (1, 0, 0, 0)


def test_psi_printed_rows():
    # psi^0 and psi^3 read term by term
    theta = JetPoint(1, (0, 0), {(0, (0, 0)): 2, (1, (0, 0)): 3, (2, (0, 0)): 5, (3, (0, 0)): 7})
    cases = {
        ((1, (1, 0)),): (-4, None, None, 7),
        ((2, (0, 1)),): (2, None, None, -14),
        ((2, (1, 0)),): (-3, None, None, None),
        ((1, (0, 1)),): (None, None, None, -5),
        ((1, (0, 2)),): (0, None, None, -1),
    }
    for keys, expected in cases.items():
        X = VectorFieldJet(2, (0, 0), {k: 1 for k in keys})
        got = psi(X, theta)
        for i, e in enumerate(expected):
            if e is not None:
                assert got[i] == e, (keys, i)


def test_base_mismatch():
    with pytest.raises(BaseMismatchError):
        psi(VectorFieldJet.zero(2, (1, 0)), JetPoint.zero(1))
    with pytest.raises(InsufficientOrderError):
        total_derivative_psi(VectorFieldJet.zero(2), JetPoint.zero(2), (1, 0))


def test_flow_oracle_zero_field():
    v = flow_oracle(PolynomialField("0", "0"), Section((parse("x1"), parse("0"), parse("0"), parse("0"))), (0, 0))
    assert tuple(v) == (0, 0, 0, 0)


def test_flow_oracle_translation():
    v = flow_oracle(PolynomialField("1", "0"), Section((parse("x1"), parse("0"), parse("0"), parse("0"))), (0, 0))
    assert tuple(v) == pytest.approx((-1, 0, 0, 0), abs=1e-9)


@pytest.mark.parametrize("X1, X2, expected", [("x1", "0", 1), ("0", "x2", -2)])
def test_psi3_signs_against_flow(X1, X2, expected):
    S = Section((parse("0"), parse("0"), parse("0"), parse("1")))
    field = PolynomialField(X1, X2)
    exact = psi(field.jet((0, 0), 2), jet_eval(S, (0, 0), 1))
    assert exact[3] == expected
    assert flow_oracle(field, S, (0, 0))[3] == pytest.approx(expected, abs=1e-8)


def test_psi_matches_flow_on_random_cases():
    r = random.Random(12)
    for _ in range(10):
        field = PolynomialField(random_polynomial(r, 2), random_polynomial(r, 2))
        S = random_section(r, 2)
        p = (Fraction(r.randint(-2, 2), 4), Fraction(r.randint(-2, 2), 4))
        exact = psi(field.jet(p, 2), jet_eval(S, p, 1))
        approx = flow_oracle(field, S, p, dt=1e-3)
        assert all(abs(float(a) - b) < 1e-5 for a, b in zip(exact, approx))


def test_total_derivative_empty_sigma_is_psi(rng):
    X = rand_field_jet(rng, 3)
    theta = random_jet(rng, 2, base=(0, 0))
    assert total_derivative_psi(X, theta, (0, 0)) == tuple(psi(X, theta))


def test_d1_psi0_for_translation():
    S = Section((parse("x1^3 - x1*x2 + 2*x2^2"), parse("x1^2"), parse("0"), parse("x2")))
    p = (Fraction(1, 2), Fraction(-1, 3))
    theta = jet_eval(S, p, 2)
    d = total_derivative_psi(field_jet("1", "0", p, 3), theta, (1, 0))
    assert d[0] == -theta.u(0, 2, 0)
    assert d == tuple(-theta.u(i, 2, 0) for i in range(4))


def test_total_derivative_against_finite_differences():
    r = random.Random(13)
    h = 1e-4
    for _ in range(10):
        field = PolynomialField(random_polynomial(r, 3), random_polynomial(r, 3))
        S = random_section(r, 3)
        p = (Fraction(r.randint(-4, 4), 4), Fraction(r.randint(-4, 4), 4))
        theta = jet_eval(S, p, 2)
        X = field.jet(p, 3)

        def along(q):
            return psi(field.jet(q, 2), jet_eval(S, q, 1))

        for j, sigma in ((0, (1, 0)), (1, (0, 1))):
            qp, qm = [float(p[0]), float(p[1])], [float(p[0]), float(p[1])]
            qp[j] += h
            qm[j] -= h
            fd = [(a - b) / (2 * h) for a, b in zip(along(qp), along(qm))]
            exact = total_derivative_psi(X, theta, sigma)
            assert all(abs(float(e) - f) < 1e-5 for e, f in zip(exact, fd))


def test_lift_of_zero_field(rng):
    v = lift_field(VectorFieldJet.zero(3), random_jet(rng, 2, base=(0, 0)))
    assert v.dx == (0, 0) and all(c == 0 for c in v.du.values())


def test_translation_invariant_section_has_no_vertical_motion():
    S = Section((parse("x2^2"), parse("1 - x2"), parse("x2^3"), parse("0")))
    theta = jet_eval(S, (Fraction(2), Fraction(1, 3)), 3)
    v = lift_field(field_jet("1", "0", theta.base, 4), theta, 2)
    assert all(c == 0 for c in v.du.values())
    assert v.dx == (1, 0)


def test_lift_field_orders_are_consistent(rng):
    X = rand_field_jet(rng, 4)
    theta = random_jet(rng, 3, base=(0, 0))
    hi = lift_field(X, theta, 2)
    lo = lift_field(X.truncate(3), JetPoint(2, (0, 0), {c: v for c, v in theta.coords.items() if c[1].order <= 2}), 1)
    assert lo.dx == hi.dx
    assert all(hi.du[c] == v for c, v in lo.du.items())


def test_lift_field_decomposition(rng):
    X = rand_field_jet(rng, 3)
    theta = random_jet(rng, 2, base=(0, 0))
    v = lift_field(X, theta, 1)
    for (i, s), h in v.horizontal().items():
        assert h == X.X(1) * theta.coords[(i, s.append(1))] + X.X(2) * theta.coords[(i, s.append(2))]


def _near_identity(field_exprs, t):
    # id + tX + t^2/2 X.grad(X): agrees with the flow of X to second order in t
    X1, X2 = field_exprs
    sq = bracket_field_half(X1, X2)
    x1, x2 = parse("x1"), parse("x2")
    return PointTransform(
        normalize(add(x1, mul(t, X1), mul(t * t / 2, sq[0]))), normalize(add(x2, mul(t, X2), mul(t * t / 2, sq[1])))
    )


def bracket_field_half(X1, X2):
    from odelin.jetspace import _partial

    return tuple(
        add(mul(X1, _partial(c, 1, 0)), mul(X2, _partial(c, 0, 1))) for c in (X1, X2)
    )


def test_lift_field_matches_lifted_flow():
    r = random.Random(14)
    t = Fraction(1, 1000)
    k = 1
    for _ in range(10):
        field = PolynomialField(random_polynomial(r, 2), random_polynomial(r, 2))
        S = random_section(r, 2)
        p = (Fraction(r.randint(-2, 2), 4), Fraction(r.randint(-2, 2), 4))
        theta = jet_eval(S, p, k)
        g = {s: lift_jet(_near_identity(field.exprs, s * t), theta) for s in (1, -1, 2, -2)}

        def stencil(get):
            return (8 * (get(g[1]) - get(g[-1])) - (get(g[2]) - get(g[-2]))) / (12 * t)

        v = lift_field(field.jet(p, k + 2), jet_eval(S, p, k + 1), k)
        for j in range(2):
            assert abs(float(stencil(lambda th: th.base[j]) - v.dx[j])) < 1e-5
        for c, val in v.du.items():
            assert abs(float(stencil(lambda th: th.coords[c]) - val)) < 1e-5


def test_bracket_examples():
    X = field_jet("1", "0")
    Y = field_jet("x1", "0")
    assert bracket(X, Y) == field_jet("1", "0", m=2)
    assert bracket(Y, Y) == VectorFieldJet.zero(2)


def test_bracket_matches_symbolic_field(rng):
    p = (Fraction(1, 3), Fraction(-1, 2))
    A = PolynomialField(random_polynomial(rng, 3), random_polynomial(rng, 3))
    B = PolynomialField(random_polynomial(rng, 3), random_polynomial(rng, 3))
    assert bracket(A.jet(p, 4), B.jet(p, 4)) == bracket_field(A, B).jet(p, 3)


@given(st.integers(0, 10_000), st.integers(2, 4))
def test_bracket_antisymmetry_and_jacobi(seed, m):
    r = random.Random(seed)
    X, Y, Z = (rand_field_jet(r, m) for _ in range(3))
    neg = bracket(Y, X)
    assert bracket(X, Y).coeffs == {c: -v for c, v in neg.coeffs.items()}
    total = {}
    for a, b, c in ((X, Y, Z), (Y, Z, X), (Z, X, Y)):
        for key, v in bracket(a, bracket(b, c)).coeffs.items():
            total[key] = total.get(key, 0) + v
    assert all(v == 0 for v in total.values())


def test_vector_field_json_round_trip(rng):
    X = rand_field_jet(rng, 3, base=(Fraction(1, 2), 2))
    assert VectorFieldJet.from_json(X.to_json()) == X
    assert {c["i"] for c in X.to_json()["coords"]} == {1, 2}
