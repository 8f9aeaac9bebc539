import json
import random
from fractions import Fraction

import pytest

from odelin.fieldlift import VectorFieldJet
from odelin.isotropy import isotropy_space, symbol_g
from odelin.jetspace import JetPoint, MultiIndex, Section, jet_eval, project, random_jet, random_section, rhs_to_section
from odelin.obstruction import (
    CALIBRATION,
    FRAME1_TEMPLATE,
    HorizontalFrame,
    Linearizability,
    ObstructionValue,
    affine_tensor_law,
    frame_bracket,
    horizontal_frame_1,
    horizontal_frame_2,
    invariance_check,
    linearizable,
    obstruction_at,
    obstruction_form,
)
from odelin.pointmap import PointTransform, lift_jet, pushforward_equation, random_affine, random_tame_transform
from odelin.symexpr import Const, ZeroTestConfig, ZeroTestInconclusive, evaluate, parse


def jet1(**values):
    coords = {}
    for name, v in values.items():
        i, r1, r2 = (int(c) for c in name[1:].split("_"))
        coords[(i, (r1, r2))] = v
    return JetPoint(1, (0, 0), coords)


def section(*texts):
    return Section(tuple(parse(t) for t in texts))


def test_frame_of_zero_jet():
    H = horizontal_frame_1(JetPoint.zero(1))
    assert all(v == 0 for v in H.coeffs.values())


def test_frame_for_u0_1():
    H = horizontal_frame_1(jet1(u0_1_0=5))
    nonzero = {k: v for k, v in H.coeffs.items() if v}
    assert nonzero == {(2, MultiIndex(2, 0), 1): 5}


def test_printed_entry_leaves_the_isotropy_space():
    # the entry f^2_{12,2} = f^2_{22,1} = (2 u^1_2 - u^0_1)/3 (which would give -5/3 here)
    # does not solve the isotropy equations; (2 u^1_2 - u^2_1)/3 does
    theta = jet1(u0_1_0=5)
    A = isotropy_space(theta)
    good = horizontal_frame_1(theta)
    assert all(A.contains(good.vector(r)) for r in (1, 2))
    printed = dict(good.coeffs)
    printed[(2, MultiIndex(1, 1), 2)] = Fraction(-5, 3)
    printed[(2, MultiIndex(0, 2), 1)] = Fraction(-5, 3)
    bad = HorizontalFrame(1, (0, 0), printed)
    assert not A.contains(bad.vector(1)) and not A.contains(bad.vector(2))


def test_printed_entries_all_match_except_one():
    theta = jet1(u0_1_0=1, u1_0_1=1, u2_1_0=1)
    env = theta.env()
    assert FRAME1_TEMPLATE[(2, MultiIndex(1, 1), 2)].evaluate(env) == Fraction(1, 3)  # (2 - 1)/3


def test_frame_routes_agree_on_random_jets():
    r = random.Random(21)
    for _ in range(50):
        theta = random_jet(r, 1)
        H = horizontal_frame_1(theta, route="both")
        assert H.symmetric()
        A = isotropy_space(theta)
        for k in (1, 2):
            v = H.vector(k)
            assert A.contains(v)
            assert (v.X(1), v.X(2)) == ((1, 0) if k == 1 else (0, 1))


def test_level_two_frame(rng):
    for _ in range(10):
        theta = random_jet(rng, 2)
        H = horizontal_frame_2(theta)
        assert H.project(1).coeffs == horizontal_frame_1(theta).coeffs
        A = isotropy_space(theta)
        assert all(A.contains(H.vector(k)) for k in (1, 2))


def test_calibration_is_jet_independent():
    r = random.Random(22)
    seen = set()
    for _ in range(50):
        theta = random_jet(r, 2)
        H = horizontal_frame_2(theta)
        raw1 = Fraction(1, 2) * (H.f(1, (3, 0), 2) - H.f(1, (2, 1), 1))
        raw2 = Fraction(1, 2) * (H.f(2, (1, 2), 2) - H.f(2, (0, 3), 1))
        closed = obstruction_at(theta, route="closed")
        for raw, F in ((raw1, closed.F1), (raw2, closed.F2)):
            if raw:
                seen.add(F / raw)
            else:
                assert F == 0
    assert seen == {CALIBRATION} == {3}


def test_frame_bracket_is_the_obstruction(rng):
    for _ in range(10):
        theta = random_jet(rng, 2)
        F = obstruction_at(theta)
        br = frame_bracket(horizontal_frame_2(theta))
        t = F.tensor()
        assert {c: CALIBRATION * v for c, v in br.coeffs.items() if v} == {c: v for c, v in t.items() if v}
        assert symbol_g().contains(VectorFieldJet(2, theta.base, t))


def test_obstruction_examples():
    assert obstruction_at(JetPoint.zero(2)).is_zero
    S = section("x2^2", "0", "0", "0")
    for p in [(0, 0), (Fraction(1, 2), 3), (-2, Fraction(-7, 5))]:
        F = obstruction_at(jet_eval(S, p, 2))
        assert (F.F1, F.F2) == (6, 0)
    flat_image = section("0", "0", "1/x2", "0")
    for p in [(0, 1), (2, Fraction(1, 3)), (-1, -4)]:
        assert obstruction_at(jet_eval(flat_image, p, 2)).is_zero


def test_obstruction_form_examples():
    assert obstruction_form(Section.zero()) == (Const(0), Const(0))
    assert obstruction_form(rhs_to_section("6*y^2 + x")) == (Const(36), Const(0))
    assert obstruction_form(rhs_to_section("y^2")) == (Const(6), Const(0))


def test_obstruction_form_matches_pointwise_values():
    r = random.Random(23)
    S = random_section(r, 3)
    F1, F2 = obstruction_form(S)
    for _ in range(20):
        p = (Fraction(r.randint(-9, 9), r.randint(1, 4)), Fraction(r.randint(-9, 9), r.randint(1, 4)))
        v = obstruction_at(jet_eval(S, p, 2))
        env = {"x1": p[0], "x2": p[1]}
        assert (evaluate(F1, env), evaluate(F2, env)) == (v.F1, v.F2)


def test_verdicts():
    assert linearizable(Section.zero()).verdict is Linearizability.LINEARIZABLE
    v = linearizable(rhs_to_section("y^2"))
    assert v.verdict is Linearizability.NOT_LINEARIZABLE
    assert v.witness_values == (6, 0)
    assert linearizable(rhs_to_section("p^2/y")).verdict is Linearizability.LINEARIZABLE


def test_transformed_flat_equations_are_linearizable(rng):
    for _ in range(5):
        S = pushforward_equation(random_tame_transform(rng), Section.zero())
        assert linearizable(S).verdict is Linearizability.LINEARIZABLE


def test_sampled_verdict_reports_confidence():
    S = section("x2^2*(sin(x1)^2 + cos(x1)^2 - 1)", "0", "0", "0")
    v = linearizable(S, ZeroTestConfig(samples=30))
    assert v.verdict is Linearizability.NUMERICALLY_LINEARIZABLE
    data = v.to_json()
    assert data["method"] == "sampling" and data["confidence"] == 1.0 and data["samples"] == 30


def test_inconclusive_cases():
    bad = "log(-(x1^2 + 1))"
    one = section(f"x2^2*{bad}", "0", "0", "0")
    assert linearizable(one, ZeroTestConfig(samples=10)).verdict is Linearizability.INCONCLUSIVE
    both = section(f"x2^2*{bad}", "0", "0", f"x1^2*{bad}")
    with pytest.raises(ZeroTestInconclusive):
        linearizable(both, ZeroTestConfig(samples=10))


def test_verdict_json_schema():
    data = json.loads(json.dumps(linearizable(rhs_to_section("y^2")).to_json()))
    assert {"F1", "F2", "verdict", "witness", "method", "samples", "epsilon"} <= set(data)
    assert data["F1"] == "6" and data["verdict"] == "NotLinearizable" and len(data["witness"]) == 2


def test_invariance_identity_and_translation(rng):
    theta = random_jet(rng, 2)
    rep = invariance_check(PointTransform.identity(), theta)
    assert rep.passed and rep.kind == "identity-tangent" and rep.exact
    rep = invariance_check(PointTransform("x1 + 3", "x2 - 1/2"), theta)
    assert rep.passed and rep.kind == "identity-tangent"
    assert (rep.after.F1, rep.after.F2) == (rep.before.F1, rep.before.F2)


def test_invariance_cubic_shear(rng):
    theta = random_jet(rng, 2, base=(0, 0))
    rep = invariance_check(PointTransform("x1", "x2 + x1^3"), theta)
    assert rep.kind == "identity-tangent" and rep.passed and rep.exact


def test_invariance_affine_and_general(rng):
    for _ in range(5):
        theta = random_jet(rng, 2)
        rep = invariance_check(random_affine(rng), theta)
        assert rep.kind == "affine" and rep.passed
        rep = invariance_check(random_tame_transform(rng), theta)
        assert rep.kind == "general" and rep.passed, rep.steps


def test_tensor_law_detects_wrong_values():
    A = [[Fraction(2), Fraction(1)], [Fraction(0), Fraction(1)]]
    v = ObstructionValue(Fraction(1), Fraction(2))
    assert not affine_tensor_law(A, v, v, exact=True)[0]


def test_invariance_on_float_jets():
    S = section("exp(x2)", "x1", "0", "0")
    theta = jet_eval(S, (Fraction(1, 2), Fraction(1, 3)), 2)
    rep = invariance_check(PointTransform("x1", "x2 + x1^2 - x1"), theta)
    assert not rep.exact and rep.passed and rep.max_error < 1e-9
