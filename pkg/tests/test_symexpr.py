import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from odelin.symexpr import (
    Const,
    EvaluationError,
    UnknownIdentifierError,
    ParseError,
    Var,
    Verdict,
    ZeroTestConfig,
    ZeroTestInconclusive,
    add,
    diff,
    div,
    evaluate,
    exp,
    is_zero,
    log,
    mul,
    neg,
    normalize,
    parse,
    power,
    render,
)

from conftest import expressions, polynomials, rational_functions

x1, x2 = Var("x1"), Var("x2")


def test_parse_power():
    assert parse("x2^2") == power(x2, 2)


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError):
        parse("3*u + 1/2")


def test_syntax_error_reports_position():
    with pytest.raises(ParseError) as info:
        parse("x1 + * x2")
    assert "5" in str(info.value) or "position" in str(info.value)


def test_painleve_rhs_round_trip():
    e = parse("6*x2^2 + x1")
    assert normalize(parse(render(e))) == normalize(e)
    assert evaluate(e, {"x1": 1, "x2": 2}) == 25


@pytest.mark.parametrize(
    "text, env, expected",
    [
        ("x1 + x2", {"x1": 1, "x2": 2}, 3),
        ("-x1^2", {"x1": 3}, -9),
        ("2^-1", {}, Fraction(1, 2)),
        ("1/2/3", {}, Fraction(1, 6)),
        ("(x1 - x2)*(x1 + x2)", {"x1": Fraction(1, 3), "x2": 2}, Fraction(1, 9) - 4),
        ("x1^2^2", {"x1": 2}, 16),
    ],
)
def test_eval_corpus(text, env, expected):
    assert evaluate(parse(text), env) == expected


def test_eval_singularity():
    with pytest.raises(EvaluationError):
        evaluate(parse("1/x1"), {"x1": 0})


def test_diff_examples():
    assert normalize(diff(power(x2, 2), "x2")) == normalize(mul(2, x2))
    assert diff(Const(7), "x1") == Const(0)


def test_diff_exp_against_finite_differences():
    e = exp(mul(x1, x2))
    d = diff(e, "x1")
    r = random.Random(7)
    for _ in range(10):
        a, b = Fraction(r.randint(-20, 20), 10), Fraction(r.randint(-20, 20), 10)
        h = 1e-5
        fd = (evaluate(e, {"x1": float(a) + h, "x2": float(b)}) - evaluate(e, {"x1": float(a) - h, "x2": float(b)})) / (2 * h)
        exact = float(b) * math.exp(float(a * b))
        assert evaluate(d, {"x1": a, "x2": b}) == pytest.approx(exact, rel=1e-12)
        assert fd == pytest.approx(exact, rel=1e-6)


def test_degree_five_polynomial_against_hand_expansion():
    r = random.Random(11)
    coeffs = {(i, j): Fraction(r.randint(-9, 9), r.randint(1, 5)) for i in range(6) for j in range(6 - i)}
    e = add(*(mul(c, power(x1, i), power(x2, j)) for (i, j), c in coeffs.items()))
    for a, b in [(Fraction(1, 2), Fraction(-2, 3)), (Fraction(3), Fraction(1, 7)), (Fraction(-5, 4), Fraction(2))]:
        hand = sum(c * a**i * b**j for (i, j), c in coeffs.items())
        assert evaluate(e, {"x1": a, "x2": b}) == hand


def test_is_zero_examples():
    e = parse("(x1+x2)^2 - x1^2 - 2*x1*x2 - x2^2")
    assert is_zero(e).verdict is Verdict.PROVEN_ZERO
    assert is_zero(mul(x1, x2)).verdict is Verdict.PROVEN_NONZERO


def test_transcendental_identity_falls_back_to_sampling():
    e = parse("sin(x1)^2 + cos(x1)^2 - 1")
    v = is_zero(e)
    assert v.verdict is Verdict.NUMERICALLY_ZERO and v.method == "sampling"
    assert v.confidence == 1.0


def test_sampling_inconclusive():
    e = log(neg(add(power(x1, 2), 1)))  # log of a negative number everywhere
    with pytest.raises(ZeroTestInconclusive):
        is_zero(e, ZeroTestConfig(samples=10))


@given(expressions, expressions, st.sampled_from(["x1", "x2"]))
def test_diff_is_additive(f, g, v):
    lhs = diff(add(f, g), v)
    rhs = add(diff(f, v), diff(g, v))
    assert is_zero(add(lhs, neg(rhs))).is_zero


@given(expressions, expressions, st.sampled_from(["x1", "x2"]))
def test_leibniz(f, g, v):
    lhs = diff(mul(f, g), v)
    rhs = add(mul(diff(f, v), g), mul(f, diff(g, v)))
    assert is_zero(add(lhs, neg(rhs))).verdict is Verdict.PROVEN_ZERO


@given(rational_functions)
def test_normalize_idempotent(e):
    n = normalize(e)
    assert normalize(n) == n


@given(polynomials)
def test_render_parse_round_trip(e):
    assert normalize(parse(render(e))) == normalize(e)


@given(rational_functions, st.fractions(-3, 3, max_denominator=20), st.fractions(-3, 3, max_denominator=20))
def test_rational_evaluation_is_exact(e, a, b):
    v = evaluate(e, {"x1": a, "x2": b})
    assert isinstance(v, Fraction)
    assert v == evaluate(normalize(e), {"x1": a, "x2": b})
