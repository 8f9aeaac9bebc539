"""Symbolic expression kernel: parsing, exact evaluation, differentiation, zero tests."""

from .expr import (
    FUNCTIONS,
    ONE,
    ZERO,
    Add,
    Const,
    Div,
    EvaluationError,
    Expr,
    ExprError,
    Func,
    Mul,
    Pow,
    Var,
    add,
    as_expr,
    cos,
    diff,
    diff_multi,
    div,
    evaluate,
    exp,
    func,
    lambdify,
    log,
    mul,
    neg,
    power,
    render,
    sin,
    substitute,
)
from .parser import DEFAULT_VARIABLES, ParseError, UnknownIdentifierError, parse
from .poly import Poly, RationalFunction, normalize, to_rational
from .zero import (
    Verdict,
    ZeroTestConfig,
    ZeroTestInconclusive,
    ZeroVerdict,
    is_zero,
    random_rational,
    sample_points,
)

__all__ = [name for name in dir() if not name.startswith("_")]
