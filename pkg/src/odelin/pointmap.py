"""Point transformations and their liftings to equations and jets.

For a curve ``Y(X)`` in the new coordinates and ``g = f^-1``, write
``a = g1_X + g1_Y P``, ``b = g2_X + g2_Y P`` and
``Q_k = g_k,XX + 2 g_k,XY P + g_k,YY P^2``.  Then

    Y'' * J = sum_i u^i(g) b^i a^(3-i) - a Q_2 + b Q_1,   J = det Dg,

which is cubic in ``P = Y'`` and gives the transformed coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .jetspace import (
    BASE_VARIABLES,
    JetPoint,
    MultiIndex,
    Section,
    _as_number,
    _partial,
    multi_indices,
    taylor_polynomials,
)
from .series import Series2, invert_map
from .symexpr import (
    Const,
    EvaluationError,
    Expr,
    ExprError,
    Var,
    add,
    div,
    evaluate,
    exp,
    is_zero,
    lambdify,
    log,
    mul,
    neg,
    normalize,
    parse,
    render,
    substitute,
)


class SingularJacobianError(ArithmeticError):
    pass


class IntegrationError(RuntimeError):
    pass


class GraphConditionError(RuntimeError):
    pass


class InversionError(ExprError):
    pass


@dataclass(frozen=True)
class PointTransform:
    """``(x1, x2) -> (f1, f2)``; ``inverse`` holds ``g = f^-1`` when known."""

    f1: Expr
    f2: Expr
    inverse: Optional[Tuple[Expr, Expr]] = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("f1", "f2"):
            v = getattr(self, name)
            if isinstance(v, str):
                object.__setattr__(self, name, _parse_map(v))
        if self.inverse is not None:
            object.__setattr__(self, "inverse", tuple(_parse_map(g) if isinstance(g, str) else g for g in self.inverse))

    @property
    def components(self) -> Tuple[Expr, Expr]:
        return (self.f1, self.f2)

    @classmethod
    def identity(cls) -> "PointTransform":
        return cls(Var("x1"), Var("x2"), (Var("x1"), Var("x2")))

    @classmethod
    def affine(cls, matrix, shift=(0, 0)) -> "PointTransform":
        (a, b), (c, d) = matrix
        det = Fraction(a) * d - Fraction(b) * c
        if det == 0:
            raise SingularJacobianError("singular affine map")
        x, y = Var("x1"), Var("x2")
        f1 = add(mul(a, x), mul(b, y), shift[0])
        f2 = add(mul(c, x), mul(d, y), shift[1])
        u, v = add(x, -Fraction(shift[0])), add(y, -Fraction(shift[1]))
        g1 = add(mul(d / det, u), mul(-Fraction(b) / det, v))
        g2 = add(mul(-Fraction(c) / det, u), mul(Fraction(a) / det, v))
        return cls(f1, f2, (g1, g2))

    def __call__(self, p: Sequence) -> Tuple:
        env = {"x1": _as_number(p[0]), "x2": _as_number(p[1])}
        return (evaluate(self.f1, env), evaluate(self.f2, env))

    def compose(self, inner: "PointTransform") -> "PointTransform":
        """``self o inner``."""
        m = {"x1": inner.f1, "x2": inner.f2}
        f1, f2 = substitute(self.f1, m), substitute(self.f2, m)
        inv = None
        if self.inverse is not None and inner.inverse is not None:
            mi = {"x1": self.inverse[0], "x2": self.inverse[1]}
            inv = (substitute(inner.inverse[0], mi), substitute(inner.inverse[1], mi))
        return PointTransform(f1, f2, inv)

    def inverted(self) -> "PointTransform":
        g = self.inverse_exprs()
        return PointTransform(g[0], g[1], (self.f1, self.f2))

    def jacobian(self, p: Sequence) -> List[List]:
        env = {"x1": _as_number(p[0]), "x2": _as_number(p[1])}
        return [[evaluate(_partial(fi, *d), env) for d in ((1, 0), (0, 1))] for fi in self.components]

    def taylor(self, p: Sequence, order: int) -> Tuple[Series2, Series2]:
        env = {"x1": _as_number(p[0]), "x2": _as_number(p[1])}
        return tuple(
            Series2.from_partials({tuple(s): evaluate(_partial(fi, *s), env) for s in multi_indices(order)}, order)
            for fi in self.components
        )

    def inverse_exprs(self) -> Tuple[Expr, Expr]:
        if self.inverse is not None:
            return self.inverse
        return invert_elementary(self)

    def to_json(self) -> dict:
        out = {"f1": render(self.f1), "f2": render(self.f2)}
        if self.inverse is not None:
            out["g1"], out["g2"] = render(self.inverse[0]), render(self.inverse[1])
        return out

    @classmethod
    def from_json(cls, data) -> "PointTransform":
        inv = None
        if "g1" in data and "g2" in data:
            inv = (_parse_map(data["g1"]), _parse_map(data["g2"]))
        return cls(_parse_map(data["f1"]), _parse_map(data["f2"]), inv)


def _parse_map(text) -> Expr:
    if isinstance(text, Expr):
        return text
    e = parse(text, BASE_VARIABLES + ("x", "y"))
    return substitute(e, {"x": Var("x1"), "y": Var("x2")})


def _solve_for(target: Expr, var: str, value: Expr) -> Expr:
    """Invert ``target(var) = value`` by peeling invertible outer operations."""
    from .symexpr import Add, Div, Func, Mul, Pow

    while True:
        if isinstance(target, Var) and target.name == var:
            return value
        if isinstance(target, Add):
            inside = [t for t in target.terms if var in t.free_variables]
            if len(inside) != 1:
                break
            rest = [t for t in target.terms if var not in t.free_variables]
            value = add(value, neg(add(*rest)))
            target = inside[0]
        elif isinstance(target, Mul):
            inside = [t for t in target.factors if var in t.free_variables]
            if len(inside) != 1:
                break
            rest = [t for t in target.factors if var not in t.free_variables]
            value = div(value, mul(*rest))
            target = inside[0]
        elif isinstance(target, Div):
            if var in target.num.free_variables and var not in target.den.free_variables:
                value, target = mul(value, target.den), target.num
            elif var in target.den.free_variables and var not in target.num.free_variables:
                value, target = div(target.num, value), target.den
            else:
                break
        elif isinstance(target, Func) and target.name in ("exp", "log"):
            value = log(value) if target.name == "exp" else exp(value)
            target = target.arg
        elif isinstance(target, Pow) and target.exp == -1:
            value, target = div(1, value), target.base
        else:
            break
    raise InversionError(f"cannot solve {render(target)} = ... for {var}")


def invert_elementary(f: PointTransform) -> Tuple[Expr, Expr]:
    """Closed-form inverse for triangular maps whose pieces peel apart.

    Handles maps where one component involves a single variable (after the
    other is solved), e.g. ``(x, exp(y))`` or ``(x, y + x^2)``.  Anything
    else must come with an explicit inverse.
    """
    X, Y = Var("x1"), Var("x2")
    f1, f2 = f.f1, f.f2
    for first, second, names in ((f1, f2, ("x1", "x2")), (f2, f1, ("x2", "x1"))):
        a, b = names
        tgt_first = X if first is f1 else Y
        tgt_second = Y if first is f1 else X
        if first.free_variables <= {a}:
            try:
                sol_a = _solve_for(first, a, tgt_first)
                sol_b = _solve_for(substitute(second, {a: sol_a}), b, tgt_second)
            except InversionError:
                continue
            sol = {a: sol_a, b: sol_b}
            return (normalize(sol["x1"]), normalize(sol["x2"]))
    try:
        A = f.jacobian((0, 0))
        if all(is_zero(_partial(fi, *s)).is_zero for fi in f.components for s in ((2, 0), (1, 1), (0, 2))):
            c = f((0, 0))
            return PointTransform.affine(A, c).inverse
    except (EvaluationError, SingularJacobianError):
        pass
    raise InversionError("no closed-form inverse found; supply one explicitly (g1, g2)")


# -- coefficient transformation law -------------------------------------------


def _pmul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out


def _padd(p, q, sign=1):
    n = max(len(p), len(q))
    out = []
    for i in range(n):
        a = p[i] if i < len(p) else 0
        b = q[i] if i < len(q) else 0
        out.append(a + sign * b if sign == 1 else a - b)
    return out


def transform_coefficients(u_at_g, dg, d2g):
    """New coefficients from ``u(g)``, ``Dg`` and the second derivatives of ``g``.

    ``dg[k][j] = d g_k / d X_j``; ``d2g[k] = (g_k,XX, g_k,XY, g_k,YY)``.
    Works for any operand type supporting field arithmetic.
    """
    a = [dg[0][0], dg[0][1]]
    b = [dg[1][0], dg[1][1]]
    q1 = [d2g[0][0], 2 * d2g[0][1], d2g[0][2]]
    q2 = [d2g[1][0], 2 * d2g[1][1], d2g[1][2]]
    total = [0, 0, 0, 0]
    for i in range(4):
        term = [u_at_g[i]]
        for _ in range(i):
            term = _pmul(term, b)
        for _ in range(3 - i):
            term = _pmul(term, a)
        total = _padd(total, term)
    total = _padd(total, _pmul(a, q2), sign=-1)
    total = _padd(total, _pmul(b, q1))
    jac = dg[0][0] * dg[1][1] - dg[0][1] * dg[1][0]
    if len(total) > 4 and any(not _is_zero_like(c) for c in total[4:]):
        raise ArithmeticError("transformed equation is not cubic")
    return [c / jac for c in total[:4]]


def _is_zero_like(c) -> bool:
    return isinstance(c, (int, Fraction, float)) and c == 0


def pushforward_equation(f: PointTransform, S: Section) -> Section:
    """The section ``f(S) = f0 o S o f^-1`` with coefficients in the new coordinates."""
    g = f.inverse_exprs()
    _check_inverse(f, g)
    m = {"x1": g[0], "x2": g[1]}
    u_at_g = [substitute(c, m) for c in S.u]
    dg = [[_partial(gk, 1, 0), _partial(gk, 0, 1)] for gk in g]
    d2g = [[_partial(gk, 2, 0), _partial(gk, 1, 1), _partial(gk, 0, 2)] for gk in g]
    coeffs = transform_coefficients(u_at_g, dg, d2g)
    return Section(tuple(normalize(c) for c in coeffs))


def _check_inverse(f: PointTransform, g) -> None:
    for comp, var in zip(f.components, ("x1", "x2")):
        back = substitute(comp, {"x1": g[0], "x2": g[1]})
        if not is_zero(add(back, neg(Var(var)))).is_zero:
            raise InversionError(f"supplied inverse does not invert f (component {var})")


def _second_derivs_of_inverse(df, d2f, dg):
    # D2g[c,d] = -Dg . D2f[Dg c, Dg d]
    out = []
    pairs = ((0, 0), (0, 1), (1, 1))
    for k in range(2):
        row = []
        for a, b in pairs:
            s = 0
            for l in range(2):
                inner = 0
                for c in range(2):
                    for d in range(2):
                        inner = inner + d2f[l][c][d] * dg[c][a] * dg[d][b]
                s = s - dg[k][l] * inner
            row.append(s)
        out.append(row)
    return out


def pushforward_at(f: PointTransform, S: Section, p: Sequence) -> List:
    """Values of the transformed coefficients at ``f(p)``, without inverting ``f``."""
    env = {"x1": _as_number(p[0]), "x2": _as_number(p[1])}
    df = [[evaluate(_partial(fi, *d), env) for d in ((1, 0), (0, 1))] for fi in f.components]
    det = df[0][0] * df[1][1] - df[0][1] * df[1][0]
    if det == 0:
        raise SingularJacobianError(f"Jacobian of f is singular at {tuple(p)}")
    dg = [[df[1][1] / det, -df[0][1] / det], [-df[1][0] / det, df[0][0] / det]]
    d2f = []
    for fi in f.components:
        h11 = evaluate(_partial(fi, 2, 0), env)
        h12 = evaluate(_partial(fi, 1, 1), env)
        h22 = evaluate(_partial(fi, 0, 2), env)
        d2f.append([[h11, h12], [h12, h22]])
    d2g = _second_derivs_of_inverse(df, d2f, dg)
    u = [evaluate(c, env) for c in S.u]
    return transform_coefficients(u, dg, d2g)


def inverse_jet(f: PointTransform, p: Sequence, m: int) -> Tuple[Series2, Series2]:
    """Taylor data of ``g = f^-1`` at ``f(p)`` to order ``m`` (absolute values).

    The returned series are in local coordinates ``t = X - f(p)``; their
    constant terms are the coordinates of ``p``.
    """
    F = f.taylor(p, m)
    q = (F[0].const(), F[1].const())
    det = F[0][(1, 0)] * F[1][(0, 1)] - F[0][(0, 1)] * F[1][(1, 0)]
    if det == 0:
        raise SingularJacobianError(f"Jacobian of f is singular at {tuple(p)}")
    g1, g2 = invert_map(F[0] - q[0], F[1] - q[1])
    back1 = (F[0] - q[0]).compose(g1, g2)
    back2 = (F[1] - q[1]).compose(g1, g2)
    exact = all(isinstance(v, Fraction) for s in F for v in s.coeffs.values())
    if exact and (back1 != Series2.variable(1, m) or back2 != Series2.variable(2, m)):
        raise ArithmeticError("series reversion failed the identity check")
    p0, p1 = _as_number(p[0]), _as_number(p[1])
    return g1 + p0, g2 + p1


def lift_jet(f: PointTransform, theta: JetPoint) -> JetPoint:
    """``f^(k)(theta)``: the k-jet at ``f(p)`` of ``f0 o S o f^-1`` for any ``S`` through ``theta``.

    Realized on Taylor data: ``f`` is expanded to order k+2 at the base point,
    reverted as a series, and the coefficient law is applied to series.
    """
    k = theta.order
    p = theta.base
    n = k + 2
    F = f.taylor(p, n)
    q = (F[0].const(), F[1].const())
    det = F[0][(1, 0)] * F[1][(0, 1)] - F[0][(0, 1)] * F[1][(1, 0)]
    if det == 0:
        raise SingularJacobianError(f"Jacobian of f is singular at {tuple(p)}")
    g1, g2 = invert_map(F[0] - q[0], F[1] - q[1])
    U = taylor_polynomials(theta)
    u_at_g = [Ui.compose(g1, g2).truncate(k) for Ui in U]
    dg = [[g.deriv(1), g.deriv(2)] for g in (g1, g2)]
    d2g = [[g.deriv(1).deriv(1), g.deriv(1).deriv(2), g.deriv(2).deriv(2)] for g in (g1, g2)]
    new = transform_coefficients(u_at_g, dg, d2g)
    coords = {}
    for i in range(4):
        for s in multi_indices(k):
            coords[(i, s)] = new[i].partial(s.r1, s.r2)
    return JetPoint(k, q, coords)


# -- solution-curve oracle ------------------------------------------------------


@dataclass(frozen=True)
class ResidualReport:
    max_residual: float
    points: int
    route: str  # "symbolic" (pushforward section) or "pointwise"
    span: float
    steps: int

    def to_json(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "points": self.points,
            "route": self.route,
            "span": self.span,
            "steps": self.steps,
        }


def _rk4(rhs, x0, state, h, steps):
    xs = [x0]
    ys = [state]
    x = x0
    for _ in range(steps):
        try:
            k1 = rhs(x, state)
            k2 = rhs(x + h / 2, [s + h / 2 * k for s, k in zip(state, k1)])
            k3 = rhs(x + h / 2, [s + h / 2 * k for s, k in zip(state, k2)])
            k4 = rhs(x + h, [s + h * k for s, k in zip(state, k3)])
        except (OverflowError, ZeroDivisionError, ValueError) as exc:
            raise IntegrationError(f"solution left the domain near x = {x}: {exc}") from exc
        state = [s + h / 6 * (a + 2 * b + 2 * c + d) for s, a, b, c, d in zip(state, k1, k2, k3, k4)]
        x = x + h
        if not all(math.isfinite(s) for s in state):
            raise IntegrationError(f"solution blew up near x = {x}")
        xs.append(x)
        ys.append(state)
    return xs, ys


def solution_curve_oracle(
    f: PointTransform,
    S: Section,
    ivp: Tuple[float, float, float],
    span: float = 1.0,
    steps: int = 10_000,
    target: Optional[Section] = None,
) -> ResidualReport:
    """Integrate ``S`` from ``ivp``, map the curve by ``f`` and measure how well
    the image satisfies the transformed equation.

    The transformed equation is ``target`` if given, else the symbolic
    pushforward when an inverse is available, else the pointwise law.
    """
    us = [lambdify(c, BASE_VARIABLES) for c in S.u]

    def rhs(x, st):
        y, yp = st
        return [yp, sum(u(x, y) * yp**i for i, u in enumerate(us))]

    x0, y0, p0 = (float(v) for v in ivp)
    h = span / steps
    xs, ys = _rk4(rhs, x0, [y0, p0], h, steps)
    F1, F2 = lambdify(f.f1, BASE_VARIABLES), lambdify(f.f2, BASE_VARIABLES)
    X = [F1(x, st[0]) for x, st in zip(xs, ys)]
    Y = [F2(x, st[0]) for x, st in zip(xs, ys)]

    route = "symbolic"
    if target is None:
        try:
            target = pushforward_equation(f, S)
        except (InversionError, EvaluationError):
            target = None
            route = "pointwise"
    tu = [lambdify(c, BASE_VARIABLES) for c in target.u] if target is not None else None

    worst = 0.0
    count = 0
    for n in range(2, len(xs) - 2):
        Xd = (-X[n + 2] + 8 * X[n + 1] - 8 * X[n - 1] + X[n - 2]) / (12 * h)
        Yd = (-Y[n + 2] + 8 * Y[n + 1] - 8 * Y[n - 1] + Y[n - 2]) / (12 * h)
        Xdd = (-X[n + 2] + 16 * X[n + 1] - 30 * X[n] + 16 * X[n - 1] - X[n - 2]) / (12 * h * h)
        Ydd = (-Y[n + 2] + 16 * Y[n + 1] - 30 * Y[n] + 16 * Y[n - 1] - Y[n - 2]) / (12 * h * h)
        if abs(Xd) < 1e-8:
            raise GraphConditionError(f"image curve has a vertical tangent near x = {xs[n]}")
        P = Yd / Xd
        Ypp = (Ydd * Xd - Yd * Xdd) / Xd**3
        if tu is not None:
            coeffs = [c(X[n], Y[n]) for c in tu]
        else:
            coeffs = [float(c) for c in pushforward_at(f, S, (xs[n], ys[n][0]))]
        res = abs(Ypp - sum(c * P**i for i, c in enumerate(coeffs)))
        worst = max(worst, res)
        count += 1
    return ResidualReport(worst, count, route, float(span), steps)


# -- random transformations with known inverses -------------------------------------


def _small_rational(rng, num: int = 3, den: int = 4) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def _tiny(rng) -> Fraction:
    return Fraction(rng.randint(-1, 1), rng.randint(8, 16))


def random_affine(rng, near_identity: bool = False) -> PointTransform:
    while True:
        if near_identity:
            m = [[1 + _tiny(rng), _tiny(rng)], [_tiny(rng), 1 + _tiny(rng)]]
        else:
            m = [[_small_rational(rng) for _ in range(2)] for _ in range(2)]
        if m[0][0] * m[1][1] - m[0][1] * m[1][0] != 0:
            break
    shift = (_small_rational(rng, 1, 4), _small_rational(rng, 1, 4))
    return PointTransform.affine(m, shift)


def shear(coeffs: Sequence, swap: bool = False) -> PointTransform:
    """``(x, y + sum c_n x^n)`` (or the same with the roles of x and y swapped)."""
    a, b = (Var("x2"), Var("x1")) if swap else (Var("x1"), Var("x2"))
    poly = add(*(mul(Fraction(c), a**n) for n, c in enumerate(coeffs, start=2) if c))
    fwd = (a, add(b, poly))
    bwd = (a, add(b, neg(poly)))
    if swap:
        fwd, bwd = fwd[::-1], bwd[::-1]
    return PointTransform(fwd[0], fwd[1], bwd)


def random_tame_transform(rng, degree: int = 3, near_identity: bool = False) -> PointTransform:
    """``L1 o shear o L2`` with affine ``L1, L2``: a polynomial automorphism with polynomial inverse."""
    coeffs = [_tiny(rng) if near_identity else _small_rational(rng, 1, 4) for _ in range(degree - 1)]
    if not any(coeffs):
        coeffs[-1] = Fraction(1, 8)
    s = shear(coeffs, swap=rng.random() < 0.5)
    f = random_affine(rng, near_identity).compose(s).compose(random_affine(rng, near_identity))
    return PointTransform(
        normalize(f.f1), normalize(f.f2), (normalize(f.inverse[0]), normalize(f.inverse[1]))
    )


def random_identity_tangent(rng, base=(0, 0), degree: int = 3) -> PointTransform:
    """A polynomial map with ``f(p) = p`` and ``Df(p) = I`` at ``p = base``."""
    dx = add(Var("x1"), -Fraction(base[0]))
    dy = add(Var("x2"), -Fraction(base[1]))
    comps = []
    for v in (Var("x1"), Var("x2")):
        terms = [v]
        for n in range(2, degree + 1):
            for a in range(n + 1):
                c = _small_rational(rng)
                if c:
                    terms.append(mul(c, dx**a, dy ** (n - a)))
        comps.append(normalize(add(*terms)))
    return PointTransform(comps[0], comps[1])
