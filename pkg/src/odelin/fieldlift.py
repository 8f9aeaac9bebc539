"""Liftings of plane vector fields to the jet bundles of the equation bundle.

A vector field is handled through its Taylor data at a point.  The
generating function ``psi(X)`` is kept as polynomial templates in the jet
variables ``u{i}_{r1}_{r2}`` and field variables ``X{i}_{r1}_{r2}``, where
``X{i}_{r1}_{r2}`` stands for the partial derivative of ``X^i``.  Total
derivatives act on the templates by shifting both kinds of indices.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .jetspace import (
    BASE_VARIABLES,
    JetPoint,
    MultiIndex,
    Section,
    _as_number,
    _num_from_json,
    _num_json,
    _partial,
    coord_name,
    multi_indices,
)
from .series import Series2
from .symexpr import Expr, Poly, Var, evaluate, lambdify, parse, render, substitute


class BaseMismatchError(ValueError):
    pass


class InsufficientOrderError(ValueError):
    pass


class FlowEscapeError(RuntimeError):
    pass


FieldCoord = Tuple[int, MultiIndex]


@dataclass(frozen=True)
class VectorFieldJet:
    """Partial derivatives ``X^i_tau`` (``i`` in 1, 2; ``|tau| <= order``) at ``base``."""

    order: int
    base: Tuple[object, object]
    coeffs: Mapping[FieldCoord, object]

    def __post_init__(self):
        clean = {}
        for (i, t), v in self.coeffs.items():
            t = MultiIndex(*t)
            if i not in (1, 2):
                raise ValueError("vector field components are indexed 1 and 2")
            if t.order > self.order:
                raise ValueError(f"coefficient X{i}_{tuple(t)} exceeds order {self.order}")
            clean[(i, t)] = _as_number(v)
        for i in (1, 2):
            for t in multi_indices(self.order):
                clean.setdefault((i, t), Fraction(0))
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "base", tuple(_as_number(b) for b in self.base))

    def X(self, i: int, r1: int = 0, r2: int = 0):
        return self.coeffs[(i, MultiIndex(r1, r2))]

    def __getitem__(self, key):
        i, t = key
        return self.coeffs[(i, MultiIndex(*t))]

    def __eq__(self, other):
        if not isinstance(other, VectorFieldJet):
            return NotImplemented
        return self.order == other.order and self.base == other.base and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, self.base, tuple(sorted(self.coeffs.items()))))

    @classmethod
    def zero(cls, m: int, base=(0, 0)) -> "VectorFieldJet":
        return cls(m, base, {})

    @classmethod
    def from_field(cls, X1: Expr | str, X2: Expr | str, p: Sequence, m: int) -> "VectorFieldJet":
        comps = [_parse_field(c) for c in (X1, X2)]
        env = {"x1": _as_number(p[0]), "x2": _as_number(p[1])}
        coeffs = {}
        for i, c in zip((1, 2), comps):
            for t in multi_indices(m):
                coeffs[(i, t)] = evaluate(_partial(c, t.r1, t.r2), env)
        return cls(m, (env["x1"], env["x2"]), coeffs)

    @property
    def is_exact(self) -> bool:
        return not any(isinstance(v, float) for v in self.coeffs.values())

    def env(self) -> Dict[str, object]:
        return {coord_name(i, t, "X"): v for (i, t), v in self.coeffs.items()}

    def truncate(self, m: int) -> "VectorFieldJet":
        return VectorFieldJet(m, self.base, {c: v for c, v in self.coeffs.items() if c[1].order <= m})

    def series(self) -> Tuple[Series2, Series2]:
        return tuple(
            Series2.from_partials({tuple(t): self.coeffs[(i, t)] for t in multi_indices(self.order)}, self.order)
            for i in (1, 2)
        )

    @classmethod
    def from_series(cls, s1: Series2, s2: Series2, base) -> "VectorFieldJet":
        m = min(s1.order, s2.order)
        coeffs = {}
        for i, s in ((1, s1), (2, s2)):
            for t in multi_indices(m):
                coeffs[(i, t)] = s.partial(t.r1, t.r2)
        return cls(m, base, coeffs)

    def grade(self, n: int) -> "VectorFieldJet":
        """Keep only the coefficients with ``|tau| = n``."""
        return VectorFieldJet(self.order, self.base, {c: v for c, v in self.coeffs.items() if c[1].order == n})

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "base": [_num_json(b) for b in self.base],
            "coords": [
                {"i": i, "sigma": [t.r1, t.r2], "value": _num_json(v)} for (i, t), v in sorted(self.coeffs.items())
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "VectorFieldJet":
        coeffs = {(int(c["i"]), MultiIndex(*c["sigma"])): _num_from_json(c["value"]) for c in data["coords"]}
        return cls(int(data["order"]), tuple(_num_from_json(b) for b in data["base"]), coeffs)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _parse_field(c) -> Expr:
    if isinstance(c, Expr):
        return c
    e = parse(c, BASE_VARIABLES + ("x", "y"))
    return substitute(e, {"x": Var("x1"), "y": Var("x2")})


def field_coordinates(lo: int, hi: int) -> List[FieldCoord]:
    """Unknown ordering used by the linear systems: by component, then order, then descending r1."""
    return [(i, t) for i in (1, 2) for t in multi_indices(hi, lo)]


# -- generating function templates ---------------------------------------------


def _u(i, r1=0, r2=0) -> Poly:
    return Poly.var(coord_name(i, (r1, r2)))


def _X(i, r1=0, r2=0) -> Poly:
    return Poly.var(coord_name(i, (r1, r2), "X"))


def _psi_templates() -> Tuple[Poly, Poly, Poly, Poly]:
    u, X = _u, _X
    psi0 = (
        -u(0, 1, 0) * X(1) - u(0, 0, 1) * X(2) - 2 * u(0) * X(1, 1, 0) + u(0) * X(2, 0, 1)
        - u(1) * X(2, 1, 0) + X(2, 2, 0)
    )
    psi1 = (
        -u(1, 1, 0) * X(1) - u(1, 0, 1) * X(2) - 3 * u(0) * X(1, 0, 1) - u(1) * X(1, 1, 0)
        - 2 * u(2) * X(2, 1, 0) - X(1, 2, 0) + 2 * X(2, 1, 1)
    )
    psi2 = (
        -u(2, 1, 0) * X(1) - u(2, 0, 1) * X(2) - 2 * u(1) * X(1, 0, 1) - u(2) * X(2, 0, 1)
        - 3 * u(3) * X(2, 1, 0) - 2 * X(1, 1, 1) + X(2, 0, 2)
    )
    psi3 = (
        -u(3, 1, 0) * X(1) - u(3, 0, 1) * X(2) - u(2) * X(1, 0, 1) + u(3) * X(1, 1, 0)
        - 2 * u(3) * X(2, 0, 1) - X(1, 0, 2)
    )
    return (psi0, psi1, psi2, psi3)


PSI = _psi_templates()


def _shift(name: str, j: int) -> str:
    head, r1, r2 = name.split("_")
    r1, r2 = int(r1), int(r2)
    return f"{head}_{r1 + (j == 1)}_{r2 + (j == 2)}"


def total_derivative(P: Poly, j: int) -> Poly:
    """``D_j`` on a template polynomial (no explicit x-dependence occurs)."""
    out = Poly()
    for v in sorted(P.variables()):
        out = out + P.diff(v) * Poly.var(_shift(v, j))
    return out


@lru_cache(maxsize=None)
def psi_derivative_template(i: int, r1: int, r2: int) -> Poly:
    """``D_sigma psi^i`` as a polynomial template, ``sigma = (r1, r2)``."""
    if r1 > 0:
        return total_derivative(psi_derivative_template(i, r1 - 1, r2), 1)
    if r2 > 0:
        return total_derivative(psi_derivative_template(i, 0, r2 - 1), 2)
    return PSI[i]


@lru_cache(maxsize=None)
def psi_linear_form(i: int, r1: int, r2: int) -> Tuple[Tuple[FieldCoord, Poly], ...]:
    """``D_sigma psi^i = sum_c coeff_c(u) * X_c``: the template split by field variables."""
    P = psi_derivative_template(i, r1, r2)
    groups: Dict[FieldCoord, Dict] = {}
    for m, c in P.terms.items():
        xs = [(v, e) for v, e in m if v.startswith("X")]
        if len(xs) != 1 or xs[0][1] != 1:
            raise AssertionError("generating function must be linear in the field jet")
        head, a, b = xs[0][0].split("_")
        key = (int(head[1:]), MultiIndex(int(a), int(b)))
        rest = tuple(t for t in m if not t[0].startswith("X"))
        groups.setdefault(key, {})
        groups[key][rest] = groups[key].get(rest, 0) + c
    return tuple(sorted((k, Poly(v)) for k, v in groups.items()))


# -- evaluation ----------------------------------------------------------------


@dataclass(frozen=True)
class GeneratingValue:
    psi: Tuple[object, object, object, object]

    def __getitem__(self, i):
        return self.psi[i]

    def __iter__(self):
        return iter(self.psi)

    def to_json(self) -> dict:
        return {f"psi{i}": _num_json(v) for i, v in enumerate(self.psi)}


def _check_base(X: VectorFieldJet, theta: JetPoint) -> None:
    if tuple(X.base) != tuple(theta.base):
        raise BaseMismatchError(f"field at {X.base} but jet at {theta.base}")


def total_derivative_psi(X: VectorFieldJet, theta: JetPoint, sigma: Sequence[int]) -> Tuple:
    """Values of ``D_sigma psi^i(X)`` at ``theta`` for ``i = 0..3``."""
    s = MultiIndex(*sigma)
    _check_base(X, theta)
    if theta.order < s.order + 1:
        raise InsufficientOrderError(f"D_sigma psi with |sigma| = {s.order} needs a {s.order + 1}-jet")
    if X.order < s.order + 2:
        raise InsufficientOrderError(f"D_sigma psi with |sigma| = {s.order} needs field data of order {s.order + 2}")
    env = theta.env()
    env.update(X.env())
    return tuple(psi_derivative_template(i, s.r1, s.r2).evaluate(env) for i in range(4))


def psi(X: VectorFieldJet, theta1: JetPoint) -> GeneratingValue:
    return GeneratingValue(total_derivative_psi(X, theta1, (0, 0)))


@dataclass(frozen=True)
class LiftedVector:
    """Components of ``X^(k)`` at a k-jet: ``dx`` part plus ``du^i_sigma`` parts."""

    order: int
    dx: Tuple[object, object]
    du: Mapping[Tuple[int, MultiIndex], object]
    vertical: Mapping[Tuple[int, MultiIndex], object]

    def horizontal(self) -> Dict[Tuple[int, MultiIndex], object]:
        return {c: self.du[c] - self.vertical[c] for c in self.du}

    def as_vector(self) -> List:
        return [self.dx[0], self.dx[1]] + [self.du[c] for c in jet_coordinates(self.order)]


def jet_coordinates(k: int) -> List[Tuple[int, MultiIndex]]:
    return [(i, s) for i in range(4) for s in multi_indices(k)]


def lift_field(X: VectorFieldJet, theta: JetPoint, k: Optional[int] = None) -> LiftedVector:
    """``X^(k)`` at ``pi_{k+1,k}(theta)``; ``theta`` must have order ``k + 1``."""
    if k is None:
        k = theta.order - 1
    if k < 0 or theta.order < k + 1:
        raise InsufficientOrderError(f"lifting to order {k} needs a {k + 1}-jet")
    if X.order < k + 2:
        raise InsufficientOrderError(f"lifting to order {k} needs field data of order {k + 2}")
    _check_base(X, theta)
    x1, x2 = X.X(1), X.X(2)
    du, vert = {}, {}
    for s in multi_indices(k):
        dpsi = total_derivative_psi(X, theta, s)
        for i in range(4):
            vert[(i, s)] = dpsi[i]
            du[(i, s)] = x1 * theta.coords[(i, s.append(1))] + x2 * theta.coords[(i, s.append(2))] + dpsi[i]
    return LiftedVector(k, (x1, x2), du, vert)


def bracket(X: VectorFieldJet, Y: VectorFieldJet) -> VectorFieldJet:
    """Taylor data of ``[X, Y] = X.grad(Y) - Y.grad(X)`` to order ``m - 1``."""
    if tuple(X.base) != tuple(Y.base):
        raise BaseMismatchError("bracket of fields at different points")
    m = min(X.order, Y.order)
    if m < 1:
        raise InsufficientOrderError("bracket needs first-order data")
    xs = X.truncate(m).series()
    ys = Y.truncate(m).series()
    out = []
    for i in range(2):
        c = xs[0] * ys[i].deriv(1) + xs[1] * ys[i].deriv(2) - ys[0] * xs[i].deriv(1) - ys[1] * xs[i].deriv(2)
        out.append(c.truncate(m - 1))
    return VectorFieldJet.from_series(out[0], out[1], X.base)


# -- numeric oracles -------------------------------------------------------------


class PolynomialField:
    """A vector field given by expressions, with compiled derivatives for integration."""

    def __init__(self, X1: Expr | str, X2: Expr | str):
        self.exprs = (_parse_field(X1), _parse_field(X2))
        self._f = [lambdify(c, BASE_VARIABLES) for c in self.exprs]
        self._d = [[lambdify(_partial(c, *d), BASE_VARIABLES) for d in ((1, 0), (0, 1))] for c in self.exprs]
        self._dd = [
            [[lambdify(_partial(c, *_add_idx(a, b)), BASE_VARIABLES) for b in range(2)] for a in range(2)]
            for c in self.exprs
        ]

    def jet(self, p: Sequence, m: int) -> VectorFieldJet:
        return VectorFieldJet.from_field(self.exprs[0], self.exprs[1], p, m)

    def value(self, x):
        return [f(*x) for f in self._f]

    def flow_with_variations(self, p: Sequence[float], t: float, steps: int = 20):
        """Flow map for time ``t`` from ``p`` with its first and second derivatives."""

        def rhs(state):
            x = state[0:2]
            J = [state[2:4], state[4:6]]
            H = [[state[6:8], state[8:10]], [state[10:12], state[12:14]]]
            v = self.value(x)
            D = [[g(*x) for g in row] for row in self._d]
            DD = [[[g(*x) for g in row] for row in mat] for mat in self._dd]
            dJ = [[sum(D[k][l] * J[l][a] for l in range(2)) for a in range(2)] for k in range(2)]
            dH = [
                [
                    [
                        sum(D[k][l] * H[l][a][b] for l in range(2))
                        + sum(DD[k][l][m] * J[l][a] * J[m][b] for l in range(2) for m in range(2))
                        for b in range(2)
                    ]
                    for a in range(2)
                ]
                for k in range(2)
            ]
            return v + dJ[0] + dJ[1] + [h for k in range(2) for a in range(2) for h in dH[k][a]]

        state = [float(p[0]), float(p[1]), 1.0, 0.0, 0.0, 1.0] + [0.0] * 8
        h = t / steps
        for _ in range(steps):
            k1 = rhs(state)
            k2 = rhs([s + h / 2 * k for s, k in zip(state, k1)])
            k3 = rhs([s + h / 2 * k for s, k in zip(state, k2)])
            k4 = rhs([s + h * k for s, k in zip(state, k3)])
            state = [s + h / 6 * (a + 2 * b + 2 * c + d) for s, a, b, c, d in zip(state, k1, k2, k3, k4)]
            if not all(math.isfinite(s) for s in state):
                raise FlowEscapeError("flow left the domain")
        x = state[0:2]
        J = [state[2:4], state[4:6]]
        H = [[state[6:8], state[8:10]], [state[10:12], state[12:14]]]
        return x, J, H


def _add_idx(a: int, b: int) -> Tuple[int, int]:
    return (int(a == 0) + int(b == 0), int(a == 1) + int(b == 1))


def flow_oracle(field: PolynomialField, S: Section, p: Sequence, dt: float = 1e-3) -> GeneratingValue:
    """Central difference in ``t`` of the coefficients of ``f_t(S)`` at ``p``.

    ``f_t(S)`` at ``p`` needs ``g = f_t^-1 = f_-t`` near ``p``: its value,
    Jacobian and Hessian come from the variational equations.
    """
    from .pointmap import transform_coefficients

    us = [lambdify(c, BASE_VARIABLES) for c in S.u]

    def coeffs_at(t):
        x, J, H = field.flow_with_variations(p, -t)
        d2g = [[H[k][0][0], H[k][0][1], H[k][1][1]] for k in range(2)]
        return transform_coefficients([u(*x) for u in us], J, d2g)

    # fourth-order central stencil in t
    c1, m1, c2, m2 = coeffs_at(dt), coeffs_at(-dt), coeffs_at(2 * dt), coeffs_at(-2 * dt)
    return GeneratingValue(tuple((8 * (a - b) - (c - d)) / (12 * dt) for a, b, c, d in zip(c1, m1, c2, m2)))


def lifted_field_function(field: PolynomialField, k: int):
    """``z -> X^(k)(z)`` on float coordinates ``z = (x1, x2, u^i_sigma...)`` of the k-jet space."""
    coords = jet_coordinates(k)

    def F(z: Sequence[float]) -> List[float]:
        base = (z[0], z[1])
        vals = {c: v for c, v in zip(coords, z[2:])}
        theta = JetPoint(k + 1, base, vals)
        X = field.jet(base, k + 2)
        return lift_field(X, theta, k).as_vector()

    return F


def numeric_bracket(A, B, z: Sequence[float], h: float = 1e-4) -> List[float]:
    """``[A, B](z) = DB(z) A(z) - DA(z) B(z)`` with central differences."""
    a, b = A(z), B(z)
    n = len(z)
    out = [0.0] * n
    for j in range(n):
        zp = list(z)
        zm = list(z)
        zp[j] += h
        zm[j] -= h
        dA = [(p - m) / (2 * h) for p, m in zip(A(zp), A(zm))]
        dB = [(p - m) / (2 * h) for p, m in zip(B(zp), B(zm))]
        for i in range(n):
            out[i] += dB[i] * a[j] - dA[i] * b[j]
    return out


def bracket_field(X: PolynomialField, Y: PolynomialField) -> PolynomialField:
    """The vector field ``[X, Y]`` as expressions."""
    from .symexpr import add, mul, neg, normalize

    comps = []
    for i in range(2):
        c = add(
            mul(X.exprs[0], _partial(Y.exprs[i], 1, 0)),
            mul(X.exprs[1], _partial(Y.exprs[i], 0, 1)),
            neg(mul(Y.exprs[0], _partial(X.exprs[i], 1, 0))),
            neg(mul(Y.exprs[1], _partial(X.exprs[i], 0, 1))),
        )
        comps.append(normalize(c))
    return PolynomialField(comps[0], comps[1])
