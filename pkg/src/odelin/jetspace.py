"""The bundle of equations y'' = u0 + u1 y' + u2 y'^2 + u3 y'^3 and its jets.

A section is the coefficient tuple ``(u0, u1, u2, u3)`` as functions of the
base coordinates ``(x1, x2) = (x, y)``.  Jet coordinates ``u^i_sigma`` are
indexed by symmetric multi-indices stored as count pairs ``(r1, r2)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Dict, Iterator, Mapping, NamedTuple, Sequence, Tuple

from .symexpr import (
    ZERO,
    Const,
    EvaluationError,
    Expr,
    ExprError,
    Poly,
    RationalFunction,
    Var,
    add,
    diff,
    evaluate,
    mul,
    parse,
    power,
    render,
    substitute,
    to_rational,
)

BASE_VARIABLES = ("x1", "x2")
RHS_VARIABLES = ("x", "y", "p")


class NotInClassError(ExprError):
    """The right-hand side is not a cubic polynomial in the derivative."""


class MultiIndex(NamedTuple):
    r1: int
    r2: int

    @property
    def order(self) -> int:
        return self.r1 + self.r2

    def append(self, j: int) -> "MultiIndex":
        return MultiIndex(self.r1 + 1, self.r2) if j == 1 else MultiIndex(self.r1, self.r2 + 1)

    def factorial(self) -> int:
        return factorial(self.r1) * factorial(self.r2)

    @classmethod
    def of(cls, *indices: int) -> "MultiIndex":
        return cls(sum(1 for j in indices if j == 1), sum(1 for j in indices if j == 2))


def multi_indices(k: int, lo: int = 0) -> Iterator[MultiIndex]:
    """All multi-indices with ``lo <= |sigma| <= k``, by order then descending r1."""
    for n in range(lo, k + 1):
        for r1 in range(n, -1, -1):
            yield MultiIndex(r1, n - r1)


def fiber_dimension(k: int) -> int:
    return 4 * (k + 1) * (k + 2) // 2


def jet_dimension(k: int) -> int:
    return 2 + fiber_dimension(k)


Coord = Tuple[int, MultiIndex]


def _as_number(v):
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, int):
        return Fraction(v)
    return v


@dataclass(frozen=True)
class JetPoint:
    order: int
    base: Tuple[object, object]
    coords: Mapping[Coord, object]

    def __post_init__(self):
        clean = {}
        for (i, s), v in self.coords.items():
            s = MultiIndex(*s)
            if s.order > self.order:
                raise ValueError(f"coordinate u{i}_{tuple(s)} exceeds jet order {self.order}")
            clean[(i, s)] = _as_number(v)
        for i in range(4):
            for s in multi_indices(self.order):
                clean.setdefault((i, s), Fraction(0))
        object.__setattr__(self, "coords", clean)
        object.__setattr__(self, "base", tuple(_as_number(b) for b in self.base))

    def u(self, i: int, r1: int = 0, r2: int = 0):
        return self.coords[(i, MultiIndex(r1, r2))]

    def __getitem__(self, key):
        i, s = key
        return self.coords[(i, MultiIndex(*s))]

    @property
    def is_exact(self) -> bool:
        return not any(isinstance(v, float) for v in self.coords.values()) and not any(
            isinstance(b, float) for b in self.base
        )

    def env(self, prefix: str = "u") -> Dict[str, object]:
        """Variable bindings ``u{i}_{r1}_{r2}`` used by the symbolic templates."""
        return {coord_name(i, s, prefix): v for (i, s), v in self.coords.items()}

    def __eq__(self, other):
        if not isinstance(other, JetPoint):
            return NotImplemented
        return self.order == other.order and self.base == other.base and self.coords == other.coords

    def __hash__(self):
        return hash((self.order, self.base, tuple(sorted(self.coords.items()))))

    @classmethod
    def zero(cls, k: int, base=(0, 0)) -> "JetPoint":
        return cls(k, base, {})

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "base": [_num_json(b) for b in self.base],
            "coords": [
                {"i": i, "sigma": [s.r1, s.r2], "value": _num_json(v)}
                for (i, s), v in sorted(self.coords.items())
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "JetPoint":
        coords = {(int(c["i"]), MultiIndex(*c["sigma"])): _num_from_json(c["value"]) for c in data["coords"]}
        return cls(int(data["order"]), tuple(_num_from_json(b) for b in data["base"]), coords)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def coord_name(i: int, s: Sequence[int], prefix: str = "u") -> str:
    return f"{prefix}{i}_{s[0]}_{s[1]}"


def _num_json(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else str(v.numerator)
    return v


def _num_from_json(v):
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, int):
        return Fraction(v)
    return float(v)


@dataclass(frozen=True)
class Section:
    """An equation of the class, as four coefficient expressions in x1, x2."""

    u: Tuple[Expr, Expr, Expr, Expr]

    def __post_init__(self):
        if len(self.u) != 4:
            raise ValueError("a section has exactly four coefficients")
        us = tuple(parse(c, BASE_VARIABLES) if isinstance(c, str) else c for c in self.u)
        for c in us:
            extra = c.free_variables - set(BASE_VARIABLES)
            if extra:
                raise ExprError(f"section coefficients may only use x1, x2 (found {sorted(extra)})")
        object.__setattr__(self, "u", us)

    @classmethod
    def zero(cls) -> "Section":
        return cls((ZERO, ZERO, ZERO, ZERO))

    def partial(self, i: int, sigma: Sequence[int]) -> Expr:
        return _partial(self.u[i], int(sigma[0]), int(sigma[1]))

    def to_json(self) -> dict:
        return {f"u{i}": render(c) for i, c in enumerate(self.u)}

    @classmethod
    def from_json(cls, data: Mapping[str, str]) -> "Section":
        return cls(tuple(_parse_coeff(data.get(f"u{i}", "0")) for i in range(4)))

    def rhs(self) -> Expr:
        """Right-hand side in the variables x, y, p."""
        ren = {"x1": Var("x"), "x2": Var("y")}
        p = Var("p")
        return add(*(mul(substitute(c, ren), power(p, i)) for i, c in enumerate(self.u)))


def _parse_coeff(text: str) -> Expr:
    e = parse(text, BASE_VARIABLES + ("x", "y"))
    return substitute(e, {"x": Var("x1"), "y": Var("x2")})


@lru_cache(maxsize=100_000)
def _partial(e: Expr, r1: int, r2: int) -> Expr:
    if r1 > 0:
        return diff(_partial(e, r1 - 1, r2), "x1")
    if r2 > 0:
        return diff(_partial(e, 0, r2 - 1), "x2")
    return e


def rhs_to_section(f: Expr | str) -> Section:
    """Split a right-hand side ``f(x, y, p)`` into its coefficients in ``p``."""
    if isinstance(f, str):
        f = parse(f, RHS_VARIABLES)
    r = to_rational(f).cancel()
    for fac in r.den:
        if "p" in fac.variables():
            raise NotInClassError("right-hand side is not polynomial in p")
    for atom in r.atoms.values():
        if "p" in atom.free_variables:
            raise NotInClassError("p appears inside a transcendental function")
    if r.num.degree_in("p") > 3:
        raise NotInClassError(f"degree {r.num.degree_in('p')} in p exceeds 3")
    groups: Dict[int, dict] = {k: {} for k in range(4)}
    for m, c in r.num.terms.items():
        d = dict(m)
        k = d.pop("p", 0)
        groups[k][tuple(sorted(d.items()))] = c
    ren = {"x": Var("x1"), "y": Var("x2")}
    coeffs = []
    for k in range(4):
        part = RationalFunction(Poly(groups[k]), r.den, r.atoms).cancel()
        coeffs.append(substitute(part.to_expr(), ren))
    return Section(tuple(coeffs))


def jet_eval(S: Section, p: Sequence, k: int) -> JetPoint:
    """The k-jet of ``S`` at the base point ``p``."""
    env = {"x1": _as_number(p[0]), "x2": _as_number(p[1])}
    coords = {}
    for i in range(4):
        for s in multi_indices(k):
            try:
                coords[(i, s)] = evaluate(S.partial(i, s), env)
            except EvaluationError as exc:
                raise EvaluationError(f"section singular at {tuple(p)} (u{i}_{tuple(s)}): {exc}") from exc
    return JetPoint(k, (env["x1"], env["x2"]), coords)


def project(theta: JetPoint, r: int) -> JetPoint:
    if r > theta.order:
        raise ValueError(f"cannot project a {theta.order}-jet to order {r}")
    return JetPoint(r, theta.base, {c: v for c, v in theta.coords.items() if c[1].order <= r})


def representative_section(theta: JetPoint) -> Section:
    """The Taylor-polynomial section whose k-jet at the base point is ``theta``."""
    if not theta.is_exact:
        raise TypeError("representative sections need exact rational jets")
    dx = add(Var("x1"), Const(-theta.base[0]))
    dy = add(Var("x2"), Const(-theta.base[1]))
    us = []
    for i in range(4):
        terms = []
        for s in multi_indices(theta.order):
            v = theta.coords[(i, s)]
            if v:
                terms.append(mul(Const(v / s.factorial()), power(dx, s.r1), power(dy, s.r2)))
        us.append(add(*terms))
    return Section(tuple(us))


def taylor_polynomials(theta: JetPoint):
    """Coefficient Taylor polynomials as ``Series2`` data around the base point."""
    from .series import Series2

    return [
        Series2({tuple(s): theta.coords[(i, s)] / s.factorial() for s in multi_indices(theta.order)}, theta.order)
        for i in range(4)
    ]


def random_jet(rng, k: int, base=None, num: int = 9, den: int = 6) -> JetPoint:
    """A jet with small random rational coordinates (seeded through ``rng``)."""

    def q():
        return Fraction(rng.randint(-num, num), rng.randint(1, den))

    if base is None:
        base = (Fraction(rng.randint(-6, 6), rng.randint(1, 4)), Fraction(rng.randint(-6, 6), rng.randint(1, 4)))
    return JetPoint(k, base, {(i, s): q() for i in range(4) for s in multi_indices(k)})


def random_polynomial(rng, degree: int = 2, num: int = 2, den: int = 3, variables=BASE_VARIABLES) -> Expr:
    x, y = (Var(v) for v in variables)
    terms = []
    for n in range(degree + 1):
        for a in range(n + 1):
            c = Fraction(rng.randint(-num, num), rng.randint(1, den))
            if c:
                terms.append(mul(c, power(x, a), power(y, n - a)))
    return add(*terms)


def random_section(rng, degree: int = 2) -> Section:
    return Section(tuple(random_polynomial(rng, degree) for _ in range(4)))
