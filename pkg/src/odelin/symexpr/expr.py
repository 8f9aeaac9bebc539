"""Immutable expression trees over exact rationals.

Nodes are built through the smart constructors (``add``, ``mul``, ``power``,
``div``, ``func``) which fold constants and flatten nested sums/products, so
that ``parse(render(e)) == e`` holds structurally for every tree they build.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Union

FUNCTIONS = ("exp", "log", "sin", "cos")

Number = Union[int, Fraction, float]


class ExprError(Exception):
    pass


class EvaluationError(ExprError):
    """Raised when an expression is singular at the requested point."""

    def __init__(self, message: str, subexpr: "Expr | None" = None):
        if subexpr is not None:
            message = f"{message}: {render(subexpr)}"
        super().__init__(message)
        self.subexpr = subexpr


class Expr:
    __slots__ = ("_hash", "_free")

    def _key(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented if not isinstance(other, Expr) else False
        return self._key() == other._key()

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            h = hash((type(self).__name__, self._key()))
            object.__setattr__(self, "_hash", h)
            return h

    @property
    def free_variables(self) -> frozenset:
        try:
            return self._free
        except AttributeError:
            fv = self._compute_free()
            object.__setattr__(self, "_free", fv)
            return fv

    def _compute_free(self) -> frozenset:
        out = frozenset()
        for child in self.children():
            out |= child.free_variables
        return out

    def children(self) -> tuple:
        return ()

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return add(self, neg(other))

    def __rsub__(self, other):
        return add(other, neg(self))

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n):
        if not isinstance(n, int):
            raise ExprError("only integer exponents are supported")
        return power(self, n)

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"<{type(self).__name__} {render(self)}>"


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        if isinstance(value, float):
            raise ExprError("Const holds exact rationals only")
        object.__setattr__(self, "value", Fraction(value))

    def __setattr__(self, *a):
        raise AttributeError("Expr is immutable")

    def _key(self):
        return (self.value,)


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)

    def __setattr__(self, *a):
        raise AttributeError("Expr is immutable")

    def _key(self):
        return (self.name,)

    def _compute_free(self):
        return frozenset((self.name,))


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms: tuple):
        object.__setattr__(self, "terms", tuple(terms))

    def __setattr__(self, *a):
        raise AttributeError("Expr is immutable")

    def _key(self):
        return self.terms

    def children(self):
        return self.terms


class Mul(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors: tuple):
        object.__setattr__(self, "factors", tuple(factors))

    def __setattr__(self, *a):
        raise AttributeError("Expr is immutable")

    def _key(self):
        return self.factors

    def children(self):
        return self.factors


class Pow(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base: Expr, exp: int):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exp", int(exp))

    def __setattr__(self, *a):
        raise AttributeError("Expr is immutable")

    def _key(self):
        return (self.base, self.exp)

    def children(self):
        return (self.base,)


class Div(Expr):
    __slots__ = ("num", "den")

    def __init__(self, num: Expr, den: Expr):
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("Expr is immutable")

    def _key(self):
        return (self.num, self.den)

    def children(self):
        return (self.num, self.den)


class Func(Expr):
    __slots__ = ("name", "arg")

    def __init__(self, name: str, arg: Expr):
        if name not in FUNCTIONS:
            raise ExprError(f"unknown function {name!r}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "arg", arg)

    def __setattr__(self, *a):
        raise AttributeError("Expr is immutable")

    def _key(self):
        return (self.name, self.arg)

    def children(self):
        return (self.arg,)


ZERO = Const(0)
ONE = Const(1)


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Const(x)
    if isinstance(x, str):
        return Var(x)
    raise ExprError(f"cannot convert {x!r} to an expression")


def is_const(e: Expr, value=None) -> bool:
    return isinstance(e, Const) and (value is None or e.value == value)


# -- smart constructors -------------------------------------------------------


def add(*args) -> Expr:
    terms = []
    const = Fraction(0)
    for a in args:
        a = as_expr(a)
        parts = a.terms if isinstance(a, Add) else (a,)
        for t in parts:
            if isinstance(t, Const):
                const += t.value
            else:
                terms.append(t)
    if const:
        terms.append(Const(const))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    return Add(tuple(terms))


def mul(*args) -> Expr:
    factors = []
    const = Fraction(1)
    for a in args:
        a = as_expr(a)
        parts = a.factors if isinstance(a, Mul) else (a,)
        for f in parts:
            if isinstance(f, Const):
                const *= f.value
            else:
                factors.append(f)
    if const == 0:
        return ZERO
    if not factors:
        return Const(const)
    if const != 1:
        factors.insert(0, Const(const))
    if len(factors) == 1:
        return factors[0]
    return Mul(tuple(factors))


def neg(e) -> Expr:
    return mul(Const(-1), e)


def power(base, n: int) -> Expr:
    base = as_expr(base)
    if n == 0:
        return ONE
    if n == 1:
        return base
    if isinstance(base, Const) and (n > 0 or base.value != 0):
        return Const(base.value**n)
    if isinstance(base, Pow):
        return power(base.base, base.exp * n)
    return Pow(base, n)


def div(num, den) -> Expr:
    num, den = as_expr(num), as_expr(den)
    if isinstance(den, Const) and den.value != 0:
        return mul(Const(1 / den.value), num)
    if is_const(num, 0) and not isinstance(den, Const):
        return ZERO
    return Div(num, den)


def func(name: str, arg) -> Expr:
    arg = as_expr(arg)
    if isinstance(arg, Const):
        if arg.value == 0 and name in ("exp", "cos"):
            return ONE
        if arg.value == 0 and name == "sin":
            return ZERO
        if arg.value == 1 and name == "log":
            return ZERO
    return Func(name, arg)


def exp(e):
    return func("exp", e)


def log(e):
    return func("log", e)


def sin(e):
    return func("sin", e)


def cos(e):
    return func("cos", e)


# -- rendering ----------------------------------------------------------------


def _render_const(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def _atomic(e: Expr) -> bool:
    if isinstance(e, (Var, Func)):
        return True
    return isinstance(e, Const) and e.value >= 0 and e.value.denominator == 1


def _render_factor(f: Expr) -> str:
    s = render(f)
    if isinstance(f, (Add, Div)):
        return f"({s})"
    return s


def _render_mul_body(factors: tuple) -> str:
    return "*".join(_render_factor(f) for f in factors)


def _render_term(t: Expr, first: bool) -> str:
    if isinstance(t, Mul) and isinstance(t.factors[0], Const) and t.factors[0].value < 0:
        c = -t.factors[0].value
        rest = t.factors[1:]
        body = _render_mul_body(rest) if c == 1 else _render_const(c) + "*" + _render_mul_body(rest)
        return ("-" if first else " - ") + body
    if isinstance(t, Const) and t.value < 0:
        return ("-" if first else " - ") + _render_const(-t.value)
    s = render(t)
    return s if first else " + " + s


def render(e: Expr) -> str:
    if isinstance(e, Const):
        return _render_const(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Add):
        return "".join(_render_term(t, i == 0) for i, t in enumerate(e.terms))
    if isinstance(e, Mul):
        head = e.factors[0]
        if isinstance(head, Const):
            rest = _render_mul_body(e.factors[1:])
            if head.value == -1:
                return "-" + rest
            return _render_const(head.value) + "*" + rest
        return _render_mul_body(e.factors)
    if isinstance(e, Pow):
        b = render(e.base)
        if not _atomic(e.base):
            b = f"({b})"
        n = str(e.exp) if e.exp >= 0 else f"({e.exp})"
        return f"{b}^{n}"
    if isinstance(e, Div):
        n = render(e.num)
        if isinstance(e.num, Add):
            n = f"({n})"
        d = render(e.den)
        if not (_atomic(e.den) or isinstance(e.den, Pow)):
            d = f"({d})"
        return f"{n}/{d}"
    if isinstance(e, Func):
        return f"{e.name}({render(e.arg)})"
    raise ExprError(f"unknown node {e!r}")


# -- calculus and evaluation --------------------------------------------------


@lru_cache(maxsize=200_000)
def diff(e: Expr, v: str) -> Expr:
    """Partial derivative of ``e`` with respect to the variable ``v``."""
    if v not in e.free_variables:
        return ZERO
    if isinstance(e, Var):
        return ONE
    if isinstance(e, Add):
        return add(*(diff(t, v) for t in e.terms))
    if isinstance(e, Mul):
        fs = e.factors
        out = []
        for i, f in enumerate(fs):
            d = diff(f, v)
            if not is_const(d, 0):
                out.append(mul(*fs[:i], d, *fs[i + 1:]))
        return add(*out)
    if isinstance(e, Pow):
        return mul(e.exp, power(e.base, e.exp - 1), diff(e.base, v))
    if isinstance(e, Div):
        dn, dd = diff(e.num, v), diff(e.den, v)
        top = add(mul(dn, e.den), neg(mul(e.num, dd)))
        return div(top, power(e.den, 2))
    if isinstance(e, Func):
        da = diff(e.arg, v)
        if e.name == "exp":
            return mul(e, da)
        if e.name == "log":
            return div(da, e.arg)
        if e.name == "sin":
            return mul(cos(e.arg), da)
        if e.name == "cos":
            return neg(mul(sin(e.arg), da))
    raise ExprError(f"cannot differentiate {e!r}")


def diff_multi(e: Expr, counts: Mapping[str, int]) -> Expr:
    for v, n in counts.items():
        for _ in range(n):
            e = diff(e, v)
    return e


def _num(x):
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    return x


def evaluate(e: Expr, env: Mapping[str, Number]):
    """Evaluate ``e``; exact ``Fraction`` when everything on the path is rational."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        try:
            return _num(env[e.name])
        except KeyError:
            raise ExprError(f"unbound variable {e.name!r}") from None
    if isinstance(e, Add):
        total = Fraction(0)
        for t in e.terms:
            total = total + evaluate(t, env)
        return total
    if isinstance(e, Mul):
        prod = Fraction(1)
        for f in e.factors:
            prod = prod * evaluate(f, env)
        return prod
    if isinstance(e, Pow):
        b = evaluate(e.base, env)
        if b == 0 and e.exp < 0:
            raise EvaluationError("division by zero", e)
        try:
            return b**e.exp
        except OverflowError:
            raise EvaluationError("overflow", e) from None
    if isinstance(e, Div):
        d = evaluate(e.den, env)
        if d == 0:
            raise EvaluationError("division by zero", e)
        return evaluate(e.num, env) / d
    if isinstance(e, Func):
        a = evaluate(e.arg, env)
        try:
            if e.name == "exp":
                return math.exp(a)
            if e.name == "log":
                if a <= 0:
                    raise EvaluationError("log of non-positive value", e)
                return math.log(a)
            if e.name == "sin":
                return math.sin(a)
            if e.name == "cos":
                return math.cos(a)
        except OverflowError:
            raise EvaluationError("overflow", e) from None
    raise ExprError(f"cannot evaluate {e!r}")


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    mapping = {k: as_expr(v) for k, v in mapping.items()}
    cache: dict = {}

    def go(x: Expr) -> Expr:
        if not (x.free_variables & mapping.keys()):
            return x
        if x in cache:
            return cache[x]
        if isinstance(x, Var):
            r = mapping[x.name]
        elif isinstance(x, Add):
            r = add(*(go(t) for t in x.terms))
        elif isinstance(x, Mul):
            r = mul(*(go(f) for f in x.factors))
        elif isinstance(x, Pow):
            r = power(go(x.base), x.exp)
        elif isinstance(x, Div):
            r = div(go(x.num), go(x.den))
        elif isinstance(x, Func):
            r = func(x.name, go(x.arg))
        else:
            r = x
        cache[x] = r
        return r

    return go(e)


def _py(e: Expr) -> str:
    if isinstance(e, Const):
        return repr(float(e.value))
    if isinstance(e, Var):
        return f"_v_{e.name}"
    if isinstance(e, Add):
        return "(" + " + ".join(_py(t) for t in e.terms) + ")"
    if isinstance(e, Mul):
        return "(" + " * ".join(_py(f) for f in e.factors) + ")"
    if isinstance(e, Pow):
        return f"({_py(e.base)} ** {e.exp})"
    if isinstance(e, Div):
        return f"({_py(e.num)} / {_py(e.den)})"
    if isinstance(e, Func):
        return f"_m.{e.name}({_py(e.arg)})"
    raise ExprError(f"cannot compile {e!r}")


def lambdify(e: Expr, variables: tuple):
    """Compile ``e`` into a float-valued Python callable of ``variables``."""
    missing = e.free_variables - set(variables)
    if missing:
        raise ExprError(f"unbound variables {sorted(missing)}")
    args = ", ".join(f"_v_{v}" for v in variables)
    src = f"lambda {args}: {_py(e)}"
    return eval(src, {"_m": math})
