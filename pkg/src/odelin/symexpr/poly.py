"""Sparse multivariate polynomials over Q and a factored rational normal form.

Monomials are tuples of ``(variable, exponent)`` pairs sorted by variable
name.  Terms are ordered graded-lexicographically, variables compared by
name.  Transcendental subtrees (``exp(...)`` etc.) enter as opaque atoms
whose variable name is their normalized rendering.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Mapping, Tuple

from .expr import (
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
    div,
    evaluate,
    func,
    mul,
    power,
    render,
)

Monomial = Tuple[Tuple[str, int], ...]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        va, ea = a[i]
        vb, eb = b[j]
        if va == vb:
            out.append((va, ea + eb))
            i += 1
            j += 1
        elif va < vb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def _mono_div(a: Monomial, b: Monomial):
    """``a / b`` if ``b`` divides ``a``, else None."""
    d = dict(a)
    for v, e in b:
        have = d.get(v, 0)
        if have < e:
            return None
        if have == e:
            del d[v]
        else:
            d[v] = have - e
    return tuple(sorted(d.items()))


def _deg(m: Monomial) -> int:
    return sum(e for _, e in m)


class Poly:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        self.terms: Dict[Monomial, Fraction] = {m: c for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(): Fraction(c)})

    @classmethod
    def var(cls, name: str) -> "Poly":
        return cls({((name, 1),): Fraction(1)})

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            self._hash = hash(frozenset(self.terms.items()))
            return self._hash

    def __repr__(self):
        return f"Poly({render(self.to_expr())})"

    def variables(self) -> frozenset:
        return frozenset(v for m in self.terms for v, _ in m)

    def __add__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = Fraction(other)
            return Poly({m: v * c for m, v in self.terms.items()})
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ExprError("negative power of a polynomial")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def degree_in(self, v: str) -> int:
        return max((dict(m).get(v, 0) for m in self.terms), default=0)

    def total_degree(self) -> int:
        return max((_deg(m) for m in self.terms), default=0)

    def diff(self, v: str) -> "Poly":
        out: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(v, 0)
            if e == 0:
                continue
            if e == 1:
                del d[v]
            else:
                d[v] = e - 1
            key = tuple(sorted(d.items()))
            out[key] = out.get(key, 0) + c * e
        return Poly(out)

    def evaluate(self, env: Mapping[str, object]):
        total = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for v, e in m:
                t = t * env[v] ** e
            total = total + t
        return total

    def partial_eval(self, env: Mapping[str, object]) -> "Poly":
        """Substitute numbers for the variables in ``env``; others stay symbolic."""
        out: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            keep = []
            for v, e in m:
                if v in env:
                    c = c * env[v] ** e
                else:
                    keep.append((v, e))
            if c != 0:
                key = tuple(keep)
                out[key] = out.get(key, 0) + c
        return Poly(out)

    def linear_coefficients(self) -> Dict[str, Fraction]:
        """Coefficients of a homogeneous linear polynomial."""
        out = {}
        for m, c in self.terms.items():
            if len(m) != 1 or m[0][1] != 1:
                raise ExprError(f"not homogeneous linear: {self!r}")
            out[m[0][0]] = c
        return out

    def sorted_terms(self):
        vs = sorted(self.variables())

        def key(item):
            d = dict(item[0])
            return (_deg(item[0]), tuple(d.get(v, 0) for v in vs))

        return sorted(self.terms.items(), key=key, reverse=True)

    def leading_term(self):
        return self.sorted_terms()[0]

    def exact_divide(self, other: "Poly"):
        """``self / other`` when the division is exact, else None."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        vs = sorted(self.variables() | other.variables())

        def key(m):
            d = dict(m)
            return (_deg(m), tuple(d.get(v, 0) for v in vs))

        lm, lc = max(other.terms.items(), key=lambda it: key(it[0]))
        rem = dict(self.terms)
        quot: Dict[Monomial, Fraction] = {}
        while rem:
            m, c = max(rem.items(), key=lambda it: key(it[0]))
            q = _mono_div(m, lm)
            if q is None:
                return None
            qc = c / lc
            quot[q] = quot.get(q, 0) + qc
            for m2, c2 in other.terms.items():
                mm = _mono_mul(q, m2)
                nv = rem.get(mm, 0) - qc * c2
                if nv:
                    rem[mm] = nv
                else:
                    rem.pop(mm, None)
        return Poly(quot)

    def to_expr(self, atoms: Mapping[str, Expr] | None = None) -> Expr:
        atoms = atoms or {}
        terms = []
        for m, c in self.sorted_terms():
            fs = [power(atoms[v] if v in atoms else Var(v), e) for v, e in m]
            terms.append(mul(c, *fs))
        return add(*terms)


def _factor(p: Poly):
    """Split ``p`` into ``(constant, [(factor, multiplicity), ...])``.

    Factors are monic in the term order and carry no monomial content;
    variable factors are split out individually.
    """
    if p.is_zero():
        raise EvaluationError("division by an identically zero polynomial")
    _, lc = p.leading_term()
    content: Dict[str, int] | None = None
    for m in p.terms:
        d = dict(m)
        if content is None:
            content = d
        else:
            content = {v: min(e, d[v]) for v, e in content.items() if v in d}
    factors = []
    if content:
        mono = tuple(sorted(content.items()))
        stripped = {}
        for m, c in p.terms.items():
            stripped[_mono_div(m, mono)] = c / lc
        rest = Poly(stripped)
        for v, e in mono:
            factors.append((Poly.var(v), e))
    else:
        rest = p * (1 / lc)
    if not rest.is_constant():
        factors.append((rest, 1))
    return lc, factors


class RationalFunction:
    """``num / prod(f**e for f, e in den.items())`` with opaque atoms."""

    __slots__ = ("num", "den", "atoms")

    def __init__(self, num: Poly, den: Dict[Poly, int] | None = None, atoms=None):
        self.num = num
        self.den = {f: e for f, e in (den or {}).items() if e}
        self.atoms: Dict[str, Expr] = dict(atoms or {})

    @classmethod
    def from_poly(cls, p: Poly, atoms=None):
        return cls(p, {}, atoms)

    def _merge_atoms(self, other):
        a = dict(self.atoms)
        a.update(other.atoms)
        return a

    def den_poly(self) -> Poly:
        out = Poly.const(1)
        for f, e in self.den.items():
            out = out * f**e
        return out

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def has_atoms(self) -> bool:
        return bool(self.atoms)

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        lcm = dict(self.den)
        for f, e in other.den.items():
            lcm[f] = max(lcm.get(f, 0), e)

        def lift(r):
            n = r.num
            for f, e in lcm.items():
                k = e - r.den.get(f, 0)
                if k:
                    n = n * f**k
            return n

        return RationalFunction(lift(self) + lift(other), lcm, self._merge_atoms(other))

    def __neg__(self):
        return RationalFunction(-self.num, self.den, self.atoms)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        den = dict(self.den)
        for f, e in other.den.items():
            den[f] = den.get(f, 0) + e
        return RationalFunction(self.num * other.num, den, self._merge_atoms(other)).cancel()

    def reciprocal(self) -> "RationalFunction":
        c, factors = _factor(self.num)
        den = {}
        for f, e in factors:
            den[f] = den.get(f, 0) + e
        return RationalFunction(self.den_poly() * (1 / c), den, self.atoms)

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        return self * other.reciprocal()

    def __pow__(self, n: int) -> "RationalFunction":
        if n < 0:
            return self.reciprocal() ** (-n)
        return RationalFunction(self.num**n, {f: e * n for f, e in self.den.items()}, self.atoms)

    def cancel(self) -> "RationalFunction":
        if self.num.is_zero():
            return RationalFunction(self.num, {}, self.atoms)
        num = self.num
        den = {}
        for f, e in self.den.items():
            while e > 0:
                q = num.exact_divide(f)
                if q is None:
                    break
                num = q
                e -= 1
            if e:
                den[f] = e
        return RationalFunction(num, den, self.atoms)

    def variables(self) -> frozenset:
        out = self.num.variables()
        for f in self.den:
            out |= f.variables()
        return out

    def to_expr(self) -> Expr:
        n = self.num.to_expr(self.atoms)
        if not self.den:
            return n
        dens = []
        for f, e in sorted(self.den.items(), key=lambda it: render(it[0].to_expr(self.atoms))):
            dens.append(power(f.to_expr(self.atoms), e))
        return div(n, mul(*dens))


def to_rational(e: Expr) -> RationalFunction:
    """Expand ``e`` into the factored rational normal form (uncancelled)."""
    memo: Dict[Expr, RationalFunction] = {}

    def go(x: Expr) -> RationalFunction:
        if x in memo:
            return memo[x]
        if isinstance(x, Const):
            r = RationalFunction.from_poly(Poly.const(x.value))
        elif isinstance(x, Var):
            r = RationalFunction.from_poly(Poly.var(x.name))
        elif isinstance(x, Add):
            r = go(x.terms[0])
            for t in x.terms[1:]:
                r = r + go(t)
        elif isinstance(x, Mul):
            r = go(x.factors[0])
            for f in x.factors[1:]:
                r = r * go(f)
        elif isinstance(x, Pow):
            r = go(x.base) ** x.exp
        elif isinstance(x, Div):
            r = go(x.num)
            for f, n in _den_factors(x.den):
                r = r * go(f).reciprocal() ** n
        elif isinstance(x, Func):
            arg = normalize(x.arg)
            atom = func(x.name, arg)
            if isinstance(atom, Func):
                key = render(atom)
                r = RationalFunction.from_poly(Poly.var(key), {key: atom})
            else:
                r = go(atom)
        else:
            raise ExprError(f"unknown node {x!r}")
        memo[x] = r
        return r

    return go(e)


def _den_factors(e: Expr):
    """Split a denominator into (base, exponent) factors without expanding."""
    if isinstance(e, Mul):
        out = []
        for f in e.factors:
            out.extend(_den_factors(f))
        return out
    if isinstance(e, Pow) and e.exp > 0:
        return [(e.base, e.exp)]
    return [(e, 1)]


def normalize(e: Expr) -> Expr:
    """Canonical form: expanded numerator over a product of monic factors."""
    return to_rational(e).cancel().to_expr()

