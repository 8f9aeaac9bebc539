"""Truncated power series in two variables, plus map reversion.

Coefficients may be any field-like numbers (``Fraction`` for exact work,
``float`` otherwise).  ``coeffs[(a, b)]`` multiplies ``s1**a * s2**b``.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Dict, Tuple


class Series2:
    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Dict[Tuple[int, int], object], order: int):
        self.order = order
        self.coeffs = {k: v for k, v in coeffs.items() if sum(k) <= order and v != 0}

    @classmethod
    def constant(cls, c, order: int) -> "Series2":
        return cls({(0, 0): c}, order)

    @classmethod
    def variable(cls, j: int, order: int) -> "Series2":
        return cls({(1, 0) if j == 1 else (0, 1): Fraction(1)}, order)

    @classmethod
    def from_partials(cls, partials: Dict[Tuple[int, int], object], order: int) -> "Series2":
        """Build from partial derivatives ``d^(a+b) f / dx1^a dx2^b`` at the center."""
        return cls({k: v / (factorial(k[0]) * factorial(k[1])) for k, v in partials.items()}, order)

    def __getitem__(self, k):
        return self.coeffs.get(k, 0)

    def partial(self, a: int, b: int):
        return self[(a, b)] * factorial(a) * factorial(b)

    def const(self):
        return self[(0, 0)]

    def truncate(self, order: int) -> "Series2":
        return Series2(self.coeffs, min(order, self.order))

    def __add__(self, other):
        if not isinstance(other, Series2):
            out = dict(self.coeffs)
            out[(0, 0)] = out.get((0, 0), 0) + other
            return Series2(out, self.order)
        n = min(self.order, other.order)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return Series2(out, n)

    __radd__ = __add__

    def __neg__(self):
        return Series2({k: -v for k, v in self.coeffs.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Series2):
            return Series2({k: v * other for k, v in self.coeffs.items()}, self.order)
        n = min(self.order, other.order)
        out: Dict[Tuple[int, int], object] = {}
        for (a1, b1), v1 in self.coeffs.items():
            for (a2, b2), v2 in other.coeffs.items():
                if a1 + b1 + a2 + b2 <= n:
                    k = (a1 + a2, b1 + b2)
                    out[k] = out.get(k, 0) + v1 * v2
        return Series2(out, n)

    __rmul__ = __mul__

    def reciprocal(self) -> "Series2":
        c0 = self.const()
        if c0 == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        h = (self - c0) * (1 / c0)
        result = Series2.constant(Fraction(1) if not isinstance(c0, float) else 1.0, self.order)
        term = result
        for _ in range(self.order):
            term = term * (-h)
            result = result + term
        return result * (1 / c0)

    def __truediv__(self, other):
        if not isinstance(other, Series2):
            return self * (1 / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def deriv(self, j: int) -> "Series2":
        out = {}
        for (a, b), v in self.coeffs.items():
            if j == 1 and a > 0:
                out[(a - 1, b)] = v * a
            elif j == 2 and b > 0:
                out[(a, b - 1)] = v * b
        return Series2(out, self.order - 1)

    def compose(self, s1: "Series2", s2: "Series2") -> "Series2":
        """``self(s1, s2)``; ``s1`` and ``s2`` must have zero constant term."""
        if s1.const() != 0 or s2.const() != 0:
            raise ValueError("composition needs zero constant terms")
        n = min(s1.order, s2.order)
        maxa = max((a for a, _ in self.coeffs), default=0)
        maxb = max((b for _, b in self.coeffs), default=0)
        p1 = [Series2.constant(Fraction(1), n)]
        for _ in range(maxa):
            p1.append(p1[-1] * s1)
        p2 = [Series2.constant(Fraction(1), n)]
        for _ in range(maxb):
            p2.append(p2[-1] * s2)
        out = Series2({}, n)
        for (a, b), v in self.coeffs.items():
            if a + b <= n:
                out = out + p1[a] * p2[b] * v
        return out

    def __eq__(self, other):
        if not isinstance(other, Series2):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __repr__(self):
        return f"Series2(order={self.order}, {self.coeffs})"


def invert_map(f1: Series2, f2: Series2) -> Tuple[Series2, Series2]:
    """Reversion of a map with ``f(0) = 0`` and invertible linear part.

    Returns ``(g1, g2)`` with ``f(g(t)) = t`` to the common order.
    """
    n = min(f1.order, f2.order)
    if f1.const() != 0 or f2.const() != 0:
        raise ValueError("map must fix the origin")
    a, b = f1[(1, 0)], f1[(0, 1)]
    c, d = f2[(1, 0)], f2[(0, 1)]
    det = a * d - b * c
    if det == 0:
        raise ZeroDivisionError("singular linear part")
    ia, ib, ic, id_ = d / det, -b / det, -c / det, a / det
    n1 = f1 - Series2({(1, 0): a, (0, 1): b}, n)
    n2 = f2 - Series2({(1, 0): c, (0, 1): d}, n)
    t1, t2 = Series2.variable(1, n), Series2.variable(2, n)
    g1 = t1 * ia + t2 * ib
    g2 = t1 * ic + t2 * id_
    for _ in range(n):
        r1 = t1 - n1.compose(g1, g2)
        r2 = t2 - n2.compose(g1, g2)
        g1 = r1 * ia + r2 * ib
        g2 = r1 * ic + r2 * id_
    return g1, g2
