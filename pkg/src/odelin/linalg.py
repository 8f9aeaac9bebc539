"""Exact linear algebra over Q (row reduction with ``Fraction`` entries)."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence, Tuple

Matrix = List[List[Fraction]]


class SingularSystemError(ArithmeticError):
    pass


def _check_exact(rows: Sequence[Sequence]) -> None:
    for row in rows:
        for x in row:
            if isinstance(x, float):
                raise TypeError("exact linear algebra rejects floating-point entries")


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and pivot columns."""
    _check_exact(rows)
    m = [[Fraction(x) for x in row] for row in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        pv = m[r][c]
        if pv != 1:
            m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                ri = m[i]
                rr = m[r]
                m[i] = [a - f * b for a, b in zip(ri, rr)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> Matrix:
    """Basis of ``{x : A x = 0}`` in reduced echelon form."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    if not basis:
        return []
    return rref(basis, ncols)[0]


def solve(rows: Sequence[Sequence], rhs: Sequence, ncols: int) -> List[Fraction]:
    """Unique solution of ``A x = b``; raises if inconsistent or underdetermined."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        raise SingularSystemError("inconsistent linear system")
    if len(pivots) < ncols:
        raise SingularSystemError(f"solution not unique (nullity {ncols - len(pivots)})")
    x = [Fraction(0)] * ncols
    for row, p in zip(red, pivots):
        x[p] = row[ncols]
    return x


def matvec(rows: Sequence[Sequence], v: Sequence) -> List:
    return [sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in rows]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    cols = list(zip(*b)) if b else []
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols] for row in a]


def span_equal(a: Sequence[Sequence], b: Sequence[Sequence], ncols: int) -> bool:
    return rref(a, ncols)[0] == rref(b, ncols)[0] if (a or b) else True


def in_span(v: Sequence, basis: Sequence[Sequence], ncols: int) -> bool:
    if not any(v):
        return True
    return rank(list(basis) + [list(v)], ncols) == rank(basis, ncols)


def coordinates(v: Sequence, basis: Sequence[Sequence]) -> List[Fraction]:
    """Coordinates of ``v`` in an independent ``basis`` (exact, unique)."""
    ncols = len(basis)
    rows = [[b[i] for b in basis] for i in range(len(v))]
    return solve(rows, v, ncols)
