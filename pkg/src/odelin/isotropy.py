"""Isotropy algebras, isotropy spaces, the symbol and its Spencer complex.

Field jets are coordinatized by the partial derivatives ``X^i_tau`` in the
order of :func:`odelin.fieldlift.field_coordinates`: component ``i`` first,
then ``|tau|``, then descending ``r1``.  A homogeneous piece of grade ``k``
holds the coefficients with ``|tau| = k``; it is the quotient
``L^(k-1)/L^k``, identified with ``V (x) S^k V*``.

Polarization: the coefficient of ``d_i (x) dx^j . dx^l`` (``j <= l``) is
the partial derivative ``X^i_jl`` itself, so ``e1 = 2 d_1 (x) dx^1.dx^1 +
d_2 (x) dx^1.dx^2`` has ``X^1_11 = 2`` and ``X^2_12 = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .fieldlift import (
    FieldCoord,
    VectorFieldJet,
    bracket,
    field_coordinates,
    psi_linear_form,
)
from .jetspace import JetPoint, MultiIndex, coord_name, multi_indices
from .linalg import coordinates, in_span, matmul, nullspace, rank, rref, span_equal


class GradeCompatibilityError(ValueError):
    pass


def _unknown_name(c: FieldCoord) -> str:
    return coord_name(c[0], c[1], "X")


@dataclass(frozen=True)
class LinearSystem:
    """Homogeneous system ``A x = 0`` over Q with named unknowns."""

    matrix: Tuple[Tuple[Fraction, ...], ...]
    unknowns: Tuple[FieldCoord, ...]
    equations: Tuple[str, ...] = ()

    @property
    def names(self) -> List[str]:
        return [_unknown_name(c) for c in self.unknowns]

    def rank(self) -> int:
        return rank(self.matrix, len(self.unknowns)) if self.matrix else 0

    def nullspace(self) -> List[List[Fraction]]:
        return nullspace(self.matrix, len(self.unknowns))

    def to_json(self) -> dict:
        return {
            "unknowns": self.names,
            "equations": list(self.equations),
            "matrix": [[str(x) for x in row] for row in self.matrix],
        }


@dataclass(frozen=True)
class SubspaceBasis:
    """A subspace of field jets at ``base``, given by coordinate vectors over ``coords``."""

    vectors: Tuple[Tuple[Fraction, ...], ...]
    coords: Tuple[FieldCoord, ...]
    base: Tuple[Fraction, Fraction] = (Fraction(0), Fraction(0))
    label: str = ""

    def __post_init__(self):
        vs = tuple(tuple(Fraction(x) for x in v) for v in self.vectors)
        if vs and rank(vs, len(self.coords)) != len(vs):
            raise ValueError("basis vectors are linearly dependent")
        object.__setattr__(self, "vectors", vs)
        object.__setattr__(self, "coords", tuple((i, MultiIndex(*t)) for i, t in self.coords))

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @property
    def order(self) -> int:
        return max(t.order for _, t in self.coords)

    def field(self, v: Sequence) -> VectorFieldJet:
        return VectorFieldJet(self.order, self.base, dict(zip(self.coords, v)))

    def fields(self) -> List[VectorFieldJet]:
        return [self.field(v) for v in self.vectors]

    def vector_of(self, X: VectorFieldJet) -> List[Fraction]:
        return [X.coeffs.get(c, Fraction(0)) for c in self.coords]

    def restrict(self, coords: Sequence[FieldCoord], label: str = "") -> "SubspaceBasis":
        """Image under the coordinate projection onto ``coords`` (e.g. ``rho_{m,m-1}``)."""
        idx = [self.coords.index(c) for c in coords]
        rows = [[v[j] for j in idx] for v in self.vectors]
        red = rref(rows, len(idx))[0] if rows else []
        return SubspaceBasis(tuple(tuple(r) for r in red), tuple(coords), self.base, label)

    def project(self, m: int) -> "SubspaceBasis":
        return self.restrict([c for c in self.coords if c[1].order <= m], self.label)

    def embed(self, coords: Sequence[FieldCoord]) -> "SubspaceBasis":
        """The same vectors written over a larger coordinate list (missing entries zero)."""
        pos = {c: j for j, c in enumerate(self.coords)}
        vs = tuple(tuple(v[pos[c]] if c in pos else Fraction(0) for c in coords) for v in self.vectors)
        return SubspaceBasis(vs, tuple(coords), self.base, self.label)

    def contains(self, v) -> bool:
        if isinstance(v, VectorFieldJet):
            v = self.vector_of(v)
        return in_span(v, self.vectors, len(self.coords))

    def contains_space(self, other: "SubspaceBasis") -> bool:
        other = other.embed(self.coords) if other.coords != self.coords else other
        return all(self.contains(v) for v in other.vectors)

    def same_span(self, other: "SubspaceBasis") -> bool:
        if self.coords != other.coords:
            return False
        return span_equal(self.vectors, other.vectors, len(self.coords))

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "dim": self.dim,
            "unknowns": [_unknown_name(c) for c in self.coords],
            "basis": [[str(x) for x in v] for v in self.vectors],
        }


# -- systems from the generating function ---------------------------------------


def isotropy_system(theta: JetPoint, k: int, lo: int) -> LinearSystem:
    """Equations ``D_sigma psi^i = 0`` (``|sigma| <= k``) in unknowns ``lo <= |tau| <= k + 2``."""
    unknowns = field_coordinates(lo, k + 2)
    pos = {c: j for j, c in enumerate(unknowns)}
    env = theta.env()
    rows, names = [], []
    for s in multi_indices(k):
        for i in range(4):
            row = [Fraction(0)] * len(unknowns)
            for c, coeff in psi_linear_form(i, s.r1, s.r2):
                if c in pos:
                    row[pos[c]] = coeff.evaluate(env)
            rows.append(tuple(row))
            names.append(f"D{s.r1}_{s.r2} psi{i}")
    return LinearSystem(tuple(rows), tuple(unknowns), tuple(names))


def _require_exact(theta: JetPoint) -> None:
    if not theta.is_exact:
        raise TypeError("isotropy computations need exact rational jets")


def isotropy_algebra(theta: JetPoint) -> SubspaceBasis:
    """``g_theta_k``: field jets vanishing at the base point whose lift fixes ``theta``."""
    _require_exact(theta)
    sysm = isotropy_system(theta, theta.order, 1)
    return SubspaceBasis(tuple(map(tuple, sysm.nullspace())), sysm.unknowns, theta.base, f"g_theta{theta.order}")


def isotropy_space(theta: JetPoint) -> SubspaceBasis:
    """The isotropy space at ``theta`` of order ``k + 1``; unknowns ``0 <= |tau| <= k + 2``."""
    _require_exact(theta)
    k = theta.order - 1
    if k < 0:
        raise ValueError("isotropy spaces need a jet of order at least 1")
    sysm = isotropy_system(theta, k, 0)
    return SubspaceBasis(tuple(map(tuple, sysm.nullspace())), sysm.unknowns, theta.base, f"A_theta{theta.order}")


def ambient_dimension(m: int) -> int:
    """``dim W_p / L_p^m``: the number of coefficients of an m-jet of a plane field."""
    return len(field_coordinates(0, m))


# -- graded pieces ---------------------------------------------------------------


def grade_coordinates(k: int) -> Tuple[FieldCoord, ...]:
    return tuple(field_coordinates(k, k))


def full_grade(k: int, label: str = "") -> SubspaceBasis:
    cs = grade_coordinates(k)
    vs = tuple(tuple(Fraction(int(a == b)) for b in range(len(cs))) for a in range(len(cs)))
    return SubspaceBasis(vs, cs, label=label or f"V(x)S{k}V*")


def zero_grade(k: int) -> SubspaceBasis:
    return SubspaceBasis((), grade_coordinates(k), label="0")


def grade_of(g: SubspaceBasis) -> int:
    orders = {t.order for _, t in g.coords}
    if len(orders) != 1:
        raise GradeCompatibilityError("subspace is not homogeneous")
    return orders.pop()


def _e(i: int, r1: int, r2: int) -> FieldCoord:
    return (i, MultiIndex(r1, r2))


def symbol_g(theta0: Optional[JetPoint] = None) -> SubspaceBasis:
    """The symbol: second-order part of the isotropy algebra, with basis ``e1, e2``.

    Computed from the isotropy system restricted to grade 2 and then written
    in the fixed basis; the result does not depend on ``theta0``.
    """
    theta0 = theta0 if theta0 is not None else JetPoint.zero(0)
    cs = grade_coordinates(2)
    sysm = isotropy_system(theta0, 0, 2)
    computed = SubspaceBasis(tuple(map(tuple, sysm.nullspace())), cs, theta0.base)
    e1 = {_e(1, 2, 0): 2, _e(2, 1, 1): 1}
    e2 = {_e(2, 0, 2): 2, _e(1, 1, 1): 1}
    basis = SubspaceBasis(
        tuple(tuple(Fraction(e.get(c, 0)) for c in cs) for e in (e1, e2)), cs, theta0.base, "g"
    )
    if not basis.same_span(computed):
        raise AssertionError("symbol basis does not match the isotropy equations")
    return basis


def _bracket_with_constant(j: int, X: VectorFieldJet) -> VectorFieldJet:
    v = VectorFieldJet(X.order, X.base, {(j, MultiIndex(0, 0)): 1})
    return bracket(v, X)


def _shift_matrix(k: int, j: int) -> List[List[Fraction]]:
    """Matrix of ``X -> [d_j, X]`` from grade ``k`` to grade ``k - 1``."""
    src, dst = grade_coordinates(k), grade_coordinates(k - 1)
    cols = []
    for c in src:
        X = VectorFieldJet(k, (0, 0), {c: 1})
        Y = _bracket_with_constant(j, X)
        cols.append([Y.coeffs.get(d, Fraction(0)) for d in dst])
    return [[cols[a][b] for a in range(len(src))] for b in range(len(dst))]


def _annihilator(g: SubspaceBasis) -> List[List[Fraction]]:
    n = len(g.coords)
    if not g.vectors:
        return [[Fraction(int(a == b)) for b in range(n)] for a in range(n)]
    return nullspace([list(v) for v in g.vectors], n)


def prolong(g: SubspaceBasis) -> SubspaceBasis:
    """``g^(1) = {X of grade k+1 : [v, X] in g for all constant v}``."""
    k = grade_of(g)
    ann = _annihilator(g)
    rows = []
    for j in (1, 2):
        rows.extend(matmul(ann, _shift_matrix(k + 1, j)) if ann else [])
    cs = grade_coordinates(k + 1)
    basis = nullspace(rows, len(cs)) if rows else [[Fraction(int(a == b)) for b in range(len(cs))] for a in range(len(cs))]
    return SubspaceBasis(tuple(map(tuple, basis)), cs, g.base, f"({g.label})^(1)")


# -- Spencer complex -------------------------------------------------------------


@dataclass(frozen=True)
class SpencerReport:
    grades: Tuple[int, int, int]
    dims: Tuple[int, int, int]  # dim g_top, dim g_mid (x) V*, dim g_low (x) L2 V*
    d0: Tuple[Tuple[Fraction, ...], ...]  # g_top -> g_mid (x) V*
    d1: Tuple[Tuple[Fraction, ...], ...]  # g_mid (x) V* -> g_low (x) L2 V*
    ranks: Tuple[int, int]
    cohomology: dict = field(default_factory=dict)

    @property
    def d1_injective(self) -> bool:
        return self.ranks[1] == self.dims[1]

    def composite_is_zero(self) -> bool:
        if not self.d0 or not self.d1:
            return True
        return all(x == 0 for row in matmul(self.d1, [list(r) for r in self.d0]) for x in row)

    def to_json(self) -> dict:
        k = self.grades[0]
        return {
            "grades": list(self.grades),
            "dims": list(self.dims),
            f"d_{k},0": [[str(x) for x in r] for r in self.d0],
            f"d_{k - 1},1": [[str(x) for x in r] for r in self.d1],
            "ranks": list(self.ranks),
            "cohomology": dict(self.cohomology),
        }


def _coords_in(g: SubspaceBasis, v: Sequence[Fraction]) -> List[Fraction]:
    return coordinates(list(v), [list(b) for b in g.vectors])


def spencer_complex(g_list: Sequence[SubspaceBasis]) -> SpencerReport:
    """``0 -> g_k -> g_(k-1) (x) V* -> g_(k-2) (x) L2 V* -> 0`` for ``g_list = [g_k, g_(k-1), g_(k-2)]``.

    Bases: ``g (x) V*`` is ordered ``(b_1 dx^1, b_1 dx^2, b_2 dx^1, ...)``;
    ``L2 V*`` is spanned by ``dx^1 ^ dx^2``.
    """
    top, mid, low = g_list
    kt, km, kl = grade_of(top), grade_of(mid), grade_of(low)
    if not (kt == km + 1 == kl + 2):
        raise GradeCompatibilityError(f"grades {kt}, {km}, {kl} are not consecutive")
    for upper, lower in ((top, mid), (mid, low)):
        for X in upper.fields():
            for j in (1, 2):
                if not lower.contains(_bracket_with_constant(j, X).grade(grade_of(lower))):
                    raise GradeCompatibilityError(f"[V, {upper.label}] is not contained in {lower.label}")

    def sub(X: VectorFieldJet, g: SubspaceBasis) -> List[Fraction]:
        return _coords_in(g, g.vector_of(X))

    # d(xi)(v) = [v, xi]
    d0_cols = []
    for X in top.fields():
        col = []
        images = [sub(_bracket_with_constant(j, X), mid) for j in (1, 2)]
        for b in range(mid.dim):
            for j in (0, 1):
                col.append(images[j][b])
        d0_cols.append(col)
    # d(xi)(v1, v2) = [v1, xi(v2)] - [v2, xi(v1)]
    d1_cols = []
    for Y in mid.fields():
        for j in (1, 2):
            other = 2 if j == 1 else 1
            img = _bracket_with_constant(other, Y)
            sign = 1 if j == 2 else -1
            d1_cols.append([sign * c for c in sub(img, low)])
    n0, n1, n2 = top.dim, 2 * mid.dim, low.dim
    d0 = tuple(tuple(d0_cols[a][b] for a in range(n0)) for b in range(n1)) if n0 else tuple(() for _ in range(n1))
    d1 = tuple(tuple(d1_cols[a][b] for a in range(n1)) for b in range(n2))
    r0 = rank(d0, n0) if n0 else 0
    r1 = rank(d1, n1) if n1 else 0
    coh = {
        f"H^{kt},0": n0 - r0,
        f"H^{km},1": (n1 - r1) - r0,
        f"H^{kl},2": n2 - r1,
    }
    return SpencerReport((kt, km, kl), (n0, n1, n2), d0, d1, (r0, r1), coh)


def symbol_complex() -> SpencerReport:
    """The complex ``0 -> g^(1) -> g (x) V* -> L0/L1 (x) L2 V* -> 0`` of the symbol."""
    g = symbol_g()
    return spencer_complex([prolong(g), g, full_grade(1, "L0/L1")])
