"""Canonical horizontal frames, the obstruction form and the linearizability test.

The level-1 frame assigns to each constant field ``d_r`` the unique element
``(delta_r, 0, f^i_{jk,r})`` of the isotropy space at a 1-jet whose
second-order part is symmetric in ``(k, r)``.  The level-2 frame extends it
by third-order terms inside the isotropy space at the 2-jet; it is unique
because the symbol has trivial prolongation.  Antisymmetrizing its
third-order coefficients gives the invariants

    F1 ~ 1/2 (f^1_{111,2} - f^1_{112,1}),   F2 ~ 1/2 (f^2_{221,2} - f^2_{222,1})

up to the constant factor ``CALIBRATION``, and the obstruction form
``(F1 e1 + F2 e2) (x) dx^1 ^ dx^2``.  The value of the form on ``(d_1, d_2)``
is the bracket of the two level-2 frame elements.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .fieldlift import VectorFieldJet, bracket, psi_linear_form
from .isotropy import grade_coordinates, symbol_g
from .jetspace import JetPoint, MultiIndex, Section, _as_number, coord_name, jet_eval, multi_indices, project
from .linalg import SingularSystemError, solve
from .pointmap import PointTransform, SingularJacobianError, lift_jet
from .symexpr import (
    EvaluationError,
    Expr,
    Poly,
    Verdict,
    ZeroTestConfig,
    ZeroTestInconclusive,
    evaluate,
    is_zero,
    normalize,
    render,
    sample_points,
)


class InternalInconsistencyError(AssertionError):
    """Two routes that must agree did not."""


def _u(i, r1=0, r2=0) -> Poly:
    return Poly.var(coord_name(i, (r1, r2)))


def _closed_forms():
    u = _u
    F1 = (
        3 * u(0, 0, 2) - 2 * u(1, 1, 1) + u(2, 2, 0)
        + 3 * u(3) * u(0, 1, 0) - 3 * u(2) * u(0, 0, 1) + 2 * u(1) * u(1, 0, 1)
        - u(1) * u(2, 1, 0) - 3 * u(0) * u(2, 0, 1) + 6 * u(0) * u(3, 1, 0)
    )
    F2 = (
        u(1, 0, 2) - 2 * u(2, 1, 1) + 3 * u(3, 2, 0)
        - 3 * u(0) * u(3, 0, 1) + 3 * u(1) * u(3, 1, 0) - 2 * u(2) * u(2, 1, 0)
        + u(2) * u(1, 0, 1) + 3 * u(3) * u(1, 1, 0) - 6 * u(3) * u(0, 0, 1)
    )
    return F1, F2


F1_TEMPLATE, F2_TEMPLATE = _closed_forms()

# level-1 frame in closed form: (i, (r1, r2) of the jk-block, r) -> template
_T = Fraction(1, 3)
FRAME1_TEMPLATE: Dict[Tuple[int, MultiIndex, int], Poly] = {
    (2, MultiIndex(2, 0), 1): _u(0, 1, 0),
    (2, MultiIndex(2, 0), 2): _u(0, 0, 1),
    (2, MultiIndex(1, 1), 1): _u(0, 0, 1),
    # forced by the psi^1 (r = 2) and psi^2 (r = 1) rows together with the symmetry
    (2, MultiIndex(1, 1), 2): (2 * _u(1, 0, 1) - _u(2, 1, 0)) * _T,
    (2, MultiIndex(0, 2), 1): (2 * _u(1, 0, 1) - _u(2, 1, 0)) * _T,
    (2, MultiIndex(0, 2), 2): -2 * _u(3, 1, 0) + _u(2, 0, 1),
    (1, MultiIndex(0, 2), 2): -_u(3, 0, 1),
    (1, MultiIndex(0, 2), 1): -_u(3, 1, 0),
    (1, MultiIndex(1, 1), 2): -_u(3, 1, 0),
    (1, MultiIndex(1, 1), 1): (_u(1, 0, 1) - 2 * _u(2, 1, 0)) * _T,
    (1, MultiIndex(2, 0), 2): (_u(1, 0, 1) - 2 * _u(2, 1, 0)) * _T,
    (1, MultiIndex(2, 0), 1): 2 * _u(0, 0, 1) - _u(1, 1, 0),
}

# closed forms = CALIBRATION * antisymmetrized frame coefficients (jet-independent)
CALIBRATION = Fraction(3)

FrameKey = Tuple[int, MultiIndex, int]


@dataclass(frozen=True)
class HorizontalFrame:
    """Frame coefficients ``f^i_{tau,r}`` (``2 <= |tau| <= level + 1``) at a jet."""

    level: int
    base: Tuple[Fraction, Fraction]
    coeffs: Mapping[FrameKey, object]

    def f(self, i: int, tau: Sequence[int], r: int):
        return self.coeffs.get((i, MultiIndex(*tau), r), Fraction(0))

    def vector(self, r: int) -> VectorFieldJet:
        """The frame element over ``d_r``: ``(delta_r, 0, f^i_{tau,r})``."""
        data = {(r, MultiIndex(0, 0)): 1}
        for (i, t, rr), v in self.coeffs.items():
            if rr == r:
                data[(i, t)] = v
        return VectorFieldJet(self.level + 1, self.base, data)

    def project(self, level: int) -> "HorizontalFrame":
        return HorizontalFrame(level, self.base, {k: v for k, v in self.coeffs.items() if k[1].order <= level + 1})

    def symmetric(self) -> bool:
        """``f^i_{jk,r} = f^i_{jr,k}`` for the second-order block."""
        for i in (1, 2):
            if self.f(i, (1, 1), 1) != self.f(i, (2, 0), 2) or self.f(i, (0, 2), 1) != self.f(i, (1, 1), 2):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "base": [str(b) for b in self.base],
            "coeffs": [
                {"i": i, "tau": [t.r1, t.r2], "r": r, "value": str(v)}
                for (i, t, r), v in sorted(self.coeffs.items())
            ],
        }


def _frame1_closed(theta1: JetPoint) -> HorizontalFrame:
    env = theta1.env()
    return HorizontalFrame(1, theta1.base, {k: p.evaluate(env) for k, p in FRAME1_TEMPLATE.items()})


def _frame_system(theta: JetPoint, known: HorizontalFrame, top: int):
    """Rows for the unknown order-``top`` frame coefficients inside the isotropy space at ``theta``."""
    unknowns = [(i, t, r) for r in (1, 2) for i in (1, 2) for t in multi_indices(top, top)]
    pos = {u: j for j, u in enumerate(unknowns)}
    env = theta.env()
    rows, rhs = [], []
    for r in (1, 2):
        fixed = known.vector(r)
        for s in multi_indices(top - 2):
            for i in range(4):
                row = [Fraction(0)] * len(unknowns)
                b = Fraction(0)
                for (ci, ct), coeff in psi_linear_form(i, s.r1, s.r2):
                    val = coeff.evaluate(env)
                    if ct.order == top:
                        row[pos[(ci, ct, r)]] += val
                    else:
                        b -= val * fixed.coeffs.get((ci, ct), Fraction(0))
                rows.append(row)
                rhs.append(b)
    return unknowns, rows, rhs


def _frame1_constructive(theta1: JetPoint) -> HorizontalFrame:
    empty = HorizontalFrame(0, theta1.base, {})
    unknowns, rows, rhs = _frame_system(theta1, empty, 2)
    pos = {u: j for j, u in enumerate(unknowns)}
    for i in (1, 2):
        for a, b in ((((1, 1), 1), ((2, 0), 2)), (((0, 2), 1), ((1, 1), 2))):
            row = [Fraction(0)] * len(unknowns)
            row[pos[(i, MultiIndex(*a[0]), a[1])]] += 1
            row[pos[(i, MultiIndex(*b[0]), b[1])]] -= 1
            rows.append(row)
            rhs.append(Fraction(0))
    try:
        sol = solve(rows, rhs, len(unknowns))
    except SingularSystemError as exc:
        raise InternalInconsistencyError(f"level-1 frame is not unique: {exc}") from exc
    return HorizontalFrame(1, theta1.base, dict(zip(unknowns, sol)))


def horizontal_frame_1(theta1: JetPoint, route: str = "both") -> HorizontalFrame:
    """The unique symmetric horizontal frame of the isotropy space at a 1-jet."""
    theta1 = project(theta1, 1) if theta1.order > 1 else theta1
    if route == "closed":
        return _frame1_closed(theta1)
    if route == "constructive":
        return _frame1_constructive(theta1)
    a, b = _frame1_closed(theta1), _frame1_constructive(theta1)
    if a.coeffs != b.coeffs:
        raise InternalInconsistencyError("closed-form and constructive level-1 frames differ")
    return a


def horizontal_frame_2(theta2: JetPoint) -> HorizontalFrame:
    """The level-2 frame over the level-1 frame, solved in the isotropy space at ``theta2``."""
    level1 = _frame1_constructive(project(theta2, 1))
    unknowns, rows, rhs = _frame_system(theta2, level1, 3)
    try:
        sol = solve(rows, rhs, len(unknowns))
    except SingularSystemError as exc:
        raise InternalInconsistencyError(f"level-2 frame does not exist uniquely: {exc}") from exc
    coeffs = dict(level1.coeffs)
    coeffs.update(zip(unknowns, sol))
    return HorizontalFrame(2, theta2.base, coeffs)


@dataclass(frozen=True)
class ObstructionValue:
    F1: object
    F2: object
    base: Tuple[object, object] = (0, 0)

    def tensor(self) -> Dict[Tuple[int, MultiIndex], object]:
        """Coefficients of ``F1 e1 + F2 e2`` (the value on ``(d_1, d_2)``) as a grade-2 field."""
        g = symbol_g()
        vec = [self.F1 * a + self.F2 * b for a, b in zip(*g.vectors)]
        return dict(zip(grade_coordinates(2), vec))

    def quadratic_field(self, x: Sequence) -> Tuple:
        """``Q(x) = (F1 x1 + F2 x2) (x1, x2)``: the tensor as a homogeneous quadratic field."""
        lin = self.F1 * x[0] + self.F2 * x[1]
        return (lin * x[0], lin * x[1])

    @property
    def is_zero(self) -> bool:
        return self.F1 == 0 and self.F2 == 0

    def to_json(self) -> dict:
        return {"F1": str(self.F1), "F2": str(self.F2), "base": [str(b) for b in self.base]}


def _closed_value(theta2: JetPoint) -> ObstructionValue:
    env = theta2.env()
    return ObstructionValue(F1_TEMPLATE.evaluate(env), F2_TEMPLATE.evaluate(env), theta2.base)


def _constructive_value(theta2: JetPoint) -> Tuple[ObstructionValue, HorizontalFrame]:
    H = horizontal_frame_2(theta2)
    half = Fraction(1, 2)
    F1 = half * (H.f(1, (3, 0), 2) - H.f(1, (2, 1), 1))
    F2 = half * (H.f(2, (1, 2), 2) - H.f(2, (0, 3), 1))
    return ObstructionValue(CALIBRATION * F1, CALIBRATION * F2, theta2.base), H


def frame_bracket(H: HorizontalFrame) -> VectorFieldJet:
    """``[X_1, X_2]`` of the level-2 frame elements; it lies in the symbol."""
    return bracket(H.vector(1), H.vector(2))


def obstruction_at(theta2: JetPoint, route: str = "both") -> ObstructionValue:
    """``(F1, F2)`` at a 2-jet.

    ``route`` is ``"closed"``, ``"constructive"`` or ``"both"``; the last
    also checks that ``CALIBRATION`` times the bracket of the frame equals
    ``F1 e1 + F2 e2``.
    """
    if theta2.order < 2:
        raise ValueError("the obstruction needs a 2-jet")
    theta2 = project(theta2, 2)
    if route == "closed":
        return _closed_value(theta2)
    b, H = _constructive_value(theta2)
    if route == "constructive":
        return b
    a = _closed_value(theta2)
    if (a.F1, a.F2) != (b.F1, b.F2):
        raise InternalInconsistencyError(f"closed form {a.F1, a.F2} != constructive {b.F1, b.F2}")
    br = frame_bracket(H)
    t = a.tensor()
    for c, v in br.coeffs.items():
        if CALIBRATION * v != t.get(c, 0):
            raise InternalInconsistencyError("frame bracket is not F1 e1 + F2 e2")
    return a


def obstruction_form(S: Section) -> Tuple[Expr, Expr]:
    """``F1, F2`` along the 2-jet of ``S``, as normalized expressions in x1, x2."""
    atoms = {coord_name(i, s): S.partial(i, s) for i in range(4) for s in multi_indices(2)}
    return normalize(F1_TEMPLATE.to_expr(atoms)), normalize(F2_TEMPLATE.to_expr(atoms))


# -- verdicts --------------------------------------------------------------------


class Linearizability(enum.Enum):
    LINEARIZABLE = "Linearizable"
    NOT_LINEARIZABLE = "NotLinearizable"
    NUMERICALLY_LINEARIZABLE = "NumericallyLinearizable"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class LinearizabilityVerdict:
    verdict: Linearizability
    F1: Expr
    F2: Expr
    method: str
    samples: int
    epsilon: float
    confidence: float = 1.0
    witness: Optional[Tuple[object, object]] = None
    witness_values: Optional[Tuple[object, object]] = None

    @property
    def linearizable(self) -> bool:
        return self.verdict in (Linearizability.LINEARIZABLE, Linearizability.NUMERICALLY_LINEARIZABLE)

    def to_json(self) -> dict:
        out = {
            "F1": render(self.F1),
            "F2": render(self.F2),
            "verdict": self.verdict.value,
            "witness": None if self.witness is None else [_num(w) for w in self.witness],
            "method": self.method,
            "samples": self.samples,
            "epsilon": self.epsilon,
        }
        if self.verdict is Linearizability.NUMERICALLY_LINEARIZABLE:
            out["confidence"] = self.confidence
        if self.witness_values is not None:
            out["witness_values"] = [_num(w) for w in self.witness_values]
        return out


def _num(v):
    if isinstance(v, Fraction):
        return str(v)
    return v


def find_witness(exprs: Sequence[Expr], config: ZeroTestConfig) -> Optional[Tuple[Tuple, Tuple]]:
    """A rational point where some expression is nonzero (exactly, when it is rational)."""
    free = set().union(*(e.free_variables for e in exprs)) | {"x1", "x2"}
    for point in sample_points(free, config, random.Random(config.seed)):
        try:
            vals = tuple(evaluate(e, point) for e in exprs)
        except (EvaluationError, ValueError):
            continue
        if any((v != 0 if isinstance(v, Fraction) else abs(v) > config.epsilon) for v in vals):
            return (point["x1"], point["x2"]), vals
    return None


def linearizable(S: Section, config: ZeroTestConfig = ZeroTestConfig()) -> LinearizabilityVerdict:
    F1, F2 = obstruction_form(S)
    verdicts = []
    for e in (F1, F2):
        try:
            verdicts.append(is_zero(e, config))
        except ZeroTestInconclusive:
            verdicts.append(None)
    method = "sampling" if any(v is not None and v.method == "sampling" for v in verdicts) else "symbolic"
    common = dict(F1=F1, F2=F2, method=method, samples=config.samples, epsilon=config.epsilon)
    if any(v is not None and v.verdict is Verdict.PROVEN_NONZERO for v in verdicts):
        found = find_witness((F1, F2), config)
        w, vals = found if found else (None, None)
        return LinearizabilityVerdict(Linearizability.NOT_LINEARIZABLE, witness=w, witness_values=vals, **common)
    if all(v is None for v in verdicts):
        raise ZeroTestInconclusive("both invariants are singular at every sample point")
    if any(v is None for v in verdicts):
        return LinearizabilityVerdict(Linearizability.INCONCLUSIVE, confidence=0.0, **common)
    if all(v.verdict is Verdict.PROVEN_ZERO for v in verdicts):
        return LinearizabilityVerdict(Linearizability.LINEARIZABLE, **common)
    conf = min(v.confidence for v in verdicts)
    return LinearizabilityVerdict(Linearizability.NUMERICALLY_LINEARIZABLE, confidence=conf, **common)


# -- invariance ------------------------------------------------------------------


@dataclass(frozen=True)
class InvarianceReport:
    kind: str  # "identity-tangent", "affine" or "general"
    before: ObstructionValue
    after: ObstructionValue
    passed: bool
    exact: bool
    max_error: float
    steps: Tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "before": self.before.to_json(),
            "after": self.after.to_json(),
            "passed": self.passed,
            "exact": self.exact,
            "max_error": self.max_error,
            "steps": list(self.steps),
        }


def _close(a, b, exact: bool, tol: float) -> Tuple[bool, float]:
    if exact:
        return a == b, float(abs(a - b))
    err = abs(float(a) - float(b))
    return err <= tol * max(1.0, abs(float(a)), abs(float(b))), err


def _jacobian_at(f: PointTransform, p) -> List[List]:
    A = f.jacobian(p)
    if A[0][0] * A[1][1] - A[0][1] * A[1][0] == 0:
        raise SingularJacobianError(f"Jacobian of f is singular at {tuple(p)}")
    return A


def affine_tensor_law(A, before: ObstructionValue, after: ObstructionValue, exact: bool, tol: float = 1e-6):
    """Check ``det(A) A^-1 Q_after(A x) = Q_before(x)`` for the quadratic fields of the tensor.

    This is the transformation of a ``V (x) S2 V*``-valued 2-form under the
    linear part ``A``; three points determine a quadratic form.
    """
    det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
    inv = [[A[1][1] / det, -A[0][1] / det], [-A[1][0] / det, A[0][0] / det]]
    worst = 0.0
    ok = True
    for x in ((1, 0), (0, 1), (1, 1)):
        Ax = (A[0][0] * x[0] + A[0][1] * x[1], A[1][0] * x[0] + A[1][1] * x[1])
        q = after.quadratic_field(Ax)
        lhs = [det * (inv[k][0] * q[0] + inv[k][1] * q[1]) for k in range(2)]
        rhs = before.quadratic_field(x)
        for a, b in zip(lhs, rhs):
            good, err = _close(a, b, exact, tol)
            ok = ok and good
            worst = max(worst, err)
    return ok, worst


def invariance_check(f: PointTransform, theta2: JetPoint, tol: float = 1e-6) -> InvarianceReport:
    """Compare ``F`` at ``theta2`` and at its image under the lifted ``f``."""
    theta2 = project(theta2, 2)
    p = theta2.base
    A = _jacobian_at(f, p)
    before = obstruction_at(theta2, route="closed")
    image = lift_jet(f, theta2)
    after = obstruction_at(image, route="closed")
    exact = theta2.is_exact and image.is_exact and all(isinstance(a, Fraction) for row in A for a in row)
    identity = all(A[a][b] == (1 if a == b else 0) for a in range(2) for b in range(2))
    second = [
        evaluate(_d2(fi, s), {"x1": _as_number(p[0]), "x2": _as_number(p[1])})
        for fi in f.components
        for s in ((2, 0), (1, 1), (0, 2))
    ]
    if identity:
        ok1, e1 = _close(before.F1, after.F1, exact, tol)
        ok2, e2 = _close(before.F2, after.F2, exact, tol)
        return InvarianceReport("identity-tangent", before, after, ok1 and ok2, exact, max(e1, e2))
    if all(v == 0 for v in second) and _is_affine(f):
        ok, err = affine_tensor_law(A, before, after, exact, tol)
        return InvarianceReport("affine", before, after, ok, exact, err)
    # f = a o t with a affine (same 1-jet as f at p) and t tangent to the identity at p
    fp = f(p)
    det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
    inv = [[A[1][1] / det, -A[0][1] / det], [-A[1][0] / det, A[0][0] / det]]
    a_map = PointTransform.affine(
        A, (fp[0] - A[0][0] * p[0] - A[0][1] * p[1], fp[1] - A[1][0] * p[0] - A[1][1] * p[1])
    )
    from .symexpr import add, mul

    d = (add(f.f1, -fp[0]), add(f.f2, -fp[1]))
    t_map = PointTransform(
        add(p[0], mul(inv[0][0], d[0]), mul(inv[0][1], d[1])),
        add(p[1], mul(inv[1][0], d[0]), mul(inv[1][1], d[1])),
    )
    mid = lift_jet(t_map, theta2)
    mid_value = obstruction_at(mid, route="closed")
    ok1, e1 = _close(before.F1, mid_value.F1, exact, tol)
    ok2, e2 = _close(before.F2, mid_value.F2, exact, tol)
    recomposed = lift_jet(a_map, mid)
    ok3, e3 = True, 0.0
    for c in image.coords:
        good, err = _close(image.coords[c], recomposed.coords[c], exact, tol)
        ok3 = ok3 and good
        e3 = max(e3, err)
    ok4, e4 = affine_tensor_law(A, mid_value, after, exact, tol)
    steps = (
        f"identity-tangent factor: {'ok' if ok1 and ok2 else 'FAIL'}",
        f"factorization reproduces the lifted jet: {'ok' if ok3 else 'FAIL'}",
        f"affine factor tensor law: {'ok' if ok4 else 'FAIL'}",
    )
    return InvarianceReport("general", before, after, ok1 and ok2 and ok3 and ok4, exact, max(e1, e2, e3, e4), steps)


def _d2(e: Expr, s) -> Expr:
    from .jetspace import _partial

    return _partial(e, *s)


def _is_affine(f: PointTransform) -> bool:
    from .jetspace import _partial

    return all(
        is_zero(_partial(fi, *s)).verdict is Verdict.PROVEN_ZERO for fi in f.components for s in ((2, 0), (1, 1), (0, 2))
    )
