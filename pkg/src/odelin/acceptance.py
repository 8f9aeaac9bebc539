"""The acceptance suite: nine end-to-end checks, each with a pass/fail line.

``quick`` runs every check at its stated size; ``full`` runs larger random
batches of the same checks.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Tuple

from .fieldlift import (
    PolynomialField,
    bracket,
    bracket_field,
    flow_oracle,
    jet_coordinates,
    lifted_field_function,
    numeric_bracket,
    psi,
)
from .isotropy import (
    ambient_dimension,
    full_grade,
    isotropy_algebra,
    isotropy_space,
    prolong,
    spencer_complex,
    symbol_complex,
    symbol_g,
)
from .jetspace import JetPoint, Section, jet_dimension, jet_eval, project, random_jet, random_polynomial, random_section, rhs_to_section
from .obstruction import (
    Linearizability,
    affine_tensor_law,
    horizontal_frame_1,
    linearizable,
    obstruction_at,
    obstruction_form,
)
from .pointmap import (
    PointTransform,
    lift_jet,
    pushforward_equation,
    random_affine,
    random_identity_tangent,
    random_tame_transform,
    solution_curve_oracle,
)
from .symexpr import Const, ZeroTestConfig

SIZES = {
    "quick": {"c2": 1000, "c3": 50, "c4": 100, "c5": 20, "c7": 100, "c7a": 20, "c8": 10, "c9": 20},
    "full": {"c2": 5000, "c3": 200, "c4": 500, "c5": 60, "c7": 500, "c7a": 100, "c8": 10, "c9": 100},
}


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    checks: Dict[str, object] = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.title} -- {self.detail} ({self.seconds:.2f}s)"

    def to_json(self) -> dict:
        return {
            "criterion": self.number,
            "title": self.title,
            "passed": self.passed,
            "detail": self.detail,
            "checks": {k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.checks.items()},
        }


def _rng(seed: int, n: int) -> random.Random:
    return random.Random(seed * 1000 + n)


def criterion_1(seed: int, level: str) -> CriterionResult:
    checks = {}
    timings = {}

    def timed(name, fn):
        t0 = time.perf_counter()
        checks[name] = fn()
        timings[name] = time.perf_counter() - t0

    g = symbol_g()
    timed("dim g = 2", lambda: g.dim == 2)
    timed(
        "generators e1, e2",
        lambda: [dict(zip(g.coords, v)) for v in g.vectors]
        == [
            {c: Fraction(x) for c, x in zip(g.coords, (2, 0, 0, 0, 1, 0))},
            {c: Fraction(x) for c, x in zip(g.coords, (0, 1, 0, 0, 0, 2))},
        ],
    )
    timed("g^(1) = 0", lambda: prolong(g).dim == 0)
    rep = symbol_complex()
    timed("dim g (x) V* = 4", lambda: rep.dims[1] == 4)
    timed("d_{2,1} injective", lambda: rep.d1_injective)
    timed("H^{1,2} = 0", lambda: rep.cohomology["H^1,2"] == 0)
    timed(
        "d o d = 0 (full grades)",
        lambda: spencer_complex([full_grade(3), full_grade(2), full_grade(1)]).composite_is_zero(),
    )
    timed("dim g_{0_2} = 6", lambda: isotropy_algebra(JetPoint.zero(2)).dim == 6)
    timed("dim W/L^4 = 30", lambda: ambient_dimension(4) == 30)
    timed(
        "orbit dim 24 = dim J2 - 2",
        lambda: ambient_dimension(4) - isotropy_algebra(JetPoint.zero(2)).dim == 24 == jet_dimension(2) - 2,
    )
    slow = [k for k, t in timings.items() if t >= 1.0]
    ok = all(checks.values()) and not slow
    bad = [k for k, v in checks.items() if not v] + [f"{k} too slow" for k in slow]
    return CriterionResult(1, "structural dimensions", ok, "all exact" if ok else "; ".join(bad), checks=checks)


def criterion_2(seed: int, level: str) -> CriterionResult:
    n = SIZES[level]["c2"]
    rng = _rng(seed, 2)
    frames = values = 0
    for _ in range(n):
        theta = random_jet(rng, 2)
        a = horizontal_frame_1(theta, route="closed")
        b = horizontal_frame_1(theta, route="constructive")
        frames += a.coeffs == b.coeffs and b.symmetric()
        x = obstruction_at(theta, route="closed")
        y = obstruction_at(theta, route="constructive")
        values += (x.F1, x.F2) == (y.F1, y.F2)
    ok = frames == n and values == n
    return CriterionResult(
        2,
        "closed form vs constructive route",
        ok,
        f"frames {frames}/{n}, invariants {values}/{n} exact",
        checks={"jets": n, "frames": frames, "invariants": values},
    )


def criterion_3(seed: int, level: str) -> CriterionResult:
    n = SIZES[level]["c3"]
    rng = _rng(seed, 3)
    worst = 0.0
    for _ in range(n):
        X = PolynomialField(random_polynomial(rng, 2), random_polynomial(rng, 2))
        S = random_section(rng, 2)
        p = (Fraction(rng.randint(-4, 4), 4), Fraction(rng.randint(-4, 4), 4))
        oracle = flow_oracle(X, S, p, dt=1e-3)
        exact = psi(X.jet(p, 2), jet_eval(S, p, 1))
        worst = max(worst, max(abs(float(a) - float(b)) for a, b in zip(oracle, exact)))
    ok = worst < 1e-5
    return CriterionResult(3, "psi vs flow", ok, f"max |oracle - psi| = {worst:.2e} over {n} cases (< 1e-5)", checks={"max_error": worst})


def criterion_4(seed: int, level: str) -> CriterionResult:
    n = SIZES[level]["c4"]
    rng = _rng(seed, 4)
    counts = {"containment": 0, "projection": 0, "bracket": 0}
    for _ in range(n):
        theta2 = random_jet(rng, 2)
        theta1 = project(theta2, 1)
        A2, A1 = isotropy_space(theta2), isotropy_space(theta1)
        g1, g0 = isotropy_algebra(theta1), isotropy_algebra(project(theta2, 0))
        counts["containment"] += A2.contains_space(g1) and A1.contains_space(g0)
        counts["projection"] += A2.project(2).same_span(A1)
        fs = A2.fields()
        counts["bracket"] += all(A1.contains(bracket(X, Y)) for a, X in enumerate(fs) for Y in fs[a + 1 :])
    ok = all(v == n for v in counts.values())
    return CriterionResult(
        4, "isotropy-space laws", ok, ", ".join(f"{k} {v}/{n}" for k, v in counts.items()), checks=counts
    )


def criterion_5(seed: int, level: str) -> CriterionResult:
    n = SIZES[level]["c5"]
    rng = _rng(seed, 5)
    config = ZeroTestConfig(samples=100, epsilon=1e-9, seed=seed)
    tally = {"proven": 0, "numeric": 0, "failed": 0}
    for _ in range(n):
        f = random_tame_transform(rng)
        S = pushforward_equation(f, Section.zero())
        v = linearizable(S, config)
        if v.verdict is Linearizability.LINEARIZABLE:
            tally["proven"] += 1
        elif v.verdict is Linearizability.NUMERICALLY_LINEARIZABLE:
            tally["numeric"] += 1
        else:
            tally["failed"] += 1
    ok = tally["failed"] == 0
    return CriterionResult(
        5,
        "transforms of y''=0 have F = 0",
        ok,
        f"{tally['proven']} proven zero, {tally['numeric']} numerically zero, {tally['failed']} failed of {n}",
        checks=tally,
    )


def criterion_6(seed: int, level: str) -> CriterionResult:
    F_a = obstruction_form(rhs_to_section("y^2"))
    F_b = obstruction_form(rhs_to_section("6*y^2 + x"))
    checks = {
        "y''=y^2: F1 = 6, F2 = 0": F_a == (Const(6), Const(0)),
        "y''=6y^2+x: F1 = 36, F2 = 0": F_b == (Const(36), Const(0)),
        "y''=y^2 not linearizable": linearizable(rhs_to_section("y^2")).verdict is Linearizability.NOT_LINEARIZABLE,
    }
    ok = all(checks.values())
    return CriterionResult(6, "negative witnesses", ok, "exact" if ok else str(checks), checks=checks)


def criterion_7(seed: int, level: str) -> CriterionResult:
    n, m = SIZES[level]["c7"], SIZES[level]["c7a"]
    rng = _rng(seed, 7)
    tangent = 0
    for _ in range(n):
        theta = random_jet(rng, 2)
        f = random_identity_tangent(rng, theta.base)
        a = obstruction_at(theta, route="closed")
        b = obstruction_at(lift_jet(f, theta), route="closed")
        tangent += (a.F1, a.F2) == (b.F1, b.F2)
    affine = 0
    for _ in range(m):
        theta = random_jet(rng, 2)
        f = random_affine(rng)
        A = f.jacobian(theta.base)
        before = obstruction_at(theta, route="closed")
        after = obstruction_at(lift_jet(f, theta), route="closed")
        affine += affine_tensor_law(A, before, after, exact=True)[0]
    ok = tangent == n and affine == m
    return CriterionResult(
        7,
        "invariance",
        ok,
        f"identity-tangent {tangent}/{n} exact, affine tensor law {affine}/{m} exact",
        checks={"identity_tangent": tangent, "affine": affine},
    )


def criterion_8(seed: int, level: str) -> CriterionResult:
    n = SIZES[level]["c8"]
    rng = _rng(seed, 8)
    cases: List[Tuple[PointTransform, Section, Tuple]] = [(PointTransform("x", "exp(y)"), Section.zero(), (0, 0, 1))]
    while len(cases) < n:
        f = random_tame_transform(rng, near_identity=True)
        # linear equations keep the solutions finite over the span
        S = Section.zero() if len(cases) % 2 else Section((random_polynomial(rng, 1), random_polynomial(rng, 0), Const(0), Const(0)))
        ivp = (Fraction(rng.randint(-2, 2), 4), Fraction(rng.randint(-2, 2), 4), Fraction(rng.randint(-2, 2), 4))
        cases.append((f, S, ivp))
    worst = 0.0
    for f, S, ivp in cases:
        rep = solution_curve_oracle(f, S, ivp, span=1.0, steps=10_000)
        worst = max(worst, rep.max_residual)
    ok = worst < 1e-6
    return CriterionResult(
        8, "solution-curve residuals", ok, f"max residual {worst:.2e} over {len(cases)} cases (< 1e-6)", checks={"max_residual": worst}
    )


def criterion_9(seed: int, level: str) -> CriterionResult:
    n = SIZES[level]["c9"]
    rng = _rng(seed, 9)
    k = 1
    worst = 0.0
    for _ in range(n):
        X = PolynomialField(random_polynomial(rng, 2), random_polynomial(rng, 2))
        Y = PolynomialField(random_polynomial(rng, 2), random_polynomial(rng, 2))
        theta = random_jet(rng, k, num=2, den=2)
        z = [float(theta.base[0]), float(theta.base[1])] + [float(theta.coords[c]) for c in jet_coordinates(k)]
        lhs = numeric_bracket(lifted_field_function(X, k), lifted_field_function(Y, k), z)
        rhs = lifted_field_function(bracket_field(X, Y), k)(z)
        worst = max(worst, max(abs(a - b) for a, b in zip(lhs, rhs)))
    ok = worst < 1e-4
    return CriterionResult(9, "bracket homomorphism", ok, f"max deviation {worst:.2e} over {n} cases (< 1e-4)", checks={"max_error": worst})


CRITERIA: List[Callable[[int, str], CriterionResult]] = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
]


def run_criterion(number: int, seed: int = 42, level: str = "quick") -> CriterionResult:
    t0 = time.perf_counter()
    try:
        res = CRITERIA[number - 1](seed, level)
    except Exception as exc:  # a crash is a failure of the criterion, reported as such
        res = CriterionResult(number, CRITERIA[number - 1].__name__, False, f"error: {type(exc).__name__}: {exc}")
    res.seconds = time.perf_counter() - t0
    return res


def run_all(seed: int = 42, level: str = "quick", echo: Callable[[str], None] | None = None) -> List[CriterionResult]:
    if level not in SIZES:
        raise ValueError(f"unknown level {level!r} (use quick or full)")
    out = []
    for n in range(1, len(CRITERIA) + 1):
        res = run_criterion(n, seed, level)
        if echo:
            echo(res.line())
        out.append(res)
    return out
