"""Zero testing: exact on the rational class, sampling otherwise."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional

from .expr import EvaluationError, Expr, ExprError, evaluate
from .poly import to_rational


class ZeroTestInconclusive(ExprError):
    pass


@dataclass(frozen=True)
class ZeroTestConfig:
    samples: int = 50
    epsilon: float = 1e-9
    box: Fraction = Fraction(3)
    max_denominator: int = 100
    seed: int = 0


class Verdict(enum.Enum):
    PROVEN_ZERO = "ProvenZero"
    PROVEN_NONZERO = "ProvenNonZero"
    NUMERICALLY_ZERO = "NumericallyZero"


@dataclass(frozen=True)
class ZeroVerdict:
    verdict: Verdict
    method: str  # "symbolic" or "sampling"
    samples: int = 0
    valid_samples: int = 0
    max_abs: float = 0.0
    witness: Optional[Dict[str, object]] = field(default=None, compare=False)

    @property
    def is_zero(self) -> bool:
        return self.verdict is not Verdict.PROVEN_NONZERO

    @property
    def confidence(self) -> float:
        """Fraction of requested sample points that were evaluable (sampling only)."""
        if self.method == "symbolic":
            return 1.0
        return self.valid_samples / self.samples if self.samples else 0.0


def random_rational(rng: random.Random, box: Fraction, max_den: int) -> Fraction:
    q = rng.randint(1, max_den)
    bound = int(box * q)
    return Fraction(rng.randint(-bound, bound), q)


def sample_points(variables, config: ZeroTestConfig, rng: random.Random | None = None):
    rng = rng or random.Random(config.seed)
    names = sorted(variables)
    for _ in range(config.samples):
        yield {v: random_rational(rng, config.box, config.max_denominator) for v in names}


def is_zero(e: Expr, config: ZeroTestConfig = ZeroTestConfig()) -> ZeroVerdict:
    """Decide ``e == 0`` as a function.

    Rational expressions (transcendental atoms allowed) whose expanded
    numerator vanishes are ProvenZero; a nonzero numerator without atoms is
    ProvenNonZero.  Otherwise ``config.samples`` random rational points are
    evaluated: any ``|value| > epsilon`` is ProvenNonZero, else NumericallyZero.
    """
    try:
        r = to_rational(e)
    except EvaluationError as exc:
        raise ZeroTestInconclusive(f"cannot normalize: {exc}") from exc
    if r.is_zero():
        return ZeroVerdict(Verdict.PROVEN_ZERO, "symbolic")
    r = r.cancel()
    if r.is_zero():
        return ZeroVerdict(Verdict.PROVEN_ZERO, "symbolic")
    if not r.has_atoms():
        return ZeroVerdict(Verdict.PROVEN_NONZERO, "symbolic")
    return _sample(e, config)


def _sample(e: Expr, config: ZeroTestConfig) -> ZeroVerdict:
    valid = 0
    max_abs = 0.0
    for point in sample_points(e.free_variables, config):
        try:
            v = evaluate(e, point)
        except (EvaluationError, ValueError):
            continue
        valid += 1
        a = abs(float(v))
        max_abs = max(max_abs, a)
        if a > config.epsilon:
            return ZeroVerdict(Verdict.PROVEN_NONZERO, "sampling", config.samples, valid, a, point)
    if valid == 0:
        raise ZeroTestInconclusive("every sample point hit a singularity")
    return ZeroVerdict(Verdict.NUMERICALLY_ZERO, "sampling", config.samples, valid, max_abs)
