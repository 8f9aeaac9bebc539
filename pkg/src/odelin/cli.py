"""Command-line interface: ``odelin <command> [options]``.

Exit codes: 0 linearizable (or success), 1 not linearizable (or a failed
selftest), 2 inconclusive, 3 and above for errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from .acceptance import SIZES, run_all
from .isotropy import isotropy_algebra, isotropy_space, prolong, symbol_complex, symbol_g
from .jetspace import JetPoint, Section, jet_eval, project, rhs_to_section
from .obstruction import Linearizability, linearizable, obstruction_at
from .pointmap import (
    GraphConditionError,
    IntegrationError,
    PointTransform,
    SingularJacobianError,
    lift_jet,
    pushforward_equation,
    solution_curve_oracle,
)
from .symexpr import ExprError, ZeroTestConfig, ZeroTestInconclusive, render

EXIT_LINEARIZABLE = 0
EXIT_NOT = 1
EXIT_INCONCLUSIVE = 2
EXIT_ERROR = 3

VERDICT_EXIT = {
    Linearizability.LINEARIZABLE: EXIT_LINEARIZABLE,
    Linearizability.NUMERICALLY_LINEARIZABLE: EXIT_LINEARIZABLE,
    Linearizability.NOT_LINEARIZABLE: EXIT_NOT,
    Linearizability.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


class UsageError(Exception):
    pass


@dataclass
class JobConfig:
    """Everything a run depends on; serializable so a run can be replayed."""

    command: str
    rhs: Optional[str] = None
    coeffs: Optional[str] = None
    jet: Optional[str] = None
    f1: Optional[str] = None
    f2: Optional[str] = None
    g1: Optional[str] = None
    g2: Optional[str] = None
    point: str = "0,0"
    ivp: str = "0,0,1"
    order: int = 2
    samples: int = 50
    epsilon: float = 1e-9
    box: str = "3"
    seed: int = 42
    level: str = "quick"
    input: Optional[str] = None
    jobs: int = 1
    out: Optional[str] = None
    format: str = "json"

    def to_json(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def zero_config(self) -> ZeroTestConfig:
        return ZeroTestConfig(samples=self.samples, epsilon=self.epsilon, box=Fraction(self.box), seed=self.seed)


# -- input helpers -----------------------------------------------------------------


def _number(text: str):
    text = text.strip()
    try:
        return Fraction(text)
    except ValueError:
        return float(text)


def parse_tuple(text: str, n: int) -> tuple:
    parts = text.split(",")
    if len(parts) != n:
        raise UsageError(f"expected {n} comma-separated numbers, got {text!r}")
    try:
        return tuple(_number(t) for t in parts)
    except ValueError as exc:
        raise UsageError(f"not a number in {text!r}") from exc


def load_section(cfg: JobConfig) -> Section:
    if cfg.rhs is not None and cfg.coeffs is not None:
        raise UsageError("give either --rhs or --coeffs, not both")
    if cfg.rhs is not None:
        return rhs_to_section(cfg.rhs)
    if cfg.coeffs is not None:
        with open(cfg.coeffs) as fh:
            return Section.from_json(json.load(fh))
    raise UsageError("an equation is required (--rhs or --coeffs)")


def load_transform(cfg: JobConfig) -> PointTransform:
    if cfg.f1 is None or cfg.f2 is None:
        raise UsageError("a transformation needs both --f1 and --f2")
    if (cfg.g1 is None) != (cfg.g2 is None):
        raise UsageError("an explicit inverse needs both --g1 and --g2")
    inverse = (cfg.g1, cfg.g2) if cfg.g1 is not None else None
    return PointTransform(cfg.f1, cfg.f2, inverse)


def load_jet(cfg: JobConfig, order: int) -> JetPoint:
    if cfg.jet is not None:
        with open(cfg.jet) as fh:
            theta = JetPoint.from_json(json.load(fh))
        if theta.order < order:
            raise UsageError(f"jet file has order {theta.order}, need {order}")
        return project(theta, order)
    return jet_eval(load_section(cfg), parse_tuple(cfg.point, 2), order)


# -- commands ------------------------------------------------------------------------


def cmd_analyze(cfg: JobConfig):
    S = load_section(cfg)
    try:
        v = linearizable(S, cfg.zero_config())
    except ZeroTestInconclusive as exc:
        report = {"equation": S.to_json(), "verdict": Linearizability.INCONCLUSIVE.value, "reason": str(exc)}
        return report, EXIT_INCONCLUSIVE
    report = {"equation": S.to_json(), **v.to_json()}
    return report, VERDICT_EXIT[v.verdict]


def cmd_transform(cfg: JobConfig):
    S = load_section(cfg)
    f = load_transform(cfg)
    p = parse_tuple(cfg.point, 2)
    J = f.jacobian(p)
    if J[0][0] * J[1][1] - J[0][1] * J[1][0] == 0:
        raise SingularJacobianError(f"Jacobian of f is singular at {cfg.point}")
    T = pushforward_equation(f, S)
    try:
        rep = solution_curve_oracle(f, S, parse_tuple(cfg.ivp, 3), target=T)
        residual = rep.to_json()
    except (IntegrationError, GraphConditionError) as exc:
        residual = {"error": str(exc)}
    report = {"transform": f.to_json(), "equation": S.to_json(), "transformed": T.to_json(), "residual": residual}
    return report, 0


def cmd_jet(cfg: JobConfig):
    theta = jet_eval(load_section(cfg), parse_tuple(cfg.point, 2), cfg.order)
    return theta.to_json(), 0


def cmd_lift(cfg: JobConfig):
    theta = load_jet(cfg, cfg.order)
    f = load_transform(cfg)
    lifted = lift_jet(f, theta)
    report = {"transform": f.to_json(), "jet": theta.to_json(), "lifted": lifted.to_json()}
    if cfg.order >= 2 and theta.is_exact and lifted.is_exact:
        report["invariants"] = {
            "before": obstruction_at(project(theta, 2), route="closed").to_json(),
            "after": obstruction_at(project(lifted, 2), route="closed").to_json(),
        }
    return report, 0


def cmd_isotropy(cfg: JobConfig):
    k = cfg.order
    theta = load_jet(cfg, k + 1)
    if not theta.is_exact:
        raise UsageError("isotropy needs a rational jet (the equation has irrational values at this point)")
    g = isotropy_algebra(project(theta, k))
    A = isotropy_space(theta)
    sym = symbol_g(project(theta, 0))
    spencer = symbol_complex()
    report = {
        "order": k,
        "base": [str(c) for c in theta.base],
        "isotropy_algebra": {"dim": g.dim, "basis": g.to_json()},
        "isotropy_space": {"dim": A.dim, "basis": A.to_json()},
        "symbol": {"dim": sym.dim},
        "prolongation": {"dim": prolong(sym).dim},
        "spencer": spencer.to_json(),
    }
    return report, 0


def cmd_selftest(cfg: JobConfig):
    if cfg.level not in SIZES:
        raise UsageError(f"unknown level {cfg.level!r} (quick or full)")
    results = run_all(cfg.seed, cfg.level, echo=lambda line: print(line, file=sys.stderr))
    ok = all(r.passed for r in results)
    report = {"seed": cfg.seed, "level": cfg.level, "passed": ok, "criteria": [r.to_json() for r in results]}
    return report, 0 if ok else 1


def _analyze_line(item):
    index, line, zcfg = item
    try:
        data = json.loads(line)
        if "rhs" in data:
            S = rhs_to_section(data["rhs"])
        else:
            S = Section.from_json(data)
        v = linearizable(S, zcfg)
        return {"index": index, "input": data, **v.to_json()}
    except (ExprError, ValueError, ZeroTestInconclusive, ArithmeticError) as exc:
        return {"index": index, "error": f"{type(exc).__name__}: {exc}"}


def cmd_batch(cfg: JobConfig):
    if cfg.input is None:
        raise UsageError("batch needs --input FILE (JSON lines)")
    with open(cfg.input) as fh:
        lines = [ln for ln in (raw.strip() for raw in fh) if ln]
    zcfg = cfg.zero_config()
    items = [(i, ln, zcfg) for i, ln in enumerate(lines)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            rows = list(pool.map(_analyze_line, items))
    else:
        rows = [_analyze_line(it) for it in items]
    rows.sort(key=lambda r: r["index"])
    return {"results": rows}, 0


COMMANDS = {
    "analyze": cmd_analyze,
    "transform": cmd_transform,
    "jet": cmd_jet,
    "lift": cmd_lift,
    "isotropy": cmd_isotropy,
    "selftest": cmd_selftest,
    "batch": cmd_batch,
}


# -- output ---------------------------------------------------------------------------


def _text(obj, indent: int = 0) -> List[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{obj}")
    return lines


def render_report(report, cfg: JobConfig) -> str:
    if cfg.command == "batch" and cfg.format == "json":
        return "".join(json.dumps(r) + "\n" for r in report["results"])
    if cfg.format == "text":
        return "\n".join(_text(report)) + "\n"
    return json.dumps(report, indent=2) + "\n"


# -- argument parsing ------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would read as "inconclusive"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--rhs", help="right-hand side in x, y, p (p = y')")
    common.add_argument("--coeffs", metavar="FILE", help='JSON file {"u0": ..., "u3": ...}')
    common.add_argument("--jet", metavar="FILE", help="JetPoint JSON file")
    common.add_argument("--f1", help="first component of the point transformation")
    common.add_argument("--f2", help="second component of the point transformation")
    common.add_argument("--g1", help="first component of the inverse (optional)")
    common.add_argument("--g2", help="second component of the inverse (optional)")
    common.add_argument("--point", default="0,0", metavar="X,Y", help="base point (default 0,0)")
    common.add_argument("--ivp", default="0,0,1", metavar="X,Y,P", help="initial data for the residual check")
    common.add_argument("--order", type=int, default=2, metavar="K", help="jet order (default 2)")
    common.add_argument("--samples", type=int, default=50, metavar="N", help="zero-test sample points")
    common.add_argument("--epsilon", type=float, default=1e-9, metavar="E", help="zero-test threshold")
    common.add_argument("--box", default="3", help="sampling box half-width (default 3)")
    common.add_argument("--seed", type=int, default=42, metavar="S")
    common.add_argument("--level", default="quick", choices=sorted(SIZES))
    common.add_argument("--input", metavar="FILE", help="JSON-lines input for batch")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for batch")
    common.add_argument("--out", metavar="FILE", help="write the report here instead of stdout")
    common.add_argument("--format", default="json", choices=("json", "text"))

    parser = _Parser(prog="odelin", description="Linearizability of y'' = u0 + u1 y' + u2 y'^2 + u3 y'^3.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "analyze": "invariants F1, F2 and the linearizability verdict",
        "transform": "transform an equation by a point transformation",
        "jet": "jet of an equation at a point",
        "lift": "lift a jet by a point transformation",
        "isotropy": "isotropy dimensions and bases at a jet",
        "selftest": "run the acceptance suite",
        "batch": "analyze a JSON-lines file of equations",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = JobConfig(**vars(args))
    try:
        report, code = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"odelin: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ExprError, ArithmeticError, ValueError, OSError, ZeroTestInconclusive) as exc:
        print(f"odelin: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR + 1
    text = render_report(report, cfg)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
