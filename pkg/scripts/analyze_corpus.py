"""Verdicts for a handful of classical equations."""

from odelin import linearizable, rhs_to_section

CORPUS = [
    ("free particle", "0"),
    ("y'' = y'^2 / y", "p^2/y"),
    ("harmonic oscillator", "-y"),
    ("y'' = y^2", "y^2"),
    ("first Painleve", "6*y^2 + x"),
    ("y'' = -y'^3", "-p^3"),
    ("y'' = x y'^3 + y", "x*p^3 + y"),
    ("Emden-Fowler, n = 2", "-2*p/x - y^2"),
]


def main():
    width = max(len(name) for name, _ in CORPUS)
    for name, rhs in CORPUS:
        v = linearizable(rhs_to_section(rhs))
        print(f"{name:<{width}}  {v.verdict.value:<24} F1 = {v.to_json()['F1']}, F2 = {v.to_json()['F2']}")


if __name__ == "__main__":
    main()
