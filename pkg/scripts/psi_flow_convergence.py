"""Error of the flow finite difference against psi as the time step shrinks."""

import argparse
import random
from fractions import Fraction

from odelin.fieldlift import PolynomialField, flow_oracle, psi
from odelin.jetspace import jet_eval, random_polynomial, random_section


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cases", type=int, default=20)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    cases = []
    for _ in range(args.cases):
        X = PolynomialField(random_polynomial(rng, 2), random_polynomial(rng, 2))
        S = random_section(rng, 2)
        p = (Fraction(rng.randint(-4, 4), 4), Fraction(rng.randint(-4, 4), 4))
        cases.append((X, S, p, psi(X.jet(p, 2), jet_eval(S, p, 1))))
    print("dt        max |oracle - psi|")
    for dt in (1e-2, 3e-3, 1e-3, 3e-4, 1e-4):
        worst = 0.0
        for X, S, p, exact in cases:
            approx = flow_oracle(X, S, p, dt=dt)
            worst = max(worst, max(abs(float(a) - b) for a, b in zip(exact, approx)))
        print(f"{dt:<9.0e} {worst:.3e}")


if __name__ == "__main__":
    main()
