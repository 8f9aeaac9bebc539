"""Compare the closed-form level-1 frame with the constructive solve, entry by entry.

Also evaluates the alternative entry (2 u^1_2 - u^0_1)/3 for f^2_{12,2}
and reports whether the resulting frame vectors lie in the isotropy space.
"""

import argparse
import random
from fractions import Fraction

from odelin.isotropy import isotropy_space
from odelin.jetspace import MultiIndex, random_jet
from odelin.obstruction import HorizontalFrame, horizontal_frame_1


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--jets", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    agree = alt_inside = 0
    for _ in range(args.jets):
        theta = random_jet(rng, 1)
        a = horizontal_frame_1(theta, route="closed")
        b = horizontal_frame_1(theta, route="constructive")
        agree += a.coeffs == b.coeffs
        alt = dict(a.coeffs)
        v = (2 * theta.u(1, 0, 1) - theta.u(0, 1, 0)) / 3
        alt[(2, MultiIndex(1, 1), 2)] = alt[(2, MultiIndex(0, 2), 1)] = v
        A = isotropy_space(theta)
        H = HorizontalFrame(1, theta.base, alt)
        alt_inside += all(A.contains(H.vector(r)) for r in (1, 2))
    print(f"closed == constructive: {agree}/{args.jets}")
    print(f"alternative entry inside the isotropy space: {alt_inside}/{args.jets}")


if __name__ == "__main__":
    main()
