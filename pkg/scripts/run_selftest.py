"""Run the acceptance suite and write a JSON report.

    python3 scripts/run_selftest.py --level quick --seed 42 --out report.json
"""

import argparse
import json
import sys

from odelin.acceptance import run_all


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--level", default="quick", choices=["quick", "full"])
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--out")
    args = ap.parse_args()
    results = run_all(args.seed, args.level, echo=print)
    report = {"seed": args.seed, "level": args.level, "criteria": [r.to_json() for r in results]}
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2)
    total = sum(r.seconds for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} passed in {total:.1f}s")
    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
