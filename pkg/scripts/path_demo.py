"""Trace the path t -> f_t from the identity to a step function and print
the exact disagreement measure between grid points.

    python scripts/path_demo.py --model zn:5 --steps 6
"""

import argparse
import random
from fractions import Fraction

from gyrolab.hm import path_disagreement, path_point, random_step_function
from gyrolab.rational import format_rational
from gyrolab.registry import parse_model_spec


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", default="zn:5")
    ap.add_argument("--steps", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    model = parse_model_spec(args.model)
    f = random_step_function(model, random.Random(args.seed))
    ts = [Fraction(k, args.steps) for k in range(args.steps + 1)]
    print("f =", f)
    for t in ts:
        print(f"f_{format_rational(t):<5} = {path_point(f, t)}")
    width = max(len(format_rational(t)) for t in ts) + 2
    print("\ndisagreement measure mu{f_s != f_t}")
    print(" " * width + "".join(f"{format_rational(t):>{width}}" for t in ts))
    for s in ts:
        row = "".join(f"{format_rational(path_disagreement(f, s, t)):>{width}}" for t in ts)
        print(f"{format_rational(s):>{width}}" + row)


if __name__ == "__main__":
    main()
