"""Check the nine base conditions on a model's base family and on the
lifted family O(U, eps), printing one status row per condition.

    python scripts/lifted_demo.py --model zn:4 --family lattice --samples 1000
    python scripts/lifted_demo.py --model mobius --samples 200
"""

import argparse
import time

from gyrolab.neighborhoods import CONDITIONS, check_condition, check_lifted_condition, default_family
from gyrolab.registry import parse_model_spec


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", default="zn:4")
    ap.add_argument("--family", choices=("singleton", "lattice", "dyadic"))
    ap.add_argument("--samples", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    model = parse_model_spec(args.model)
    family = default_family(model, args.family)
    print(f"model {model.name}, family {family.kind} ({len(family.members)} members)")
    print(f"{'cond':>4}  {'base':<17} {'lifted':<17} seconds")
    for c in CONDITIONS:
        t0 = time.perf_counter()
        base = check_condition(model, family, c, args.samples, args.seed)
        lifted = check_lifted_condition(model, family, c, args.samples, args.seed)
        print(f"{c:>4}  {base.status:<17} {lifted.status:<17} {time.perf_counter() - t0:.1f}")


if __name__ == "__main__":
    main()
