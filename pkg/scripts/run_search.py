"""Enumerate Cayley gyrogroups of orders 2..N and summarise what turns up.

    python scripts/run_search.py --max-order 6 --out search.json
"""

import argparse
import json
import time

from gyrolab.models import cayley_search


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-order", type=int, default=6)
    ap.add_argument("--budget", type=int, default=None, help="max tables scanned per order")
    ap.add_argument("--out", help="write the full SearchResult list as JSON")
    args = ap.parse_args()

    results = []
    print(f"{'n':>2} {'scanned':>9} {'found':>6} {'groups':>7} {'proper':>7} {'seconds':>8}")
    for n in range(2, args.max_order + 1):
        t0 = time.perf_counter()
        r = cayley_search(n, args.budget)
        dt = time.perf_counter() - t0
        groups = sum(g.is_group() for g in r.found)
        print(f"{n:>2} {r.scanned:>9} {len(r.found):>6} {groups:>7} {len(r.proper):>7} {dt:>8.2f}"
              + ("  (truncated)" if r.truncated else ""))
        results.append(r.to_json())
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(results, fh, indent=1)


if __name__ == "__main__":
    main()
