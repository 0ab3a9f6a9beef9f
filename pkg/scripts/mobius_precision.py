"""Worst identity residuals on the Möbius disk with the gyrator composite
evaluated in plain doubles versus extended-precision intermediates, across
sampling radii.  Motivates the default ``gyr_precision``.

    python scripts/mobius_precision.py --samples 5000
"""

import argparse

from gyrolab import check_axioms, check_identities
from gyrolab.models import MobiusDisk


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'rho_max':>8} {'precision':>10} {'worst residual':>15}  worst check")
    for rho in (0.9, 0.99, 0.999):
        for prec in (None, 128):
            m = MobiusDisk(rho_max=rho, gyr_precision=prec)
            reports = check_axioms(m, args.samples, args.seed) + check_identities(m, args.samples, args.seed)
            worst = max(reports, key=lambda r: r.max_residual)
            label = "double" if prec is None else f"{prec}-bit"
            print(f"{rho:>8} {label:>10} {worst.max_residual:>15.2e}  {worst.identity}")


if __name__ == "__main__":
    main()
