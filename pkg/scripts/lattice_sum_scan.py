"""Lattice sum to closed-form ratio along a decreasing eps grid, for both kernels.

Uses a(eps) = eps^(-1/2) and theta(eps) = sqrt(-2 ln eps) / eps. The ratio
oscillates with the lattice offset while it drifts toward 1.
"""

import argparse
import math

from lastexit.gauss_sums import ratio_scan


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--eps", type=float, nargs="+",
                   default=[0.1, 0.05, 0.02, 0.01, 5e-3, 2e-3, 1e-3, 1e-4, 1e-6])
    args = p.parse_args()
    for alpha in (1.0, 2.0):
        print(f"alpha = {alpha:g}")
        rows = ratio_scan(alpha, lambda e: e**-0.5, lambda e: math.sqrt(-2 * math.log(e)) / e, args.eps)
        for r in rows:
            print(f"  eps={r.eps:<8g} ratio={r.ratio:.5f} bracketed={r.bracketed} {' '.join(r.flags)}")


if __name__ == "__main__":
    main()
