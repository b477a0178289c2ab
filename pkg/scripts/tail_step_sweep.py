"""Grid-maximum excursion probability against the closed form, over a range of steps.

Shows how the discrete maximum approaches the continuous-time tail as the
step shrinks (alpha = 1 converges slowly, alpha = 2 quickly).
"""

import argparse

from lastexit.covariance import ExpPower
from lastexit.exit_time import step_for_level
from lastexit.scaling import pickands_constant
from lastexit.tail import tail_approx, tail_mc


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--t", type=float, default=10.0)
    p.add_argument("--x", type=float, default=4.0)
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eta", type=float, nargs="+", default=[0.5, 0.2, 0.1, 0.05])
    args = p.parse_args()

    m = ExpPower(1, 1, args.alpha)
    p_hat = tail_approx(m, args.t, args.x, pickands_constant(args.alpha)).p
    print(f"closed form {p_hat:.6g}")
    print(f"{'eta':>6} {'step':>10} {'mc':>10} {'se':>9} {'mc/closed':>10}")
    for eta in args.eta:
        mc = tail_mc(m, args.t, args.x, step_for_level(m, args.x, eta), args.paths, args.seed)
        print(f"{eta:>6g} {mc.step:>10.4g} {mc.estimate:>10.4g} {mc.se:>9.2g} {mc.estimate / p_hat:>10.4f}")


if __name__ == "__main__":
    main()
