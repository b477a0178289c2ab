"""Run a campaign from a TOML config and print the convergence table.

    python scripts/run_campaign.py configs/alpha1.toml --set run.n_paths=1000
"""

import argparse
import logging

from lastexit.config import load_config
from lastexit.experiment import convergence_report, run_campaign


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("config")
    p.add_argument("--set", action="append", default=[])
    p.add_argument("--workers", type=int, default=None)
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    cfg = load_config(args.config, args.set)
    campaign = run_campaign(cfg, workers=args.workers)
    for r in campaign.reports:
        print(f"eps={r.eps:g}: grid {r.n_grid} points (step {r.step:.4g}), "
              f"nocross={r.n_nocross} censored={r.n_censored}")
    print(convergence_report(campaign.reports, cfg.ks_threshold, cfg.trend_slack).table())


if __name__ == "__main__":
    main()
