"""Command line entry point.

Exit codes: 0 success, 2 config error, 3 embedding failure, 4 acceptance
threshold failure in ``report``.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys

from . import __version__
from .config import load_config
from .covariance import model_from_dict
from .errors import ConfigInvalid, EmbeddingFailed, InvalidModel, UnknownPickandsConstant
from .experiment import convergence_report, load_reports, run_campaign
from .gauss_sums import ratio_scan, rows_to_csv
from .scaling import pickands_constant
from .slepian import random_comparison_suite
from .exit_time import step_for_level
from .tail import tail_approx, tail_mc

EXIT_OK, EXIT_CONFIG, EXIT_EMBEDDING, EXIT_ACCEPTANCE = 0, 2, 3, 4

CONFIG_HELP = """\
config file (TOML):
  [model]  family = "exp_power" | "cauchy", v, q, alpha, beta (cauchy only)
  [run]    eps_list = [0.2, 0.1, 0.05]   strictly decreasing, eps/v < 1
           n_paths = 5000                 >= 100
           master_seed = 12345
           delta_tail = 1e-3   eta = 0.1   H_alpha (needed unless alpha is 1 or 2)
           output_dir = "results"   clip_tol = 1e-9   workers = 1
           ks_threshold = 0.08   trend_slack = 0.02   dump_paths = false
any key can be overridden with --set section.key=value
"""


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def cmd_run(args) -> int:
    cfg = load_config(args.config, args.set)
    campaign = run_campaign(cfg, workers=args.workers)
    summary = convergence_report(campaign.reports, cfg.ks_threshold, cfg.trend_slack)
    print(summary.table())
    print(f"results written to {cfg.output_dir}")
    return EXIT_OK


def cmd_report(args) -> int:
    reports, echo = load_reports(args.output_dir)
    run = echo.get("run", {})
    ks_threshold = args.ks_threshold if args.ks_threshold is not None else run.get("ks_threshold", 0.08)
    slack = args.slack if args.slack is not None else run.get("trend_slack", 0.02)
    summary = convergence_report(reports, ks_threshold, slack)
    print(summary.table())
    return EXIT_OK if summary.passed else EXIT_ACCEPTANCE


def cmd_check_lemma3(args) -> int:
    a_pow = args.a_power
    rows = ratio_scan(args.alpha, lambda e: e ** (-a_pow),
                      lambda e: math.sqrt(-2.0 * math.log(e)) / e, _floats(args.eps))
    sys.stdout.write(rows_to_csv(rows))
    ok = all(r.bracketed for r in rows)
    print(f"# brackets hold in every row: {ok}; final |ratio - 1| = {abs(rows[-1].ratio - 1):.4g}",
          file=sys.stderr)
    return EXIT_OK


def cmd_check_slepian(args) -> int:
    s = random_comparison_suite(args.cases, args.dim, args.seed, args.samples)
    print(f"cases={s.n_cases} pass={s.n_pass} fail={s.n_fail} hard_fail={s.n_hard_fail} "
          f"min_margin={s.min_margin:.3f}")
    return EXIT_OK


def cmd_check_tail(args) -> int:
    model = model_from_dict({"family": args.family, "v": args.v, "q": args.q,
                             "alpha": args.alpha, "beta": args.beta})
    H = pickands_constant(model.alpha, args.H)
    approx = tail_approx(model, args.t, args.x, H)
    step = step_for_level(model, args.x / model.v, args.eta)
    mc = tail_mc(model, args.t, args.x, step, args.paths, args.seed, args.workers)
    rel = abs(mc.estimate - approx.p) / approx.p
    print(f"tail_approx={approx.p:.6g} small_rhs={approx.small_rhs} scale_ok={approx.scale_ok}")
    print(f"tail_mc={mc.estimate:.6g} se={mc.se:.3g} step={mc.step:.6g} paths={mc.n_paths}")
    print(f"relative difference={rel:.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lastexit", description=__doc__.splitlines()[0],
                                epilog=CONFIG_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a Monte Carlo campaign", epilog=CONFIG_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    r.add_argument("config")
    r.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE")
    r.add_argument("--workers", type=int, default=None)
    r.set_defaults(func=cmd_run)

    rep = sub.add_parser("report", help="convergence table for a finished campaign")
    rep.add_argument("output_dir")
    rep.add_argument("--ks-threshold", type=float, default=None)
    rep.add_argument("--slack", type=float, default=None)
    rep.set_defaults(func=cmd_report)

    l3 = sub.add_parser("check-lemma3", help="lattice sum vs closed form, CSV to stdout")
    l3.add_argument("--alpha", type=float, default=1.0)
    l3.add_argument("--eps", default="0.1,0.05,0.02,0.01")
    l3.add_argument("--a-power", type=float, default=0.5, help="a(eps) = eps**(-a_power)")
    l3.set_defaults(func=cmd_check_lemma3)

    sl = sub.add_parser("check-slepian", help="random Slepian comparison suite")
    sl.add_argument("--cases", type=int, default=100)
    sl.add_argument("--dim", type=int, default=4)
    sl.add_argument("--samples", type=int, default=100_000)
    sl.add_argument("--seed", type=int, default=0)
    sl.set_defaults(func=cmd_check_slepian)

    tl = sub.add_parser("check-tail", help="excursion probability: closed form vs Monte Carlo")
    tl.add_argument("--family", default="exp_power")
    tl.add_argument("--v", type=float, default=1.0)
    tl.add_argument("--q", type=float, default=1.0)
    tl.add_argument("--alpha", type=float, default=1.0)
    tl.add_argument("--beta", type=float, default=None)
    tl.add_argument("--H", type=float, default=None, help="Pickands constant for alpha not in {1, 2}")
    tl.add_argument("--t", type=float, default=10.0)
    tl.add_argument("--x", type=float, default=4.0)
    tl.add_argument("--paths", type=int, default=100_000)
    tl.add_argument("--eta", type=float, default=0.1)
    tl.add_argument("--seed", type=int, default=0)
    tl.add_argument("--workers", type=int, default=1)
    tl.set_defaults(func=cmd_check_tail)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigInvalid, InvalidModel, UnknownPickandsConstant) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EmbeddingFailed as exc:
        where = f" at eps={exc.eps}" if exc.eps is not None else ""
        print(f"embedding failed{where}: {exc}", file=sys.stderr)
        return EXIT_EMBEDDING
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
