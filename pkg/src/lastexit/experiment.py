"""Monte Carlo campaigns for the last exit time limit law.

For each trend ``eps`` a campaign plans the window and grid, simulates
``n_paths`` paths, extracts last exits, normalizes ``r = (T - A) / B`` and
measures the Kolmogorov-Smirnov distance to ``exp(-c exp(-r))``.

Output layout in ``output_dir``::

    eps_<eps>.csv     path_index,outcome,T,r_norm   (one row per path)
    summary.json      config echo, per-eps reports, library version
    metadata.json     wall clock and execution details (not deterministic)
    paths_<eps>.bin   raw paths, only when dump_paths is set
"""

from __future__ import annotations

import json
import logging
import math
import os
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from functools import partial

import numpy as np

from . import __version__
from .config import ExperimentConfig
from .errors import EmbeddingFailed, TooFewSamples
from .exit_time import CENSORED, CROSSED, NOCROSS, OUTCOME_NAMES, last_exit_batch, plan_window
from .scaling import ScalingConstants, gumbel_limit_cdf, gumbel_limit_median, scaling_constants
from .simulate import GridSpec, build_embedding, map_paths, write_path_dump

__all__ = [
    "QUANTILE_LEVELS",
    "FitStats",
    "gumbel_fit",
    "GumbelFitReport",
    "EpsResult",
    "CampaignResult",
    "run_eps",
    "run_campaign",
    "ConvergenceRow",
    "ConvergenceSummary",
    "convergence_report",
    "load_reports",
    "read_exit_csv",
]

log = logging.getLogger(__name__)

QUANTILE_LEVELS = (0.1, 0.25, 0.5, 0.75, 0.9)
MIN_FIT_SAMPLES = 50
# keys that affect where and how fast a campaign runs, never its results
_EXECUTION_KEYS = ("output_dir", "workers")


@dataclass(frozen=True)
class FitStats:
    ks_distance: float
    quantiles: dict


def gumbel_fit(samples, c: float) -> FitStats:
    """One-sample KS distance to the fully specified limit law, plus quantiles."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n < MIN_FIT_SAMPLES:
        raise TooFewSamples(f"need at least {MIN_FIT_SAMPLES} samples, got {n}")
    F = gumbel_limit_cdf(x, c)
    i = np.arange(1, n + 1)
    ks = max(float(np.max(i / n - F)), float(np.max(F - (i - 1) / n)))
    q = np.quantile(x, QUANTILE_LEVELS)
    return FitStats(ks, {str(p): float(v) for p, v in zip(QUANTILE_LEVELS, q)})


@dataclass(frozen=True)
class GumbelFitReport:
    eps: float
    n_paths: int
    n_effective: int
    n_nocross: int
    n_censored: int
    ks_distance: float | None
    quantiles: dict
    c_used: float
    A: float
    B: float
    t_max: float
    step: float
    n_grid: int
    embedding_size: int
    clip_fraction: float

    @property
    def median(self) -> float | None:
        return self.quantiles.get("0.5")

    @classmethod
    def from_dict(cls, d: dict) -> "GumbelFitReport":
        return cls(**d)


@dataclass
class EpsResult:
    report: GumbelFitReport
    scaling: ScalingConstants
    codes: np.ndarray = field(repr=False)
    times: np.ndarray = field(repr=False)

    @property
    def r_norm(self) -> np.ndarray:
        return self.scaling.normalize(self.times[self.codes == CROSSED])


@dataclass
class CampaignResult:
    config: ExperimentConfig
    results: list

    @property
    def reports(self) -> list:
        return [r.report for r in self.results]


def _exit_chunk(eps, guard, step, keep_paths, values):
    codes, times = last_exit_batch(values, step, eps, guard)
    return codes, times, (values if keep_paths else None)


def run_eps(config: ExperimentConfig, eps: float, workers: int = 1,
            dump_path=None) -> EpsResult:
    """Simulate one trend level and fit the normalized exits."""
    model = config.model
    sc = scaling_constants(model, eps, config.H)
    plan = plan_window(sc, model, config.delta_tail, config.eta)
    grid = GridSpec.covering(plan.t_max, plan.step)
    try:
        spectrum = build_embedding(model, grid, config.clip_tol)
    except EmbeddingFailed as exc:
        exc.eps = eps
        raise
    fn = partial(_exit_chunk, eps, plan.guard, grid.step, dump_path is not None)
    chunks = map_paths(fn, spectrum, config.master_seed, config.n_paths, workers)
    codes = np.concatenate([c[0] for c in chunks])
    times = np.concatenate([c[1] for c in chunks])
    if dump_path is not None:
        write_path_dump(dump_path, np.concatenate([c[2] for c in chunks]), grid.step)

    crossed = codes == CROSSED
    r = sc.normalize(times[crossed])
    try:
        fit = gumbel_fit(r, sc.c)
        ks, quantiles = fit.ks_distance, fit.quantiles
    except TooFewSamples:
        log.warning("eps=%g: only %d crossed paths, no fit", eps, r.size)
        ks, quantiles = None, {}
    report = GumbelFitReport(
        eps=float(eps), n_paths=config.n_paths, n_effective=int(crossed.sum()),
        n_nocross=int((codes == NOCROSS).sum()), n_censored=int((codes == CENSORED).sum()),
        ks_distance=ks, quantiles=quantiles, c_used=sc.c, A=sc.A, B=sc.B,
        t_max=grid.t_max, step=grid.step, n_grid=grid.n,
        embedding_size=spectrum.size, clip_fraction=spectrum.clip_fraction)
    return EpsResult(report, sc, codes, times)


def _fmt(x: float) -> str:
    return "" if math.isnan(x) else repr(float(x))


def write_exit_csv(path, result: EpsResult) -> None:
    """Write one row per path; T is the last crossing (censored rows included)."""
    sc = result.scaling
    with open(path, "w", newline="") as fh:
        fh.write("path_index,outcome,T,r_norm\n")
        for i, (code, T) in enumerate(zip(result.codes.tolist(), result.times.tolist())):
            r = (T - sc.A) / sc.B if code == CROSSED else math.nan
            fh.write(f"{i},{OUTCOME_NAMES[code]},{_fmt(T)},{_fmt(r)}\n")


def read_exit_csv(path) -> list[tuple[int, str, float, float]]:
    rows = []
    with open(path) as fh:
        next(fh)
        for line in fh:
            i, outcome, T, r = line.rstrip("\n").split(",")
            rows.append((int(i), outcome, float(T) if T else math.nan, float(r) if r else math.nan))
    return rows


def _eps_tag(eps: float) -> str:
    return repr(float(eps))


def run_campaign(config: ExperimentConfig, workers: int | None = None,
                 write: bool = True) -> CampaignResult:
    """Run every eps in ``config.eps_list`` (sequentially) and persist the results."""
    workers = config.workers if workers is None else workers
    out = config.output_dir
    if write:
        os.makedirs(out, exist_ok=True)
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    results, timings = [], {}
    for eps in config.eps_list:
        t_eps = time.perf_counter()
        dump = os.path.join(out, f"paths_{_eps_tag(eps)}.bin") if (write and config.dump_paths) else None
        res = run_eps(config, eps, workers, dump)
        timings[_eps_tag(eps)] = time.perf_counter() - t_eps
        log.info("eps=%g: n_eff=%d ks=%s", eps, res.report.n_effective, res.report.ks_distance)
        if write:
            write_exit_csv(os.path.join(out, f"eps_{_eps_tag(eps)}.csv"), res)
        results.append(res)
    campaign = CampaignResult(config, results)
    if write:
        echo = config.to_dict()
        for key in _EXECUTION_KEYS:
            echo["run"].pop(key, None)
        summary = {"version": __version__, "config": echo,
                   "reports": [asdict(r) for r in campaign.reports]}
        with open(os.path.join(out, "summary.json"), "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
        meta = {"started": started.isoformat(), "wall_clock_s": time.perf_counter() - t0,
                "per_eps_s": timings, "workers": workers, "output_dir": str(out)}
        with open(os.path.join(out, "metadata.json"), "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return campaign


@dataclass(frozen=True)
class ConvergenceRow:
    eps: float
    n_effective: int
    ks_distance: float | None
    median_shift: float | None


@dataclass(frozen=True)
class ConvergenceSummary:
    rows: tuple
    r_med: float
    trend_ok: bool | None
    final_ok: bool
    passed: bool
    ks_threshold: float
    slack: float

    def table(self) -> str:
        lines = [f"{'eps':>10} {'n_eff':>7} {'ks':>8} {'median_shift':>13}"]
        for r in self.rows:
            ks = "n/a" if r.ks_distance is None else f"{r.ks_distance:.4f}"
            ms = "n/a" if r.median_shift is None else f"{r.median_shift:+.4f}"
            lines.append(f"{r.eps:>10g} {r.n_effective:>7d} {ks:>8} {ms:>13}")
        trend = "n/a" if self.trend_ok is None else ("ok" if self.trend_ok else "FAIL")
        lines.append(f"theoretical median r_med = {self.r_med:.6f}")
        lines.append(f"trend (slack {self.slack}): {trend}; final ks <= {self.ks_threshold}: "
                     f"{'ok' if self.final_ok else 'FAIL'}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def convergence_report(reports, ks_threshold: float = 0.08,
                       slack: float = 0.02) -> ConvergenceSummary:
    """Tabulate KS distance and median shift along decreasing eps.

    Passes when the last KS distance is within ``ks_threshold`` and no step
    increases the distance by more than ``slack``.
    """
    reports = sorted(reports, key=lambda r: r.eps, reverse=True)
    if not reports:
        raise ValueError("no reports")
    c_vals = {r.c_used for r in reports}
    r_med = gumbel_limit_median(reports[0].c_used)
    if len(c_vals) > 1:
        log.warning("reports use different c values: %s", sorted(c_vals))
    rows = []
    for r in reports:
        shift = None if r.median is None else r.median - gumbel_limit_median(r.c_used)
        rows.append(ConvergenceRow(r.eps, r.n_effective, r.ks_distance, shift))
    ks = [r.ks_distance for r in rows]
    if len(rows) == 1:
        trend_ok = None
    elif any(k is None for k in ks):
        trend_ok = False
    else:
        trend_ok = all(b <= a + slack for a, b in zip(ks, ks[1:]))
    final_ok = ks[-1] is not None and ks[-1] <= ks_threshold
    passed = final_ok and trend_ok is not False
    return ConvergenceSummary(tuple(rows), r_med, trend_ok, final_ok, passed,
                              ks_threshold, slack)


def load_reports(output_dir) -> tuple[list[GumbelFitReport], dict]:
    """Reports and config echo from a campaign's ``summary.json``."""
    with open(os.path.join(output_dir, "summary.json")) as fh:
        summary = json.load(fh)
    return [GumbelFitReport.from_dict(d) for d in summary["reports"]], summary["config"]
