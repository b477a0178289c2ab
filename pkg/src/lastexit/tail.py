"""High-level excursion probability of ``max_{[0, t]} Y`` and its Monte Carlo check."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from .covariance import CovarianceModel
from .errors import InvalidSampleSize
from .scaling import SQRT_2PI
from .simulate import DEFAULT_CLIP_TOL, GridSpec, build_embedding, map_paths

__all__ = ["SMALL_RHS", "MIN_SCALE", "TailApprox", "tail_approx", "TailMC", "tail_mc"]

# concrete gates for "right-hand side tends to zero" and "t x^(2/alpha) -> inf"
SMALL_RHS = 0.05
MIN_SCALE = 100.0


@dataclass(frozen=True)
class TailApprox:
    p: float
    small_rhs: bool
    scale_ok: bool

    @property
    def valid(self) -> bool:
        return self.small_rhs and self.scale_ok


def tail_approx(model: CovarianceModel, t: float, x: float,
                H_alpha: float) -> TailApprox:
    """``(Q^(1/a) H / sqrt(2 pi)) t (x/v)^(2/a - 1) exp(-x^2 / (2 v^2))``."""
    if not (t > 0 and x > 0):
        raise ValueError(f"t and x must be positive, got t={t}, x={x}")
    a, v = model.alpha, model.v
    p = (model.q ** (1.0 / a) * H_alpha / SQRT_2PI) * t * (x / v) ** (2.0 / a - 1.0) \
        * math.exp(-x * x / (2.0 * v * v))
    return TailApprox(p, p < SMALL_RHS, t * x ** (2.0 / a) > MIN_SCALE)


@dataclass(frozen=True)
class TailMC:
    estimate: float
    se: float
    n_paths: int
    step: float


def _count_hits(level, values):
    return int(np.count_nonzero(values.max(axis=1) >= level))


def tail_mc(model: CovarianceModel, t: float, x: float, grid_step: float,
            n_paths: int, master_seed: int, workers: int = 1,
            clip_tol: float = DEFAULT_CLIP_TOL) -> TailMC:
    """Fraction of simulated paths on ``[0, t]`` whose grid maximum reaches ``x``.

    The grid maximum misses sub-grid excursions, so the estimate is biased
    low; no correction is applied. Below 10**4 paths the binomial standard
    error is a rough guide only.
    """
    if n_paths < 1:
        raise InvalidSampleSize(f"n_paths must be positive, got {n_paths}")
    grid = GridSpec.covering(t, grid_step)
    spectrum = build_embedding(model, grid, clip_tol)
    hits = sum(map_paths(partial(_count_hits, x), spectrum, master_seed, n_paths, workers))
    p = hits / n_paths
    return TailMC(p, math.sqrt(p * (1.0 - p) / n_paths), n_paths, grid.step)
