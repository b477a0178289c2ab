"""Last exit of a sampled path over the line ``eps * t`` and window planning."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .covariance import CovarianceModel
from .scaling import ScalingConstants, sigma_tail_estimate
from .simulate import PathSample

__all__ = [
    "Crossed",
    "NoCrossing",
    "RightCensored",
    "ExitOutcome",
    "CROSSED",
    "NOCROSS",
    "CENSORED",
    "last_exit_time",
    "last_exit_batch",
    "HorizonPlan",
    "choose_horizon",
    "step_for_level",
    "choose_step",
    "plan_window",
]

CROSSED, NOCROSS, CENSORED = 0, 1, 2
OUTCOME_NAMES = {CROSSED: "CROSSED", NOCROSS: "NOCROSS", CENSORED: "CENSORED"}


@dataclass(frozen=True)
class Crossed:
    T: float


@dataclass(frozen=True)
class NoCrossing:
    pass


@dataclass(frozen=True)
class RightCensored:
    last_cross: float


ExitOutcome = Crossed | NoCrossing | RightCensored


def last_exit_batch(values: np.ndarray, step: float, eps: float, guard: float):
    """Vectorized last exit over the rows of ``values``.

    Returns ``(codes, times)``: ``codes`` uses CROSSED / NOCROSS / CENSORED;
    ``times`` holds the interpolated exit for CROSSED rows, the last grid
    point at or above the line for CENSORED rows, and NaN otherwise.
    """
    if guard < 0:
        raise ValueError(f"guard must be non-negative, got {guard}")
    values = np.atleast_2d(np.asarray(values, dtype=float))
    count, n = values.shape
    t = np.arange(n) * step
    t_max = t[-1]
    g = values - eps * t
    above = g >= 0
    any_above = above.any(axis=1)
    last = n - 1 - np.argmax(above[:, ::-1], axis=1)

    codes = np.full(count, NOCROSS, dtype=np.int8)
    times = np.full(count, np.nan)
    rows = np.nonzero(any_above)[0]
    idx = last[rows]
    censored = t[idx] >= t_max - guard
    c_rows = rows[censored]
    codes[c_rows] = CENSORED
    times[c_rows] = t[idx[censored]]

    x_rows, xi = rows[~censored], idx[~censored]
    g0 = g[x_rows, xi]
    g1 = g[x_rows, xi + 1]
    frac = np.where(g0 == 0, 0.0, g0 / (g0 - g1))
    codes[x_rows] = CROSSED
    times[x_rows] = t[xi] + frac * step
    return codes, times


def last_exit_time(path: PathSample, eps: float, guard: float) -> ExitOutcome:
    """Largest grid time with ``Y >= eps t``, refined by linear interpolation.

    A last crossing inside ``[t_max - guard, t_max]`` is right-censored:
    the path may cross again beyond the window.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    codes, times = last_exit_batch(path.values[None, :], path.grid.step, eps, guard)
    code, T = int(codes[0]), float(times[0])
    if code == CROSSED:
        return Crossed(T)
    if code == CENSORED:
        return RightCensored(T)
    return NoCrossing()


@dataclass(frozen=True)
class HorizonPlan:
    t_max: float
    guard: float
    R_used: float
    tail_bound: float
    step: float


def choose_horizon(sc: ScalingConstants, delta_tail: float = 1e-3,
                   step: float = math.nan) -> HorizonPlan:
    """Window ``[0, A + B R]`` with ``R = ln(c / delta_tail)``.

    Exits after the window then have probability about ``delta_tail``; the
    guard zone is one ``B`` wide.
    """
    if not (0 < delta_tail <= 0.1):
        raise ValueError(f"delta_tail must lie in (0, 0.1], got {delta_tail}")
    R = math.log(sc.c / delta_tail)
    if R <= 0:
        raise ValueError(f"delta_tail={delta_tail} is not below c={sc.c}")
    return HorizonPlan(sc.A + sc.B * R, sc.B, R, sigma_tail_estimate(sc, R), step)


def step_for_level(model: CovarianceModel, level: float, eta: float = 0.1) -> float:
    """Grid step resolving the ``level**(-2/alpha)`` excursion scale at ``level`` (in units of v)."""
    if not (0 < eta <= 0.5):
        raise ValueError(f"eta must lie in (0, 0.5], got {eta}")
    return eta * model.q ** (-1.0 / model.alpha) * level ** (-2.0 / model.alpha)


def choose_step(sc: ScalingConstants, model: CovarianceModel, eta: float = 0.1) -> float:
    return step_for_level(model, sc.level, eta)


def plan_window(sc: ScalingConstants, model: CovarianceModel, delta_tail: float = 1e-3,
                eta: float = 0.1) -> HorizonPlan:
    """Horizon and step together."""
    return choose_horizon(sc, delta_tail, choose_step(sc, model, eta))
