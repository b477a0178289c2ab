"""Lattice sums of ``x**(2/alpha - 1) exp(-x**2 / 2)`` and their closed-form asymptotics.

The sum runs over lattice points ``x_i = (a i + b) eps`` with ``a i + b >= theta``.
Because the summand decreases past ``sqrt(max(0, 2/alpha - 1))``, each
term is squeezed between the integrals over its neighbouring lattice
cells, which brackets the whole sum between two tail integrals.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy import integrate

from .errors import MonotonicityViolated

__all__ = [
    "SumQuery",
    "lhs_sum",
    "rhs_closed_form",
    "integral_brackets",
    "decay_onset",
    "RatioRow",
    "ratio_scan",
    "rows_to_csv",
]

ABS_CUTOFF = 1e-300
REL_CUTOFF = 1e-16
QUAD_SPAN = 20.0
QUAD_TOL = 1e-12


@dataclass(frozen=True)
class SumQuery:
    a: float
    b: float
    theta: float
    eps: float
    alpha: float

    def __post_init__(self):
        if not (self.a > 0 and self.theta > 0 and self.eps > 0):
            raise ValueError("a, theta and eps must be positive")
        if not (0 < self.alpha <= 2):
            raise ValueError(f"alpha must lie in (0, 2], got {self.alpha}")

    @property
    def power(self) -> float:
        return 2.0 / self.alpha - 1.0

    def flags(self) -> tuple[str, ...]:
        """Finite-scale proxies for theta*eps -> inf, a = o(theta), theta*a*eps^2 -> 0."""
        out = []
        if self.theta * self.eps < 3:
            out.append("theta_eps_small")
        if self.a / self.theta >= 0.1:
            out.append("a_not_small")
        if self.theta * self.a * self.eps**2 >= 0.5:
            out.append("theta_a_eps2_large")
        return tuple(out)

    def first_index(self) -> int:
        i = math.ceil((self.theta - self.b) / self.a)
        # guard against rounding in the division
        while self.a * (i - 1) + self.b >= self.theta:
            i -= 1
        while self.a * i + self.b < self.theta:
            i += 1
        return i


def _summand(x, p):
    return x**p * np.exp(-0.5 * x * x)


def decay_onset(alpha: float) -> float:
    """Point past which ``x**(2/alpha - 1) exp(-x**2/2)`` is decreasing."""
    return math.sqrt(max(0.0, 2.0 / alpha - 1.0))


def lhs_sum(q: SumQuery, horizon_scale: float = 1.0) -> float:
    """Direct summation from the first admissible index.

    Stops, once past the decay onset, at the first term below 1e-300 or below
    1e-16 of the running total. ``horizon_scale > 1`` keeps summing that many
    times as far past the start, for truncation checks.
    """
    p = q.power
    onset = decay_onset(q.alpha)
    i0 = q.first_index()
    total = 0.0
    parts = []
    i = i0
    block = 256
    stop = None
    while stop is None:
        idx = np.arange(i, i + block, dtype=float)
        x = (q.a * idx + q.b) * q.eps
        terms = _summand(x, p)
        for j in range(block):
            term = terms[j]
            if x[j] > onset and (term < ABS_CUTOFF or term < REL_CUTOFF * (total + term)):
                stop = i + j
                break
            total += term
        parts.append(terms[: j + 1] if stop is None else terms[:j])
        i += block
    if horizon_scale > 1.0:
        extra_end = i0 + int(math.ceil(horizon_scale * (stop - i0 + 1)))
        idx = np.arange(stop, max(stop, extra_end), dtype=float)
        parts.append(_summand((q.a * idx + q.b) * q.eps, p))
    return math.fsum(np.concatenate(parts).tolist())


def rhs_closed_form(q: SumQuery) -> float:
    """``(1/(a eps)) (theta eps)**(2/alpha - 2) exp(-(theta eps)**2 / 2)``."""
    x = q.theta * q.eps
    return x ** (2.0 / q.alpha - 2.0) * math.exp(-0.5 * x * x) / (q.a * q.eps)


def _tail_integral(lo: float, p: float) -> float:
    val, _ = integrate.quad(lambda x: x**p * math.exp(-0.5 * x * x), lo, lo + QUAD_SPAN,
                            epsabs=0.0, epsrel=QUAD_TOL, limit=200)
    return val


def integral_brackets(q: SumQuery) -> tuple[float, float]:
    """Tail integrals from ``(theta + a) eps`` and ``(theta - a) eps``, divided by ``a eps``.

    Returns ``(lower, upper)`` with ``lower <= lhs_sum(q) <= upper``. The
    upper bound needs the summand to be decreasing from ``(theta - a) eps``.
    """
    lo_upper = (q.theta - q.a) * q.eps
    onset = decay_onset(q.alpha)
    if lo_upper < onset or lo_upper <= 0:
        raise MonotonicityViolated(
            f"(theta - a) eps = {lo_upper:.4g} is below the decay onset {onset:.4g}")
    p = q.power
    scale = 1.0 / (q.a * q.eps)
    lower = scale * _tail_integral((q.theta + q.a) * q.eps, p)
    upper = scale * _tail_integral(lo_upper, p)
    return lower, upper


@dataclass(frozen=True)
class RatioRow:
    eps: float
    lhs: float
    rhs: float
    ratio: float
    flags: tuple = field(default=())
    lower: float = math.nan
    upper: float = math.nan

    @property
    def bracketed(self) -> bool:
        return self.lower <= self.lhs <= self.upper


def ratio_scan(alpha: float, a_rule: Callable[[float], float],
               theta_rule: Callable[[float], float], eps_grid: Iterable[float],
               b_rule: Callable[[float], float] = lambda eps: 0.0) -> list[RatioRow]:
    """Ratio of the lattice sum to its closed form along decreasing eps."""
    rows = []
    for eps in sorted(eps_grid, reverse=True):
        q = SumQuery(a_rule(eps), b_rule(eps), theta_rule(eps), eps, alpha)
        lhs, rhs = lhs_sum(q), rhs_closed_form(q)
        try:
            lower, upper = integral_brackets(q)
            flags = q.flags()
        except MonotonicityViolated:
            lower = upper = math.nan
            flags = q.flags() + ("below_decay_onset",)
        rows.append(RatioRow(eps, lhs, rhs, lhs / rhs, flags, lower, upper))
    return rows


def rows_to_csv(rows: list[RatioRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eps", "lhs", "rhs", "ratio", "flags"])
    for r in rows:
        w.writerow([repr(r.eps), repr(r.lhs), repr(r.rhs), repr(r.ratio), ";".join(r.flags)])
    return buf.getvalue()
