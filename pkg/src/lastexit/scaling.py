"""Normalizing constants and the double-exponential limit law for last exit times.

For a trend ``eps`` and process scale ``v`` write ``eps_v = eps / v`` and
``u = sqrt(-2 ln eps_v)`` (the critical level). Then

    A = (u + (1/alpha - 1) ln(u**2) / u) / eps_v
    B = 1 / (eps_v u)
    c = Q**(1/alpha) H_alpha / sqrt(2 pi)

and ``P{(T - A)/B <= r} -> exp(-c exp(-r))`` as ``eps -> 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .covariance import CovarianceModel
from .errors import InvalidModel, UnknownPickandsConstant

__all__ = [
    "ScalingConstants",
    "pickands_constant",
    "scaling_constants",
    "tau_of",
    "gumbel_limit_cdf",
    "gumbel_limit_median",
    "gumbel_limit_ppf",
    "verify_tau_relation",
    "sigma_tail_estimate",
]

SQRT_2PI = math.sqrt(2.0 * math.pi)


def pickands_constant(alpha: float, user_value: float | None = None) -> float:
    """Pickands constant: exact for alpha in {1, 2}, otherwise ``user_value``."""
    if not (0 < alpha <= 2):
        raise InvalidModel(f"alpha must lie in (0, 2], got {alpha}")
    if alpha == 1:
        return 1.0
    if alpha == 2:
        return 1.0 / math.sqrt(math.pi)
    if user_value is None:
        raise UnknownPickandsConstant(
            f"no closed form for H_alpha at alpha={alpha}; supply a value")
    if not user_value > 0:
        raise ValueError(f"Pickands constant must be positive, got {user_value}")
    return float(user_value)


@dataclass(frozen=True)
class ScalingConstants:
    eps: float
    eps_v: float
    A: float
    B: float
    c: float
    alpha: float
    H_alpha: float

    def __post_init__(self):
        if not (0 < self.eps_v < 1):
            raise ValueError(f"eps/v must lie in (0, 1), got {self.eps_v}")

    @property
    def level(self) -> float:
        """Critical level ``sqrt(-2 ln eps_v)``."""
        return math.sqrt(-2.0 * math.log(self.eps_v))

    def normalize(self, T):
        return (np.asarray(T, dtype=float) - self.A) / self.B


def scaling_constants(model: CovarianceModel, eps: float,
                      H_alpha: float | None = None) -> ScalingConstants:
    if H_alpha is None:
        H_alpha = pickands_constant(model.alpha)
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    eps_v = eps / model.v
    if not eps_v < 1:
        raise ValueError(f"eps/v = {eps_v} must be below 1")
    alpha = model.alpha
    L = -2.0 * math.log(eps_v)
    u = math.sqrt(L)
    A = (u + (1.0 / alpha - 1.0) * math.log(L) / u) / eps_v
    B = 1.0 / (eps_v * u)
    c = model.q ** (1.0 / alpha) * H_alpha / SQRT_2PI
    return ScalingConstants(eps, eps_v, A, B, c, alpha, H_alpha)


def tau_of(sc: ScalingConstants, r):
    return sc.A + sc.B * r


def gumbel_limit_cdf(r, c: float):
    """``exp(-c exp(-r))``."""
    r = np.asarray(r, dtype=float)
    with np.errstate(over="ignore"):
        out = np.exp(-c * np.exp(-r))
    return float(out) if out.ndim == 0 else out


def gumbel_limit_ppf(p, c: float):
    """Inverse of :func:`gumbel_limit_cdf`: ``-ln(-ln(p)/c)``."""
    p = np.asarray(p, dtype=float)
    out = -np.log(-np.log(p) / c)
    return float(out) if out.ndim == 0 else out


def gumbel_limit_median(c: float) -> float:
    return math.log(c / math.log(2.0))


def _exit_intensity(x: float, eps_v: float, alpha: float) -> float:
    # (1/eps)(x)^{2/alpha - 2} exp(-x^2/2) at x = time * eps, in v = 1 units
    return (x ** (2.0 / alpha - 2.0)) * math.exp(-0.5 * x * x) / eps_v


def verify_tau_relation(model: CovarianceModel, eps_grid, r: float,
                        H_alpha: float | None = None) -> list[tuple[float, float]]:
    """Rows ``(eps, ratio)`` with ratio = (1/eps)(tau eps)^(2/a-2) exp(-(tau eps)^2/2) / e^-r.

    Evaluated with ``eps_v``; the ratio tends to 1 as eps decreases.
    """
    rows = []
    for eps in eps_grid:
        sc = scaling_constants(model, eps, H_alpha)
        x = tau_of(sc, r) * sc.eps_v
        rows.append((float(eps), _exit_intensity(x, sc.eps_v, sc.alpha) / math.exp(-r)))
    return rows


def sigma_tail_estimate(sc: ScalingConstants, R: float) -> float:
    """Closed-form probability of any exit after ``sigma = A + B R``.

    This is ``c (1/eps)(sigma eps)^(2/a-2) exp(-(sigma eps)^2/2)``, which is
    close to ``c exp(-R)`` for small eps.
    """
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    x = tau_of(sc, R) * sc.eps_v
    return sc.c * _exit_intensity(x, sc.eps_v, sc.alpha)
