"""Stationary covariance families with declared local parameters (v, Q, alpha).

Both families behave like ``v**2 * (1 - Q|t|**alpha)`` near the origin and
decay fast enough at infinity (exponentially or polynomially), so every
shipped model satisfies the two standing assumptions of the last-exit limit
theorem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from .errors import InvalidModel, InvalidRange, RangeTooWide

__all__ = [
    "CovarianceModel",
    "ExpPower",
    "CauchyType",
    "evaluate",
    "model_from_dict",
    "LocalFit",
    "verify_local_expansion",
    "DecayReport",
    "check_decay_condition",
]


@dataclass(frozen=True)
class CovarianceModel:
    """Base class; use :class:`ExpPower` or :class:`CauchyType`."""

    v: float
    q: float
    alpha: float

    family: ClassVar[str] = ""

    def __post_init__(self):
        if not (self.v > 0 and math.isfinite(self.v)):
            raise InvalidModel(f"v must be positive, got {self.v}")
        if not (self.q > 0 and math.isfinite(self.q)):
            raise InvalidModel(f"q must be positive, got {self.q}")
        if not (0 < self.alpha <= 2):
            raise InvalidModel(f"alpha must lie in (0, 2], got {self.alpha}")

    @property
    def variance(self) -> float:
        return self.v * self.v

    def deficit(self, t):
        """Return ``1 - rho(t)/v**2`` without cancellation at small lags."""
        raise NotImplementedError

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = self.variance * (1.0 - self.deficit(t))
        return float(out) if out.ndim == 0 else out

    def second_order_bound(self) -> float:
        """Constant C with ``|deficit(t) - Q|t|**alpha| <= C |t|**(2 alpha)``."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {"family": self.family, "v": self.v, "q": self.q, "alpha": self.alpha}


@dataclass(frozen=True)
class ExpPower(CovarianceModel):
    """``rho(t) = v**2 exp(-Q |t|**alpha)``."""

    family: ClassVar[str] = "exp_power"

    def deficit(self, t):
        x = self.q * np.abs(t) ** self.alpha
        return -np.expm1(-x)

    def second_order_bound(self) -> float:
        # |1 - e^{-x} - x| <= x^2 / 2 for x >= 0
        return 0.5 * self.q**2


@dataclass(frozen=True)
class CauchyType(CovarianceModel):
    """``rho(t) = v**2 (1 + (Q/beta) |t|**alpha)**(-beta)``.

    Scaling Q by ``1/beta`` keeps the small-lag coefficient equal to Q for
    every beta.
    """

    beta: float = 1.0

    family: ClassVar[str] = "cauchy"

    def __post_init__(self):
        super().__post_init__()
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise InvalidModel(f"beta must be positive, got {self.beta}")

    def deficit(self, t):
        x = (self.q / self.beta) * np.abs(t) ** self.alpha
        return -np.expm1(-self.beta * np.log1p(x))

    def second_order_bound(self) -> float:
        # f(x) = 1 - (1 + x/b)^-b has f'(0) = 1 and |f''| <= (b + 1)/b
        return 0.5 * self.q**2 * (self.beta + 1.0) / self.beta

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["beta"] = self.beta
        return d


_FAMILIES = {"exp_power": ExpPower, "cauchy": CauchyType}


def model_from_dict(d: dict) -> CovarianceModel:
    """Build a model from the flat config keys ``family, v, q, alpha, beta``."""
    try:
        family = str(d["family"]).lower()
        cls = _FAMILIES[family]
        kwargs = dict(v=float(d["v"]), q=float(d["q"]), alpha=float(d["alpha"]))
    except KeyError as exc:
        raise InvalidModel(f"missing or unknown model key: {exc}") from None
    if cls is CauchyType:
        kwargs["beta"] = float(d.get("beta", 1.0))
    elif d.get("beta") is not None:
        raise InvalidModel("beta is only meaningful for the cauchy family")
    return cls(**kwargs)


def evaluate(model: CovarianceModel, t):
    """Covariance ``rho(t)``; even in t, equal to ``v**2`` at 0."""
    return model(t)


@dataclass(frozen=True)
class LocalFit:
    alpha_hat: float
    q_hat: float
    max_residual: float


def verify_local_expansion(model: CovarianceModel, t_min: float, t_max: float,
                           n_points: int = 50) -> LocalFit:
    """Fit ``log(1 - rho/v^2) = log Q + alpha log t`` on a log-spaced grid.

    Returns the fitted exponent, the coefficient ``exp(intercept)`` and the
    largest absolute residual of the regression in log space.
    """
    if not (0 < t_min < t_max) or n_points < 2:
        raise InvalidRange(f"need 0 < t_min < t_max and n_points >= 2, got "
                           f"[{t_min}, {t_max}], n_points={n_points}")
    t = np.geomspace(t_min, t_max, n_points)
    d = model.deficit(t)
    if np.any(d >= 0.5):
        raise RangeTooWide(f"1 - rho/v^2 reaches {d.max():.3g} on [{t_min}, {t_max}]")
    x, y = np.log(t), np.log(d)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return LocalFit(float(slope), float(math.exp(intercept)), float(np.abs(resid).max()))


@dataclass(frozen=True)
class DecayReport:
    s: tuple
    d: tuple
    passed: bool


def check_decay_condition(model: CovarianceModel, s_grid) -> DecayReport:
    """Tabulate ``D(s) = sup_{t >= s} |rho(t)| ln s`` on an increasing grid.

    Both families are decreasing in |t| on (0, inf), so the supremum is
    ``rho(s)`` for every s > 1. The report passes when D is nonincreasing
    on the grid.
    """
    s = np.asarray(s_grid, dtype=float)
    if s.ndim != 1 or s.size == 0 or np.any(s <= 1) or np.any(np.diff(s) <= 0):
        raise InvalidRange("s_grid must be increasing with all entries > 1")
    d = np.abs(model(s)) * np.log(s)
    d = np.atleast_1d(d)
    passed = bool(np.all(np.diff(d) <= 0))
    return DecayReport(tuple(s.tolist()), tuple(d.tolist()), passed)
