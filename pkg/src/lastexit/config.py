"""Campaign configuration: flat ``[model]`` / ``[run]`` TOML sections plus overrides.

Keys::

    [model]  family (exp_power | cauchy), v, q, alpha, beta (cauchy only)
    [run]    eps_list, n_paths, master_seed, delta_tail, eta, H_alpha,
             output_dir, clip_tol, ks_threshold, trend_slack, dump_paths,
             workers
"""

from __future__ import annotations

import logging
import math
import sys
from dataclasses import dataclass, fields

from .covariance import CovarianceModel, model_from_dict
from .errors import ConfigInvalid, InvalidModel, UnknownPickandsConstant
from .scaling import pickands_constant, scaling_constants
from .exit_time import plan_window

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["ExperimentConfig", "load_config", "parse_config", "apply_overrides", "GRID_WARN"]

log = logging.getLogger(__name__)

GRID_WARN = 1 << 24


@dataclass(frozen=True)
class ExperimentConfig:
    model: CovarianceModel
    eps_list: tuple
    n_paths: int
    master_seed: int
    delta_tail: float = 1e-3
    eta: float = 0.1
    H_alpha: float | None = None
    output_dir: str = "results"
    clip_tol: float = 1e-9
    ks_threshold: float = 0.08
    trend_slack: float = 0.02
    dump_paths: bool = False
    workers: int = 1

    def __post_init__(self):
        eps = tuple(float(e) for e in self.eps_list)
        object.__setattr__(self, "eps_list", eps)
        if not eps:
            raise ConfigInvalid("eps_list is empty")
        if any(e <= 0 or e / self.model.v >= 1 for e in eps):
            raise ConfigInvalid(f"every eps must satisfy 0 < eps/v < 1, got {eps}")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ConfigInvalid(f"eps_list must be strictly decreasing, got {eps}")
        if self.n_paths < 100:
            raise ConfigInvalid(f"n_paths must be at least 100, got {self.n_paths}")
        if not (0 < self.delta_tail <= 0.1):
            raise ConfigInvalid(f"delta_tail must lie in (0, 0.1], got {self.delta_tail}")
        if not (0 < self.eta <= 0.5):
            raise ConfigInvalid(f"eta must lie in (0, 0.5], got {self.eta}")
        if self.workers < 1:
            raise ConfigInvalid("workers must be positive")
        try:
            pickands_constant(self.model.alpha, self.H_alpha)
        except UnknownPickandsConstant as exc:
            raise ConfigInvalid(str(exc)) from None
        for e in eps:
            sc = scaling_constants(self.model, e, self.H)
            plan = plan_window(sc, self.model, self.delta_tail, self.eta)
            n = math.ceil(plan.t_max / plan.step) + 1
            if n > GRID_WARN:
                log.warning("eps=%g implies %d grid points per path (> 2**24)", e, n)

    @property
    def H(self) -> float:
        return pickands_constant(self.model.alpha, self.H_alpha)

    def to_dict(self) -> dict:
        run = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "model"}
        run["eps_list"] = list(self.eps_list)
        return {"model": self.model.to_dict(), "run": run}


_RUN_KEYS = {f.name for f in fields(ExperimentConfig)} - {"model"}


def _parse_value(text: str):
    try:
        return tomllib.loads(f"x = {text}")["x"]
    except tomllib.TOMLDecodeError:
        return text


def apply_overrides(data: dict, overrides) -> dict:
    """Apply ``section.key=value`` strings; values are parsed as TOML when possible."""
    data = {k: dict(v) for k, v in data.items()}
    for item in overrides or ():
        key, sep, value = item.partition("=")
        section, dot, name = key.strip().partition(".")
        if not sep or not dot or not name:
            raise ConfigInvalid(f"override must look like section.key=value, got {item!r}")
        data.setdefault(section, {})[name.strip()] = _parse_value(value.strip())
    return data


def parse_config(data: dict) -> ExperimentConfig:
    unknown = set(data) - {"model", "run"}
    if unknown:
        raise ConfigInvalid(f"unknown config sections: {sorted(unknown)}")
    run = dict(data.get("run", {}))
    bad = set(run) - _RUN_KEYS
    if bad:
        raise ConfigInvalid(f"unknown [run] keys: {sorted(bad)}")
    try:
        model = model_from_dict(data.get("model", {}))
        return ExperimentConfig(model=model, **run)
    except (InvalidModel, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigInvalid):
            raise
        raise ConfigInvalid(str(exc)) from exc


def load_config(path, overrides=None) -> ExperimentConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    return parse_config(apply_overrides(data, overrides))
