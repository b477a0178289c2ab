"""Simulation and verification tools for last exit times of stationary Gaussian
processes over a slowly growing linear boundary."""

__version__ = "0.1.0"

from .covariance import CauchyType, CovarianceModel, ExpPower, evaluate, model_from_dict  # noqa: E402
from .scaling import (  # noqa: E402
    ScalingConstants,
    gumbel_limit_cdf,
    pickands_constant,
    scaling_constants,
    tau_of,
)
from .simulate import GridSpec, build_embedding, sample_path  # noqa: E402
from .exit_time import Crossed, NoCrossing, RightCensored, last_exit_time  # noqa: E402

__all__ = [
    "__version__",
    "CovarianceModel",
    "ExpPower",
    "CauchyType",
    "evaluate",
    "model_from_dict",
    "ScalingConstants",
    "pickands_constant",
    "scaling_constants",
    "tau_of",
    "gumbel_limit_cdf",
    "GridSpec",
    "build_embedding",
    "sample_path",
    "last_exit_time",
    "Crossed",
    "NoCrossing",
    "RightCensored",
]
