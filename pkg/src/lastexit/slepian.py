"""Monte Carlo checks of the Slepian comparison for finite Gaussian vectors.

If two centered Gaussian vectors have equal variances and the covariances
of ``U`` are entrywise no larger than those of ``V``, then for non-negative
thresholds ``P{exists j: U_j >= r_j} >= P{exists j: V_j >= r_j}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSampleSize, NotPSD, PreconditionViolated

__all__ = [
    "GaussianVectorSpec",
    "mc_union_prob",
    "SlepianVerdict",
    "slepian_check",
    "SuiteSummary",
    "random_comparison_suite",
]

PSD_SLACK = 1e-10
MIN_SAMPLES = 100_000


@dataclass(frozen=True, eq=False)
class GaussianVectorSpec:
    cov: np.ndarray
    thresholds: np.ndarray

    def __post_init__(self):
        cov = np.atleast_2d(np.asarray(self.cov, dtype=float))
        r = np.atleast_1d(np.asarray(self.thresholds, dtype=float))
        n = cov.shape[0]
        if cov.shape != (n, n) or not 1 <= n <= 16:
            raise ValueError(f"cov must be square with dimension <= 16, got {cov.shape}")
        if r.shape != (n,) or np.any(r < 0):
            raise ValueError("need one non-negative threshold per coordinate")
        if not np.allclose(cov, cov.T, rtol=0, atol=1e-12):
            raise ValueError("cov must be symmetric")
        if np.any(np.diag(cov) <= 0):
            raise ValueError("diagonal entries must be positive")
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "thresholds", r)

    @property
    def n(self) -> int:
        return self.cov.shape[0]

    def sqrt(self) -> np.ndarray:
        """Symmetric square root; small negative eigenvalues are clipped."""
        w, vecs = np.linalg.eigh(self.cov)
        if w.min() < -PSD_SLACK * max(1.0, w.max()):
            raise NotPSD(f"min eigenvalue {w.min():.3g} beyond PSD slack")
        return (vecs * np.sqrt(np.clip(w, 0.0, None))) @ vecs.T


def _union_hits(spec: GaussianVectorSpec, n_samples: int, master_seed: int) -> np.ndarray:
    rng = np.random.default_rng(master_seed)
    x = rng.standard_normal((n_samples, spec.n)) @ spec.sqrt()
    return np.any(x >= spec.thresholds, axis=1)


def mc_union_prob(spec: GaussianVectorSpec, n_samples: int = MIN_SAMPLES,
                  master_seed: int = 0, *, min_samples: int = MIN_SAMPLES) -> tuple[float, float]:
    """Estimate ``P{exists j: X_j >= r_j}`` with its binomial standard error."""
    if n_samples < min_samples:
        raise InvalidSampleSize(f"need at least {min_samples} samples, got {n_samples}")
    p = float(_union_hits(spec, n_samples, master_seed).mean())
    return p, math.sqrt(p * (1.0 - p) / n_samples)


@dataclass(frozen=True)
class SlepianVerdict:
    passed: bool
    margin: float
    est_u: float
    est_v: float
    pooled_se: float


def slepian_check(spec_u: GaussianVectorSpec, spec_v: GaussianVectorSpec,
                  n_samples: int = MIN_SAMPLES, master_seed: int = 0,
                  **kw) -> SlepianVerdict:
    """Check ``P_U >= P_V - 3 SE``; both sides share the same normals.

    ``margin`` is ``(P_U - P_V) / pooled_se``, so identical specs give 0.
    """
    cu, cv = spec_u.cov, spec_v.cov
    if cu.shape != cv.shape:
        raise PreconditionViolated("dimensions differ")
    if not np.allclose(np.diag(cu), np.diag(cv), rtol=0, atol=1e-12):
        raise PreconditionViolated("variances differ")
    if np.any(cu > cv + 1e-12):
        raise PreconditionViolated("U covariances must not exceed V covariances")
    if not np.array_equal(spec_u.thresholds, spec_v.thresholds):
        raise PreconditionViolated("thresholds differ")
    pu, su = mc_union_prob(spec_u, n_samples, master_seed, **kw)
    pv, sv = mc_union_prob(spec_v, n_samples, master_seed, **kw)
    pooled = math.hypot(su, sv)
    margin = 0.0 if pu == pv else (pu - pv) / pooled if pooled > 0 else math.copysign(math.inf, pu - pv)
    return SlepianVerdict(pu >= pv - 3.0 * pooled, margin, pu, pv, pooled)


@dataclass(frozen=True)
class SuiteSummary:
    n_cases: int
    n_pass: int
    n_fail: int
    n_hard_fail: int
    min_margin: float
    margins: tuple


def _random_pair(rng: np.random.Generator, dim: int):
    # V: positively correlated so that shrinking towards 0 lowers every entry
    g = np.abs(rng.standard_normal((dim, dim + 2)))
    v = g @ g.T
    d = np.sqrt(np.diag(v))
    v = v / np.outer(d, d)
    scales = rng.uniform(0.5, 2.0, dim)
    v = v * np.outer(scales, scales)
    diag = np.diag(np.diag(v))
    lam = rng.uniform(0.0, 1.0, (dim, dim))
    lam = np.triu(lam, 1)
    lam = lam + lam.T
    u = diag + lam * (v - diag)
    if np.linalg.eigvalsh(u).min() < -PSD_SLACK:
        # convex combination with the diagonal always stays PSD
        u = diag + rng.uniform() * (v - diag)
    thresholds = rng.uniform(0.0, 2.0, dim) * scales
    return u, v, thresholds


def random_comparison_suite(n_cases: int, dim: int, master_seed: int = 0,
                            n_samples: int = MIN_SAMPLES) -> SuiteSummary:
    """Run :func:`slepian_check` on random ordered covariance pairs.

    A case fails hard when its margin drops below -4 standard errors.
    """
    if not 1 <= dim <= 8:
        raise ValueError(f"dim must lie in 1..8, got {dim}")
    margins, n_pass = [], 0
    for k in range(n_cases):
        ss = np.random.SeedSequence(int(master_seed), spawn_key=(k,))
        build_seed, mc_seed = ss.spawn(2)
        u, v, r = _random_pair(np.random.default_rng(build_seed), dim)
        verdict = slepian_check(GaussianVectorSpec(u, r), GaussianVectorSpec(v, r),
                                n_samples, int(mc_seed.generate_state(1)[0]))
        margins.append(verdict.margin)
        n_pass += verdict.passed
    hard = sum(m < -4.0 for m in margins)
    return SuiteSummary(n_cases, n_pass, n_cases - n_pass, hard,
                        min(margins) if margins else math.nan, tuple(margins))
