"""Circulant-embedding sampler for stationary Gaussian paths on a uniform grid.

Every path draws its normals from its own stream, keyed by
``(master_seed, path_index)`` through :class:`numpy.random.SeedSequence`
spawn keys. Paths are generated in fixed index chunks, so any batch output
is a pure function of the inputs, whatever the worker count.
"""

from __future__ import annotations

import math
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .covariance import CovarianceModel
from .errors import EmbeddingFailed, InvalidRange, InvalidSampleSize

__all__ = [
    "GridSpec",
    "EmbeddingSpectrum",
    "PathSample",
    "build_embedding",
    "path_rng",
    "sample_path",
    "sample_batch",
    "map_paths",
    "sample_dense",
    "CovCheck",
    "empirical_cov_check",
    "write_path_dump",
    "read_path_dump",
    "CHUNK",
    "DEFAULT_CLIP_TOL",
]

CHUNK = 256
DEFAULT_CLIP_TOL = 1e-9
DUMP_MAGIC = b"GPSIM1\0\0"
_DUMP_HEADER = struct.Struct("<8sQQd")


@dataclass(frozen=True)
class GridSpec:
    step: float
    n: int

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise InvalidRange(f"grid step must be positive, got {self.step}")
        if int(self.n) != self.n or self.n < 2:
            raise InvalidRange(f"grid needs n >= 2 points, got {self.n}")

    @property
    def t_max(self) -> float:
        return self.step * (self.n - 1)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n) * self.step

    @classmethod
    def covering(cls, t_max: float, step: float) -> "GridSpec":
        """Smallest grid from 0 reaching ``t_max`` with spacing at most ``step``."""
        n = max(2, int(math.ceil(t_max / step - 1e-9)) + 1)
        return cls(t_max / (n - 1), n)


@dataclass(frozen=True, eq=False)
class EmbeddingSpectrum:
    """Clipped eigenvalues of the circulant embedding.

    ``eigenvalues`` holds the half spectrum (frequencies ``0..size/2``); the
    full spectrum is symmetric. ``clip_mass`` is the total negative mass
    removed from the full spectrum.
    """

    size: int
    eigenvalues: np.ndarray
    clip_mass: float
    raw_min_ratio: float
    grid: GridSpec
    weights: np.ndarray = field(repr=False)

    @property
    def trace(self) -> float:
        lam = self.eigenvalues
        return float(lam[0] + lam[-1] + 2.0 * lam[1:-1].sum())

    @property
    def clip_fraction(self) -> float:
        return self.clip_mass / self.trace


@dataclass(frozen=True, eq=False)
class PathSample:
    grid: GridSpec
    values: np.ndarray
    seed_info: tuple

    @property
    def times(self) -> np.ndarray:
        return self.grid.times


def _full_weight(lam: np.ndarray) -> np.ndarray:
    # Real synthesis: Y = irfft(w * (a - i b)) has covariance irfft(lam).
    m = 2 * (lam.size - 1)
    w = np.sqrt(2.0 * lam / m) * (m / 2.0)
    w[0] = math.sqrt(lam[0] / m) * m
    w[-1] = math.sqrt(lam[-1] / m) * m
    return w


def build_embedding(model: CovarianceModel, grid: GridSpec,
                    clip_tol: float = DEFAULT_CLIP_TOL,
                    max_doublings: int = 12) -> EmbeddingSpectrum:
    """Embed ``rho(k step)`` into a circulant of power-of-two size ``M``.

    Starts at the smallest power of two ``>= 2(n-1)`` and doubles while the
    smallest eigenvalue is below ``-clip_tol * max``; remaining negatives are
    clipped to zero.
    """
    if not (0 <= clip_tol <= 1e-6):
        raise ValueError(f"clip_tol must lie in [0, 1e-6], got {clip_tol}")
    if not (0 <= max_doublings <= 12):
        raise ValueError(f"max_doublings must lie in [0, 12], got {max_doublings}")
    m = 1 << max(1, (2 * (grid.n - 1) - 1).bit_length())
    worst = None
    for _ in range(max_doublings + 1):
        row = model(np.arange(m // 2 + 1) * grid.step)
        lam = np.fft.rfft(np.concatenate([row, row[-2:0:-1]])).real
        lam_max = lam.max()
        ratio = float(lam.min() / lam_max)
        worst = ratio if worst is None else max(worst, ratio)
        if ratio >= -clip_tol:
            neg = np.minimum(lam, 0.0)
            clip_mass = float(-(neg[0] + neg[-1] + 2.0 * neg[1:-1].sum())) + 0.0
            lam = np.maximum(lam, 0.0)
            return EmbeddingSpectrum(m, lam, clip_mass, ratio, grid, _full_weight(lam))
        m *= 2
    raise EmbeddingFailed(
        f"circulant embedding indefinite after {max_doublings} doublings "
        f"(min/max eigenvalue ratio {worst:.3g})", worst_ratio=worst)


def path_rng(master_seed: int, path_index: int) -> np.random.Generator:
    """Independent stream for one path: spawn key ``(path_index,)`` under the master seed."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(path_index),))
    return np.random.Generator(np.random.PCG64(ss))


def _spectral_draw(spectrum: EmbeddingSpectrum, master_seed: int, indices) -> np.ndarray:
    half = spectrum.eigenvalues.size
    z = np.empty((len(indices), half), dtype=complex)
    for row, idx in enumerate(indices):
        g = path_rng(master_seed, idx).standard_normal(2 * half)
        z[row].real = g[:half]
        z[row].imag = -g[half:]
    z *= spectrum.weights
    return np.fft.irfft(z, n=spectrum.size, axis=1)[:, : spectrum.grid.n]


def sample_path(spectrum: EmbeddingSpectrum, grid: GridSpec, master_seed: int,
                path_index: int) -> PathSample:
    _check_grid(spectrum, grid)
    values = _spectral_draw(spectrum, master_seed, [path_index])[0]
    return PathSample(grid, values, (int(master_seed), int(path_index)))


def sample_batch(spectrum: EmbeddingSpectrum, master_seed: int, start: int,
                 count: int) -> np.ndarray:
    """Paths ``start .. start+count-1`` as rows of a ``(count, n)`` array."""
    return _spectral_draw(spectrum, master_seed, range(start, start + count))


def _check_grid(spectrum, grid):
    if spectrum.grid != grid:
        raise InvalidRange("spectrum was built for a different grid")


def _run_chunk(args):
    fn, spectrum, master_seed, start, count = args
    return fn(sample_batch(spectrum, master_seed, start, count))


def map_paths(fn: Callable[[np.ndarray], object], spectrum: EmbeddingSpectrum,
              master_seed: int, n_paths: int, workers: int = 1,
              chunk: int = CHUNK) -> list:
    """Apply ``fn`` to consecutive fixed-size chunks of paths.

    Returns the per-chunk results in path-index order. With ``workers > 1``
    chunks are farmed out to processes; ``fn`` must then be picklable.
    """
    if n_paths < 1:
        raise InvalidSampleSize(f"n_paths must be positive, got {n_paths}")
    jobs = [(fn, spectrum, master_seed, s, min(chunk, n_paths - s))
            for s in range(0, n_paths, chunk)]
    if workers <= 1 or len(jobs) == 1:
        return [_run_chunk(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_chunk, jobs))


def sample_dense(model: CovarianceModel, grid: GridSpec, master_seed: int,
                 n_paths: int) -> np.ndarray:
    """Cholesky sampler used as a cross-check of the circulant sampler (n <= 1024)."""
    if grid.n > 1024:
        raise InvalidRange("dense sampler is limited to n <= 1024")
    t = grid.times
    cov = model(t[:, None] - t[None, :])
    chol = np.linalg.cholesky(cov + 1e-12 * model.variance * np.eye(grid.n))
    rng = np.random.default_rng(master_seed)
    return rng.standard_normal((n_paths, grid.n)) @ chol.T


@dataclass(frozen=True)
class CovCheck:
    lags: tuple
    mean: tuple
    se: tuple
    target: tuple
    z: tuple

    def fraction_beyond(self, k: float) -> float:
        z = np.abs(np.asarray(self.z))
        return float(np.mean(z > k))


def empirical_cov_check(paths, model: CovarianceModel, lags, step: float | None = None) -> CovCheck:
    """Compare lagged products with ``rho(lag * step)``.

    ``paths`` is a batch of :class:`PathSample` or a 2-d array (then pass
    ``step``). Products are averaged over positions within each path and then
    across paths; the standard error comes from the spread of the per-path
    averages, which are independent. No normalization is applied.
    """
    if isinstance(paths, np.ndarray):
        values = np.atleast_2d(paths)
        if step is None:
            raise ValueError("step is required when paths is an array")
    else:
        paths = list(paths)
        grids = {p.grid for p in paths}
        if len(grids) != 1:
            raise InvalidRange("all paths must share one grid")
        step = grids.pop().step
        values = np.stack([p.values for p in paths])
    n_paths, n = values.shape
    if n_paths < 100:
        raise InvalidSampleSize(f"need at least 100 paths, got {n_paths}")
    means, ses, targets = [], [], []
    for k in lags:
        if not (0 <= k < n):
            raise InvalidRange(f"lag {k} outside 0..{n - 1}")
        per_path = (values[:, : n - k] * values[:, k:]).mean(axis=1)
        means.append(float(per_path.mean()))
        ses.append(float(per_path.std(ddof=1) / math.sqrt(n_paths)))
        targets.append(float(model(k * step)))
    z = [(m - t) / s for m, t, s in zip(means, targets, ses)]
    return CovCheck(tuple(lags), tuple(means), tuple(ses), tuple(targets), tuple(z))


def write_path_dump(path, values: np.ndarray, step: float) -> None:
    """Raw paths as little-endian float64, path-major, behind a 32-byte header."""
    values = np.atleast_2d(np.asarray(values, dtype="<f8"))
    count, n = values.shape
    with open(path, "wb") as fh:
        fh.write(_DUMP_HEADER.pack(DUMP_MAGIC, n, count, float(step)))
        fh.write(np.ascontiguousarray(values).tobytes())


def read_path_dump(path):
    """Return ``(values, step)`` from a file written by :func:`write_path_dump`."""
    with open(path, "rb") as fh:
        magic, n, count, step = _DUMP_HEADER.unpack(fh.read(_DUMP_HEADER.size))
        if magic != DUMP_MAGIC:
            raise ValueError(f"not a path dump (magic {magic!r})")
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != n * count:
        raise ValueError(f"truncated dump: expected {n * count} values, got {data.size}")
    return data.reshape(count, n).astype(float), step
