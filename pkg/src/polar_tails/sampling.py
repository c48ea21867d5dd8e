"""Reproducible Monte Carlo for polar vectors.

Draws are split into fixed-size chunks. Chunk i uses its own counter-based
stream Philox(SeedSequence([seed, i])), so the output depends only on
(model, n, seed) and not on how many worker threads ran the chunks.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats

from .errors import InsufficientDataError
from .polar_exact import PolarModel

CHUNK = 1 << 20
MIN_EXCEEDANCES = 50
THREADS_ENV = "POLAR_TAILS_THREADS"


def stream_rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


@dataclass(frozen=True)
class SampleBatch:
    x: np.ndarray
    y: np.ndarray
    seed: Optional[int]
    model_descriptor: str  # model hash, "" for imported data without a manifest
    angles: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.x.shape != self.y.shape or self.x.ndim != 1:
            raise ValueError("x and y must be 1-d arrays of equal length")

    def __len__(self) -> int:
        return self.x.size

    @property
    def pairs(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    def to_csv(self, path, version: str) -> None:
        from .csvio import write_csv

        write_csv(path, ["x", "y"], zip(self.x, self.y), self.model_descriptor or "-", self.seed, version)

    @classmethod
    def from_csv(cls, path) -> "SampleBatch":
        from .csvio import read_csv

        manifest, header, rows = read_csv(path)
        try:
            ix, iy = header.index("x"), header.index("y")
        except ValueError:
            raise ValueError(f"{path}: expected columns x,y, got {','.join(header)}") from None
        data = np.array([[r[ix], r[iy]] for r in rows], dtype=float).reshape(-1, 2)
        seed = None
        model = ""
        if manifest is not None:
            model = manifest.model_hash
            seed = manifest.seed
        return cls(x=data[:, 0].copy(), y=data[:, 1].copy(), seed=seed, model_descriptor=model)


def _draw_chunk(model: PolarModel, seed: int, index: int, size: int):
    rng = stream_rng(seed, index)
    r = model.radial.sample(rng, size)
    theta = model.angular.sample(rng, size)
    return r, theta


def sample_polar(model: PolarModel, n: int, seed: int, keep_angles: bool = False,
                 threads: Optional[int] = None) -> SampleBatch:
    """n independent copies of (R cos T, rho R cos T + sqrt(1-rho^2) R sin T)."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"sample size must be a positive integer, got {n!r}")
    if not 0 <= int(seed) < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    sizes = [min(CHUNK, n - start) for start in range(0, n, CHUNK)]
    workers = min(len(sizes), threads or worker_count())
    # the tabulated angular CDF is built lazily; build it once before fanning out
    model.angular.cdf(0.0)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda i: _draw_chunk(model, seed, i, sizes[i]), range(len(sizes))))
    else:
        parts = [_draw_chunk(model, seed, i, s) for i, s in enumerate(sizes)]
    r = np.concatenate([p[0] for p in parts])
    theta = np.concatenate([p[1] for p in parts])
    rho = model.rho
    c, s = np.cos(theta), np.sin(theta)
    x = r * c
    y = rho * x + math.sqrt(1.0 - rho * rho) * r * s
    return SampleBatch(x=x, y=y, seed=int(seed), model_descriptor=model.model_hash(),
                       angles=theta if keep_angles else None)


def _exceedances(batch: SampleBatch, u: float):
    mask = batch.x > u
    count = int(mask.sum())
    if count < MIN_EXCEEDANCES:
        raise InsufficientDataError(f"only {count} exceedances of u={u}; need {MIN_EXCEEDANCES}", count)
    return mask


def empirical_survivor(batch: SampleBatch, u: float) -> float:
    return float(np.mean(batch.x > u))


def empirical_conditional_cdf(batch: SampleBatch, u: float, y_grid) -> np.ndarray:
    """Fraction of exceedances X > u with Y <= y, for each y in the grid."""
    mask = _exceedances(batch, u)
    ys = np.sort(batch.y[mask])
    grid = np.asarray(y_grid, dtype=float)
    return np.searchsorted(ys, grid, side="right") / ys.size


@dataclass(frozen=True)
class RescaledExceedances:
    y_part: np.ndarray  # (Y - rho u) sqrt(t) / (u sqrt(1 - rho^2))
    x_part: np.ndarray  # (X - u) w(u)
    u: float
    t: float

    @property
    def count(self) -> int:
        return self.x_part.size


def rescaled_exceedance_stats(batch: SampleBatch, u: float, rho: float, w_at_u: float) -> RescaledExceedances:
    mask = _exceedances(batch, u)
    t = u * w_at_u
    y_part = (batch.y[mask] - rho * u) * math.sqrt(t) / (u * math.sqrt(1 - rho * rho))
    x_part = (batch.x[mask] - u) * w_at_u
    return RescaledExceedances(y_part=y_part, x_part=x_part, u=u, t=t)


def ks_exponential(sample: np.ndarray):
    """KS test against the unit exponential law."""
    return stats.kstest(sample, "expon")


def ks_limit_law(sample: np.ndarray, law):
    """KS test against a symmetric limit law."""
    return stats.kstest(sample, np.vectorize(law.cdf, otypes=[float]))


def dkw_tolerance(n: int, alpha: float = 0.01) -> float:
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))
