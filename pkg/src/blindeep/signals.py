"""Filtered white-noise observations and their sample covariance."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .filters import FilterMatrix


@dataclass(frozen=True, eq=False)
class SignalBatch:
    samples: np.ndarray  # (m, n): one observed signal per row
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        y = np.asarray(self.samples, dtype=float)
        if y.ndim != 2 or y.shape[0] < 1:
            raise ValueError(f"samples must be a nonempty (m, n) array, got {y.shape}")
        object.__setattr__(self, "samples", y)

    @property
    def m(self) -> int:
        return self.samples.shape[0]

    @property
    def n(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True, eq=False)
class CovarianceEstimate:
    matrix: np.ndarray
    m: int


def draw_excitations(rng: np.random.Generator, m: int, n: int) -> np.ndarray:
    """White excitations with identity covariance, one per row."""
    return rng.standard_normal((m, n))


def sample_observations(fm: FilterMatrix, m: int, noise_var: float = 0.01,
                        seed=None) -> SignalBatch:
    """Draw ``m`` observations y = H x + w.

    x ~ N(0, I) and w ~ N(0, noise_var I) come from one generator seeded by
    ``seed``, excitations first; the batch is reproducible bit for bit.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if noise_var < 0:
        raise ValueError("noise_var must be nonnegative")
    rng = np.random.default_rng(seed)
    x = draw_excitations(rng, m, fm.n)
    y = x @ fm.matrix.T
    if noise_var > 0:
        y += np.sqrt(noise_var) * rng.standard_normal((m, fm.n))
    meta = {"filter": fm.filter.to_spec(), "noise_var": float(noise_var)}
    if isinstance(seed, (int, np.integer)):
        meta["seed"] = int(seed)
    return SignalBatch(y, meta)


def sample_covariance(b: SignalBatch) -> CovarianceEstimate:
    """Uncentered average of outer products (1/m) sum_l y_l y_l^T."""
    y = b.samples
    cov = (y.T @ y) / b.m
    return CovarianceEstimate(0.5 * (cov + cov.T), b.m)
