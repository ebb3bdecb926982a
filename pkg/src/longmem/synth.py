"""Synthetic ground-truth generators for validating the Hurst estimators.

Fractional Gaussian noise comes from circulant embedding of the target
autocovariance (exact in distribution when the embedding is non-negative
definite), with a sequential conditional-Gaussian construction as fallback.
All draws go through numpy's seeded PCG64 generator so batches replay
exactly; parallel batches should derive seeds as base_seed + index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "GENERATOR_ID",
    "FgnSpec",
    "fgn_autocovariance",
    "generate_fgn",
    "generate_gaussian",
    "powerlaw_fixture",
    "batch_seeds",
]

GENERATOR_ID = "numpy.random.Generator(PCG64)"

# Embedding eigenvalues above -EIG_TOL * max(eig) are rounding noise and get
# clamped to zero; anything more negative rejects the circulant path.
EIG_TOL = 1e-9


@dataclass(frozen=True)
class FgnSpec:
    """Parameters of one fractional Gaussian noise realization."""

    h: float
    n: int
    sigma: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.h < 1.0:
            raise ValueError(f"hurst exponent must lie strictly in (0, 1), got {self.h}")
        if self.n < 2:
            raise ValueError("need n >= 2")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


def fgn_autocovariance(h: float, lags: Sequence[int], sigma: float = 1.0) -> np.ndarray:
    """Target autocovariance gamma(k) = sigma^2/2 (|k+1|^2H - 2|k|^2H + |k-1|^2H)."""
    k = np.asarray(lags, dtype=float)
    two_h = 2.0 * h
    return 0.5 * sigma**2 * (
        np.abs(k + 1) ** two_h - 2.0 * np.abs(k) ** two_h + np.abs(k - 1) ** two_h
    )


def _generate_circulant(spec: FgnSpec) -> np.ndarray:
    n = spec.n
    gamma = fgn_autocovariance(spec.h, np.arange(n + 1), spec.sigma)
    # first row of the 2n circulant: gamma(0..n) then mirrored gamma(n-1..1)
    row = np.concatenate([gamma, gamma[n - 1 : 0 : -1]])
    eig = np.fft.fft(row).real
    floor = -EIG_TOL * eig.max()
    if eig.min() < floor:
        raise ValueError(
            f"circulant embedding not non-negative definite "
            f"(min eigenvalue {eig.min():.3e})"
        )
    eig = np.where(eig < 0, 0.0, eig)

    rng = np.random.default_rng(spec.seed)
    ends = rng.standard_normal(2)
    pairs = rng.standard_normal((n - 1, 2))
    z = np.zeros(2 * n, dtype=complex)
    z[0] = ends[0]
    z[n] = ends[1]
    z[1:n] = (pairs[:, 0] + 1j * pairs[:, 1]) / math.sqrt(2.0)
    z[n + 1 :] = np.conj(z[1:n][::-1])
    return np.sqrt(2 * n) * np.fft.ifft(np.sqrt(eig) * z).real[:n]


def _generate_conditional(spec: FgnSpec) -> np.ndarray:
    """Sequential conditional-Gaussian sampling via the Durbin-Levinson
    recursion on the target autocovariance. O(n^2) but embedding-free."""
    n = spec.n
    gamma = fgn_autocovariance(spec.h, np.arange(n), spec.sigma)
    rng = np.random.default_rng(spec.seed)
    noise = rng.standard_normal(n)

    x = np.empty(n)
    x[0] = math.sqrt(gamma[0]) * noise[0]
    phi = np.zeros(n - 1)
    v = gamma[0]
    for t in range(1, n):
        if t == 1:
            kappa = gamma[1] / gamma[0]
        else:
            kappa = (gamma[t] - phi[: t - 1] @ gamma[t - 1 : 0 : -1]) / v
        prev = phi[: t - 1][::-1].copy()
        phi[: t - 1] -= kappa * prev
        phi[t - 1] = kappa
        v *= 1.0 - kappa * kappa
        if v <= 0:  # numerically pinned; fGn is purely non-deterministic
            v = np.finfo(float).tiny
        mean = phi[:t] @ x[t - 1 :: -1][:t]
        x[t] = mean + math.sqrt(v) * noise[t]
    return x


def generate_fgn(spec: FgnSpec, method: str = "auto") -> np.ndarray:
    """Stationary Gaussian sequence with the fGn autocovariance for spec.h.

    ``method``: "circulant" or "conditional" force one construction; "auto"
    tries the circulant embedding and falls back to the conditional path when
    the embedding has materially negative eigenvalues.
    """
    if method == "circulant":
        return _generate_circulant(spec)
    if method == "conditional":
        return _generate_conditional(spec)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    try:
        return _generate_circulant(spec)
    except ValueError:
        return _generate_conditional(spec)


def generate_gaussian(n: int, sigma: float = 1.0, seed: int = 0) -> np.ndarray:
    """I.i.d. normal draws, deterministic given the seed."""
    if n < 1:
        raise ValueError("need n >= 1")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return np.random.default_rng(seed).standard_normal(n) * sigma


def powerlaw_fixture(h: float, sizes: Iterable[int]) -> list[tuple[int, float]]:
    """Exact power-law points (m, m^h) for exercising the log-log regression."""
    return [(int(m), float(m) ** h) for m in sizes]


def batch_seeds(base_seed: int, count: int) -> list[int]:
    """Disjoint seeds for a batch: base_seed + 0, 1, ..., count-1."""
    return [base_seed + i for i in range(count)]
