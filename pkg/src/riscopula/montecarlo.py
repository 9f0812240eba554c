"""Monte-Carlo simulation of the RIS cascade channel.

Samples the in-phase and quadrature sums

    X = sum_i |h_i| |g_i| cos(theta_i),   Y = sum_i |h_i| |g_i| sin(theta_i)

with unit-power Rayleigh envelopes (density 2x exp(-x^2)) and residual phase
errors uniform on [-pi/L, pi/L].  Work is split into fixed-size chunks, each
with its own child seed spawned from the run seed, so the result depends only
on ``(config, n_samples, seed)`` and not on how many threads evaluated it.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

CHUNK = 1 << 16
THREADS_ENV = "RIS_COPULA_THREADS"


@dataclass(frozen=True)
class SystemConfig:
    """RIS link parameters, all linear (no dB).

    ``bits=None`` models continuous phase control (zero residual phase error).
    """

    elements: int
    bits: int | None = 1
    transmit_snr: float = 1.0
    path_loss: float = 1.0
    threshold: float = 1.0

    def __post_init__(self):
        if self.elements < 1:
            raise ValueError(f"elements must be >= 1, got {self.elements}")
        if self.bits is not None and self.bits < 1:
            raise ValueError(f"bits must be >= 1 or None, got {self.bits}")
        if not (self.transmit_snr > 0 and self.path_loss > 0):
            raise ValueError("transmit_snr and path_loss must be positive")
        if not self.threshold >= 0:
            raise ValueError("threshold must be nonnegative")

    @property
    def levels(self) -> float:
        """Number of phase levels L = 2^b (infinite for continuous phase)."""
        return math.inf if self.bits is None else float(2 ** self.bits)

    @property
    def rho(self) -> float:
        return self.path_loss * self.transmit_snr

    @property
    def rho_t(self) -> float:
        """Normalized threshold gamma_th / rho on the gain X^2 + Y^2."""
        return self.threshold / self.rho


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    n_samples: int
    seed: int

    def summary(self) -> str:
        return (f"seed: {self.seed}\nn: {self.n_samples}\n"
                f"value: {self.value!r}\nstd_error: {self.std_error!r}\n")


class RawMoments(NamedTuple):
    x2: McEstimate
    x4: McEstimate
    y2: McEstimate
    y4: McEstimate


def _threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def rayleigh(rng: np.random.Generator, shape) -> np.ndarray:
    """Unit-power Rayleigh envelopes by inversion, x = sqrt(-ln u)."""
    return np.sqrt(-np.log1p(-rng.random(shape)))


def sample_xy(config: SystemConfig, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``n`` independent (X, Y) pairs for ``config``."""
    M = config.elements
    z = rayleigh(rng, (n, M)) * rayleigh(rng, (n, M))
    u = rng.random((n, M))
    if config.bits is None:
        return z.sum(axis=1), np.zeros(n)
    theta = (2.0 * u - 1.0) * (math.pi / config.levels)
    return (z * np.cos(theta)).sum(axis=1), (z * np.sin(theta)).sum(axis=1)


def _chunk_sizes(n: int) -> list[int]:
    full, rest = divmod(n, CHUNK)
    return [CHUNK] * full + ([rest] if rest else [])


def map_chunks(config: SystemConfig, n: int, seed: int,
               fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> list:
    """Apply ``fn(X, Y)`` to each chunk of a seeded run, results in chunk order."""
    sizes = _chunk_sizes(n)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))

    def work(i):
        rng = np.random.Generator(np.random.PCG64(seeds[i]))
        return fn(*sample_xy(config, sizes[i], rng))

    workers = _threads()
    if workers == 1 or len(sizes) == 1:
        return [work(i) for i in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(work, range(len(sizes))))


def draw_xy(config: SystemConfig, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """All ``n`` samples of a seeded run, concatenated in chunk order."""
    parts = map_chunks(config, n, seed, lambda x, y: (x, y))
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def _mean_estimates(sums: np.ndarray, sqsums: np.ndarray, n: int, seed: int) -> list[McEstimate]:
    mean = sums / n
    var = np.maximum(sqsums / n - mean**2, 0.0) * n / max(n - 1, 1)
    return [McEstimate(float(m), float(math.sqrt(v / n)), n, seed) for m, v in zip(mean, var)]


def estimate_outage_curve(config: SystemConfig, rho_t: Sequence[float], n_samples: int,
                          seed: int) -> list[McEstimate]:
    """Outage estimates at several normalized thresholds from one sample set.

    All thresholds share the same draws (common random numbers), so the
    estimates are monotone in ``rho_t``.
    """
    thresholds = np.asarray(rho_t, dtype=float)

    def count(x, y):
        gain = x * x + y * y
        return np.count_nonzero(gain[:, None] <= thresholds[None, :], axis=0)

    hits = np.sum(map_chunks(config, n_samples, seed, count), axis=0)
    p = hits / n_samples
    return [McEstimate(float(v), float(math.sqrt(v * (1 - v) / (n_samples - 1))), n_samples, seed)
            for v in p]


def estimate_outage(config: SystemConfig, n_samples: int, seed: int) -> McEstimate:
    """Fraction of draws with X^2 + Y^2 <= rho_t, with its standard error."""
    if n_samples < 10_000:
        raise ValueError("n_samples must be at least 1e4")
    return estimate_outage_curve(config, [config.rho_t], n_samples, seed)[0]


def estimate_moments(config: SystemConfig, n_samples: int, seed: int) -> RawMoments:
    """Raw moments E[X^2], E[X^4], E[Y^2], E[Y^4]."""

    def sums(x, y):
        p = np.stack([x**2, x**4, y**2, y**4])
        return np.stack([p.sum(axis=1), (p * p).sum(axis=1)])

    total = np.sum(map_chunks(config, n_samples, seed, sums), axis=0)
    return RawMoments(*_mean_estimates(total[0], total[1], n_samples, seed))


def ks_distance(samples: Sequence[float], cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Kolmogorov-Smirnov sup distance between sorted ``samples`` and ``cdf``."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("ks_distance needs at least one sample")
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def gain_quantile(config: SystemConfig, q: float, n_samples: int, seed: int) -> float:
    """Empirical q-quantile of the cascade gain X^2 + Y^2."""
    x, y = draw_xy(config, n_samples, seed)
    return float(np.quantile(x * x + y * y, q))

