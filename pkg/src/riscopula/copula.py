"""Bivariate FGM copula and the joint laws built from it.

C(u, v) = u v (1 + theta (1 - u)(1 - v)),   c(u, v) = 1 + theta (2u - 1)(2v - 1)

Joint densities follow the chain rule f(x, y) = c(F(x), G(y)) f(x) g(y).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize

from . import marginals, moments
from .moments import GammaFit
from .montecarlo import SystemConfig, draw_xy


@dataclass(frozen=True)
class FgmTheta:
    theta: float

    def __post_init__(self):
        if not -1.0 <= self.theta <= 1.0:
            raise ValueError(f"FGM theta must lie in [-1, 1], got {self.theta}")

    def __float__(self):
        return float(self.theta)


def _theta(theta) -> float:
    return float(theta) if isinstance(theta, FgmTheta) else FgmTheta(float(theta)).theta


def _unit(*arrays):
    out = [np.asarray(a, dtype=float) for a in arrays]
    for a in out:
        if np.any((a < 0) | (a > 1)):
            raise ValueError("copula arguments must lie in [0, 1]")
    return out


def fgm_density(u, v, theta):
    u, v = _unit(u, v)
    return 1.0 + _theta(theta) * (2 * u - 1) * (2 * v - 1)


def fgm_cdf(u, v, theta):
    u, v = _unit(u, v)
    return u * v * (1.0 + _theta(theta) * (1 - u) * (1 - v))


def sample_fgm(n: int, theta, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Exact draws from the FGM copula by conditional inversion."""
    th = _theta(theta)
    u = rng.random(n)
    w = rng.random(n)
    a = th * (1 - 2 * u)
    # root in [0, 1] of a v^2 - (1 + a) v + w = 0, rationalized so a = 0 is fine
    v = 2 * w / ((1 + a) + np.sqrt((1 + a) ** 2 - 4 * a * w))
    return u, v


def joint_pdf_xy_onebit(x, y, M: int, theta, scale: float = 1.0):
    """Copula joint density of (X, Y) for one-bit quantization."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("joint_pdf_xy_onebit needs x >= 0")
    fx = marginals.pdf_x(M, x, scale)
    fy = marginals.pdf_y(M, y, scale)
    c = 1.0 + _theta(theta) * (2 * marginals.cdf_x(M, x, scale) - 1) * (2 * marginals.cdf_y(M, y, scale) - 1)
    return c * fx * fy


def joint_pdf_x2y2_gamma(x, y, fit_x: GammaFit, fit_y: GammaFit, theta):
    """Copula joint density of (X^2, Y^2) with moment-matched Gamma margins."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(y < 0):
        raise ValueError("joint_pdf_x2y2_gamma needs x, y >= 0")
    c = 1.0 + _theta(theta) * (2 * fit_x.cdf(x) - 1) * (2 * fit_y.cdf(y) - 1)
    return c * fit_x.pdf(x) * fit_y.pdf(y)


@dataclass(frozen=True)
class ThetaFit:
    theta: FgmTheta
    log_likelihood: float
    n: int
    margins: str


def pseudo_observations(samples: np.ndarray, margin_cdfs=None) -> tuple[np.ndarray, np.ndarray]:
    """Map paired samples to the unit square, analytically or by ranks i/(n+1)."""
    samples = np.asarray(samples, dtype=float)
    if margin_cdfs is None:
        n = len(samples)
        ranks = np.argsort(np.argsort(samples, axis=0), axis=0) + 1
        uv = ranks / (n + 1.0)
        return uv[:, 0], uv[:, 1]
    F, G = margin_cdfs
    return np.asarray(F(samples[:, 0]), float), np.asarray(G(samples[:, 1]), float)


def fgm_log_likelihood(theta: float, u: np.ndarray, v: np.ndarray) -> float:
    return float(np.sum(np.log1p(theta * (2 * u - 1) * (2 * v - 1))))


def fit_theta(samples, margin_cdfs: tuple[Callable, Callable] | None = None) -> ThetaFit:
    """Maximum pseudo-likelihood FGM parameter.

    ``samples`` is an (n, 2) array of pairs.  ``margin_cdfs=(F, G)`` selects
    analytic margins; ``None`` uses empirical ranks.  The log-likelihood is
    concave in theta, so the maximizer is the root of the score on [-1, 1]
    or the boundary the score points to.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != 2:
        raise ValueError("samples must have shape (n, 2)")
    u, v = pseudo_observations(samples, margin_cdfs)
    a = (2 * u - 1) * (2 * v - 1)
    if not np.any(np.abs(a) > 1e-15):
        raise ValueError("degenerate sample: every pseudo-observation pair has zero score")

    def score(t):
        return float(np.sum(a / (1.0 + t * a)))

    # score is strictly decreasing; log1p stays finite strictly inside (-1, 1)
    edge = 1.0 - 1e-12
    if score(edge) >= 0:
        th = 1.0
    elif score(-edge) <= 0:
        th = -1.0
    else:
        th = optimize.brentq(score, -edge, edge, xtol=1e-14)
    ll = fgm_log_likelihood(float(np.clip(th, -edge, edge)), u, v)
    return ThetaFit(FgmTheta(th), ll, len(samples), "rank" if margin_cdfs is None else "analytic")


def fit_theta_simulated(config: SystemConfig, n_samples: int, seed: int, *,
                        squared: bool | None = None, margins: str = "analytic") -> ThetaFit:
    """Fit theta to simulated channel samples.

    One-bit configurations fit (X, Y) against the exact marginals by default;
    otherwise (``squared=True``) (X^2, Y^2) against the moment-matched Gamma
    laws.
    """
    if squared is None:
        squared = config.bits != 1
    x, y = draw_xy(config, n_samples, seed)
    if squared:
        pairs = np.column_stack([x * x, y * y])
        fx = moments.gamma_fit(config.elements, config.bits, "x")
        fy = moments.gamma_fit(config.elements, config.bits, "y")
        cdfs = (fx.cdf, fy.cdf)
    else:
        if config.bits != 1:
            raise ValueError("analytic (X, Y) margins exist only for one-bit quantization")
        pairs = np.column_stack([x, y])
        M, s = config.elements, marginals.PHYSICAL_SCALE
        cdfs = (lambda t: marginals.cdf_x(M, t, s), lambda t: marginals.cdf_y(M, t, s))
    if margins == "rank":
        cdfs = None
    elif margins != "analytic":
        raise ValueError(f"margins must be 'analytic' or 'rank', got {margins!r}")
    return fit_theta(pairs, cdfs)


__all__ = [
    "FgmTheta",
    "ThetaFit",
    "fgm_cdf",
    "fgm_density",
    "fgm_log_likelihood",
    "fit_theta",
    "fit_theta_simulated",
    "joint_pdf_x2y2_gamma",
    "joint_pdf_xy_onebit",
    "pseudo_observations",
    "sample_fgm",
]

