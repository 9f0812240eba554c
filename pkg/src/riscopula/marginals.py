"""Marginal laws of X and Y for one-bit phase quantization.

With phase errors uniform on [-pi/2, pi/2] each element contributes an
exponential in-phase term and a Laplace quadrature term, so that

* X is Gamma(M) distributed, and
* Y is the M-fold convolution of Laplace laws, a symmetric mixture of Gamma
  laws of |Y|:  f_Y(y) = sum_k w_k g_{M-k}(|y|),  w_k = C(M-1+k, k) / 2^(M+k),

where g_n is the Gamma(n, 1) density.  The weights sum to 1/2 (one half for
each sign of Y).  Every function takes a ``scale``; at ``scale=1`` the element
laws are Exp(1) and Laplace(1).  Unit-power Rayleigh hops give element terms
with mean 1/2, hence :data:`PHYSICAL_SCALE`.
"""

from __future__ import annotations

import functools
import math

import numpy as np
from scipy import special

PHYSICAL_SCALE = 0.5
_EXACT_LIMIT = 32


@functools.lru_cache(maxsize=None)
def laplace_sum_weights(M: int) -> np.ndarray:
    """Mixture weights ``w_k``, k = 0..M-1, of the Gamma(M-k) components of |Y|."""
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    k = np.arange(M)
    if M <= _EXACT_LIMIT:
        w = np.array([math.comb(M - 1 + j, j) / 2 ** (M + j) for j in range(M)], dtype=float)
    else:
        w = np.exp(special.gammaln(M + k) - special.gammaln(k + 1) - special.gammaln(M)
                   - (M + k) * math.log(2.0))
    w.flags.writeable = False
    return w


def bessel_coefficients(M: int) -> list[int]:
    """Integer coefficients (M-1+k)! / (2^k k! (M-1-k)!) of the Bessel-polynomial form.

    f_Y(y) = exp(-|y|) / (2^M (M-1)!) * sum_k coef_k |y|^(M-1-k)
    """
    out = []
    for k in range(M):
        num = math.factorial(M - 1 + k)
        den = 2**k * math.factorial(k) * math.factorial(M - 1 - k)
        out.append(num // den if num % den == 0 else num / den)
    return out


def _check_M(M):
    if int(M) != M or M < 1:
        raise ValueError(f"M must be a positive integer, got {M}")


def pdf_x(M: int, x, scale: float = 1.0):
    """Gamma(M, scale) density of X."""
    _check_M(M)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("pdf_x is defined for x >= 0")
    u = x / scale
    with np.errstate(divide="ignore", invalid="ignore"):
        logp = (M - 1) * np.log(u) - u - special.gammaln(M)
    out = np.exp(logp) / scale
    if M == 1:
        out = np.exp(-u) / scale
    return out[()] if out.ndim == 0 else out


def cdf_x(M: int, x, scale: float = 1.0):
    """F_X(x) = 1 - Gamma(M, x/scale) / Gamma(M)."""
    _check_M(M)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("cdf_x is defined for x >= 0")
    out = special.gammainc(M, x / scale)
    return out[()] if out.ndim == 0 else out


def pdf_y(M: int, y, scale: float = 1.0):
    """Density of Y, symmetric about zero."""
    _check_M(M)
    a = np.abs(np.asarray(y, dtype=float)) / scale
    w = laplace_sum_weights(M)
    shapes = M - np.arange(M)
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = ((shapes - 1)[:, None] * np.log(a.ravel())[None, :] - a.ravel()[None, :]
                - special.gammaln(shapes)[:, None])
    logs = np.where((shapes == 1)[:, None], -a.ravel()[None, :], logs)
    out = (w[:, None] * np.exp(logs)).sum(axis=0).reshape(a.shape) / scale
    return out[()] if out.ndim == 0 else out


def cdf_y(M: int, y, scale: float = 1.0):
    """F_Y(y); for y >= 0, 1 - sum_k w_k Q(M-k, y/scale), and F_Y(-y) = 1 - F_Y(y)."""
    _check_M(M)
    y = np.asarray(y, dtype=float)
    a = np.abs(y).ravel() / scale
    w = laplace_sum_weights(M)
    shapes = M - np.arange(M)
    tail = (w[:, None] * special.gammaincc(shapes[:, None], a[None, :])).sum(axis=0)
    tail = tail.reshape(y.shape)
    out = np.where(y >= 0, 1.0 - tail, tail)
    return out[()] if out.ndim == 0 else out


def half_mass_y(M: int, a, scale: float = 1.0):
    """P(|Y| <= a) = 2 F_Y(a) - 1, computed without cancellation for small a."""
    _check_M(M)
    a = np.asarray(a, dtype=float)
    u = np.maximum(a, 0.0).ravel() / scale
    w = laplace_sum_weights(M)
    shapes = M - np.arange(M)
    out = 2.0 * (w[:, None] * special.gammainc(shapes[:, None], u[None, :])).sum(axis=0)
    out = out.reshape(a.shape)
    return out[()] if out.ndim == 0 else out
