"""Second and fourth moments of X and Y under b-bit phase quantization.

Element terms are d_i = z_i cos(theta_i) (axis "x") or z_i sin(theta_i)
(axis "y") with z_i = |h_i||g_i| the product of two unit-power Rayleigh
envelopes, so E[z] = pi/4, E[z^2] = 1, E[z^3] = 9 pi/16, E[z^4] = 4, and
theta_i uniform on [-pi/L, pi/L].  ``sinc(x) = sin(x)/x`` throughout.

``L = math.inf`` stands for continuous phase control; it is handled by
branching rather than by plugging a large L into the trigonometric forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

CONTINUOUS = math.inf

_EZ = (1.0, math.pi / 4, 1.0, 9 * math.pi / 16, 4.0)


class DegenerateFitError(ValueError):
    """Raised when E[Z^4] <= E[Z^2]^2 so no Gamma law matches the moments."""


def sinc(x: float) -> float:
    return 1.0 if x == 0 else math.sin(x) / x


def _check(M, L, axis):
    if int(M) != M or M < 1:
        raise ValueError(f"M must be a positive integer, got {M}")
    if not (L == CONTINUOUS or (L >= 2 and float(L).is_integer())):
        raise ValueError(f"L must be an integer >= 2 or CONTINUOUS, got {L}")
    if axis not in ("x", "y"):
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")


def trig_moments(L: float, axis: str) -> tuple[float, float, float, float, float]:
    """E[cos^k theta] (axis x) or E[sin^k theta] (axis y), k = 0..4."""
    if L == CONTINUOUS:
        return (1.0, 1.0, 1.0, 1.0, 1.0) if axis == "x" else (1.0, 0.0, 0.0, 0.0, 0.0)
    w = math.pi / L
    s1, s2, s3, s4 = sinc(w), sinc(2 * w), sinc(3 * w), sinc(4 * w)
    if axis == "x":
        return 1.0, s1, 0.5 + 0.5 * s2, (3 * s1 + s3) / 4, (3 + 4 * s2 + s4) / 8
    return 1.0, 0.0, 0.5 - 0.5 * s2, 0.0, (3 - 4 * s2 + s4) / 8


def element_moments(L: float, axis: str) -> tuple[float, ...]:
    """Raw moments E[d^k], k = 0..4, of one element term."""
    return tuple(ez * c for ez, c in zip(_EZ, trig_moments(L, axis)))


def mean_square(M: int, L: float, axis: str) -> float:
    """E[X^2] = M(1/2 + sinc(2pi/L)/2 + (M-1) L^2 sin^2(pi/L)/16); E[Y^2] = M(1 - sinc(2pi/L))/2."""
    _check(M, L, axis)
    if L == CONTINUOUS:
        return M * (1.0 + (M - 1) * math.pi**2 / 16) if axis == "x" else 0.0
    if axis == "x":
        return M * (0.5 + 0.5 * sinc(2 * math.pi / L)
                    + (M - 1) * L**2 / 16 * math.sin(math.pi / L) ** 2)
    return M * (0.5 - 0.5 * sinc(2 * math.pi / L))


def _square_sum_term(M, L, axis):
    # E[(sum d_i^2)^2]
    w = 2 * math.pi / L
    A = 4 * math.pi * (3 + M) * L * math.sin(w)
    B = L**2 * (M - 1) * math.sin(w) ** 2 + 2 * math.pi * (2 * (5 + M) * math.pi + L * math.sin(2 * w))
    return M / (16 * math.pi**2) * (A + B if axis == "x" else B - A)


def _legacy_cross_terms(M, L, axis):
    """Older closed form of the cross and pair-square terms (wrong for M >= 2)."""
    sp, cp = math.sin(math.pi / L), math.cos(math.pi / L)
    if axis == "y":
        return 0.0, M**2 * (L * math.sin(2 * math.pi / L) - 2 * math.pi) ** 2 / (16 * math.pi**2)
    cross = (M * (M - 1) * L**2 * sp**2 / (64 * math.pi)
             * ((11 + 4 * M) * math.pi + 3 * math.pi * math.cos(2 * math.pi / L)
                + 2 * L * (M - 1) * math.sin(2 * math.pi / L)))
    pairs = M * (M - 1) / (256 * math.pi**2) * (
        8 * L**2 * (M - 1) * math.pi**2 * sp**2 + 8 * math.pi * L**3 * (M - 1) * sp**3 * cp
        + L**4 * (6 - 5 * M + M**2) * math.pi**2 * sp**4
        + 16 * (2 * math.pi + L * math.sin(2 * math.pi / L)) ** 2)
    return cross, pairs


def _derived_cross_terms(M, L, axis):
    _, m1, m2, m3, _ = element_moments(L, axis)
    cross = 4 * M * (M - 1) * m3 * m1 + 2 * M * (M - 1) * (M - 2) * m2 * m1**2
    pairs = (2 * M * (M - 1) * m2**2 + 4 * M * (M - 1) * (M - 2) * m2 * m1**2
             + M * (M - 1) * (M - 2) * (M - 3) * m1**4)
    return cross, pairs


def fourth_moment(M: int, L: float, axis: str, form: str = "derived") -> float:
    """E[Z^4] as the sum of the square-sum, cross and pair-square terms.

    ``form="legacy"`` swaps in an older closed form of the cross and pair
    terms; it fails Monte-Carlo checks for M >= 2 and exists only so the
    discrepancy stays testable.
    """
    _check(M, L, axis)
    if L == CONTINUOUS:
        if axis == "y":
            return 0.0
        m = element_moments(L, axis)
        return (M * m[4] + 4 * M * (M - 1) * m[3] * m[1] + 3 * M * (M - 1) * m[2] ** 2
                + 6 * M * (M - 1) * (M - 2) * m[2] * m[1] ** 2
                + M * (M - 1) * (M - 2) * (M - 3) * m[1] ** 4)
    if form == "derived":
        cross, pairs = _derived_cross_terms(M, L, axis)
    elif form == "legacy":
        cross, pairs = _legacy_cross_terms(M, L, axis)
    else:
        raise ValueError(f"unknown form {form!r}")
    return _square_sum_term(M, L, axis) + cross + pairs


@dataclass(frozen=True)
class GammaFit:
    """Gamma law matched to the first two moments of X^2 or Y^2."""

    shape: float
    scale: float
    axis: str
    M: int
    bits: int | None

    @property
    def mean(self) -> float:
        return self.shape * self.scale

    @property
    def variance(self) -> float:
        return self.shape * self.scale**2

    def pdf(self, x):
        return stats.gamma.pdf(x, self.shape, scale=self.scale)

    def cdf(self, x):
        return special.gammainc(self.shape, np.asarray(x, dtype=float) / self.scale)

    def sf(self, x):
        return special.gammaincc(self.shape, np.asarray(x, dtype=float) / self.scale)

    def logpdf(self, x):
        return stats.gamma.logpdf(x, self.shape, scale=self.scale)


def gamma_fit(M: int, bits: int | None, axis: str) -> GammaFit:
    """Moment-matched Gamma law for X^2 (axis "x") or Y^2 (axis "y").

    ``bits=None`` means continuous phase.
    """
    L = CONTINUOUS if bits is None else 2.0**bits
    e2 = mean_square(M, L, axis)
    e4 = fourth_moment(M, L, axis)
    var = e4 - e2 * e2
    if not var > 1e-14 * max(e4, 1e-300) or e2 <= 0:
        raise DegenerateFitError(f"no Gamma fit for M={M}, bits={bits}, axis={axis}: var={var}")
    shape = e2 * e2 / var
    return GammaFit(shape=shape, scale=var / e2, axis=axis, M=M, bits=bits)
