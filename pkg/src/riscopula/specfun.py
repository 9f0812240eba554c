"""Special functions: complex log-gamma, incomplete gamma and Fox H-functions.

The univariate and bivariate Fox H-functions are evaluated by direct numerical
quadrature of their Mellin-Barnes integrals along vertical lines in the complex
plane.  Every gamma product is accumulated in the log domain; the complex phase
carries the sign, so nothing overflows before the final exponentiation.

Conventions
-----------
Univariate, with ``upper = [(a_j, A_j)]`` (length p) and ``lower = [(b_j, B_j)]``
(length q)::

    H^{m,n}_{p,q}[z] = 1/(2 pi i) \\int  K(s) z^{-s} ds

    K(s) = prod_{j<m} G(b_j + B_j s) prod_{j<n} G(1 - a_j - A_j s)
           / prod_{j>=m} G(1 - b_j - B_j s) prod_{j>=n} G(a_j + A_j s)

so that ``H^{1,0}_{0,1}[z | -; (0, 1)] = exp(-z)``.  The bivariate function
multiplies two such kernels (in ``s`` and ``t``) with a joint kernel whose
gamma arguments are linear in both variables::

    J(s, t) = prod_{j<n1} G(1 - a_j - alpha_j s - A_j t)
              / prod_{j>=n1} G(a_j + alpha_j s + A_j t)
              / prod_j G(1 - b_j - beta_j s - B_j t)

and integrates ``J(s,t) K1(s) K2(t) x^{-s} y^{-t}`` over two vertical lines.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy import special

__all__ = [
    "ContourError",
    "ConvergenceError",
    "ContourSettings",
    "FoxHBivariateParams",
    "FoxHUnivariateParams",
    "FoxHValue",
    "PoleError",
    "fox_h_bivariate",
    "fox_h_univariate",
    "ln_gamma_complex",
    "meijer_g",
    "upper_incomplete_gamma",
]


class PoleError(ValueError):
    """Raised when a gamma function is evaluated at one of its poles."""


class ContourError(ValueError):
    """Raised when an integration line does not separate the pole families."""


class ConvergenceError(ArithmeticError):
    """Raised when contour quadrature fails its self-convergence test."""


# ---------------------------------------------------------------------------
# Log-gamma
# ---------------------------------------------------------------------------

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_POLE_TOL = 1e-14


def _pole_mask(z: np.ndarray) -> np.ndarray:
    near_int = np.abs(z.real - np.round(z.real)) <= _POLE_TOL * np.maximum(1.0, np.abs(z.real))
    return (z.real < 0.5) & near_int & (np.abs(z.imag) <= _POLE_TOL)


def _ln_gamma_unchecked(z: np.ndarray) -> np.ndarray:
    # Shift into Re >= 0.5 and undo with principal logs: the result is the
    # analytic continuation of the real log-gamma, cut along the negative axis.
    shift = np.maximum(np.ceil(0.5 - z.real), 0.0)
    w = z + shift
    x = w - 1.0
    acc = np.full(x.shape, _LANCZOS_COEF[0], dtype=complex)
    for k in range(1, len(_LANCZOS_COEF)):
        acc = acc + _LANCZOS_COEF[k] / (x + k)
    t = x + _LANCZOS_G + 0.5
    out = _HALF_LOG_2PI + (x + 0.5) * np.log(t) - t + np.log(acc)
    kmax = int(shift.max()) if shift.size else 0
    for k in range(kmax):
        active = shift > k
        out = out - np.where(active, np.log(np.where(active, z + k, 1.0)), 0.0)
    return out


def ln_gamma_complex(z):
    """Principal-branch ``log Gamma(z)`` for complex ``z``.

    Accepts scalars or arrays.  The branch is the analytic continuation of the
    real log-gamma from the positive axis, with the cut on the negative real
    axis (the same convention as :func:`scipy.special.loggamma`).

    Raises
    ------
    PoleError
        If any ``z`` is a nonpositive integer.
    """
    arr = np.asarray(z, dtype=complex)
    if np.any(_pole_mask(arr)):
        raise PoleError(f"log-gamma pole at {arr[_pole_mask(arr)].ravel()[0]}")
    out = _ln_gamma_unchecked(np.atleast_1d(arr)).reshape(arr.shape)
    return complex(out) if np.ndim(z) == 0 else out


def _ln_rgamma(z: np.ndarray) -> np.ndarray:
    """``-log Gamma(z)``, returning ``-inf`` at the poles (1/Gamma is entire)."""
    poles = _pole_mask(z)
    safe = np.where(poles, 1.0, z)
    out = -_ln_gamma_unchecked(safe)
    return np.where(poles, -np.inf, out)


def upper_incomplete_gamma(a: float, x: float) -> float:
    """Non-regularized upper incomplete gamma ``Gamma(a, x)``.

    Raises ``ValueError`` for ``a <= 0`` or ``x < 0``.
    """
    if not a > 0:
        raise ValueError(f"upper_incomplete_gamma needs a > 0, got {a}")
    if not x >= 0:
        raise ValueError(f"upper_incomplete_gamma needs x >= 0, got {x}")
    return float(special.gammaincc(a, x) * special.gamma(a))


# ---------------------------------------------------------------------------
# Parameter containers
# ---------------------------------------------------------------------------

def _pairs(seq) -> tuple[tuple[float, float], ...]:
    return tuple((float(a), float(b)) for a, b in seq)


@dataclass(frozen=True)
class FoxHUnivariateParams:
    """Parameters of ``H^{m,n}_{p,q}``; ``upper`` holds (a, A), ``lower`` (b, B)."""

    upper: tuple[tuple[float, float], ...]
    lower: tuple[tuple[float, float], ...]
    m: int
    n: int

    def __post_init__(self):
        object.__setattr__(self, "upper", _pairs(self.upper))
        object.__setattr__(self, "lower", _pairs(self.lower))
        p, q = len(self.upper), len(self.lower)
        if not (0 <= self.m <= q and 0 <= self.n <= p):
            raise ValueError(f"need 0<=m<=q, 0<=n<=p; got m={self.m}, n={self.n}, p={p}, q={q}")
        for _, coef in self.upper + self.lower:
            if not coef > 0:
                raise ValueError(f"Fox-H coefficients must be positive, got {coef}")

    def strip(self) -> tuple[float, float]:
        """Open interval of Re(s) separating left poles from right poles."""
        lo = max((-b / B for b, B in self.lower[: self.m]), default=-math.inf)
        hi = min(((1.0 - a) / A for a, A in self.upper[: self.n]), default=math.inf)
        return lo, hi

    def log_kernel(self, s: np.ndarray) -> np.ndarray:
        out = np.zeros(s.shape, dtype=complex)
        for j, (b, B) in enumerate(self.lower):
            if j < self.m:
                out += _ln_gamma_unchecked(b + B * s)
            else:
                out += _ln_rgamma(1.0 - b - B * s)
        for j, (a, A) in enumerate(self.upper):
            if j < self.n:
                out += _ln_gamma_unchecked(1.0 - a - A * s)
            else:
                out += _ln_rgamma(a + A * s)
        return out

    def pole_distance(self, c: float) -> float:
        """Horizontal distance from Re(s)=c to the nearest numerator pole."""
        lo, hi = self.strip()
        return min(c - lo, hi - c)


@dataclass(frozen=True)
class FoxHBivariateParams:
    """Bivariate Fox H parameters.

    ``joint_upper`` entries are (a, alpha, A); the first ``joint_n`` of them are
    numerator factors ``Gamma(1 - a - alpha s - A t)``, the rest denominator
    factors ``Gamma(a + alpha s + A t)``.  ``joint_lower`` entries (b, beta, B)
    are denominator factors ``Gamma(1 - b - beta s - B t)``.  ``var1`` and
    ``var2`` are the per-variable kernels in ``s`` and ``t``.
    """

    joint_upper: tuple[tuple[float, float, float], ...]
    joint_lower: tuple[tuple[float, float, float], ...]
    joint_n: int
    var1: FoxHUnivariateParams
    var2: FoxHUnivariateParams

    def __post_init__(self):
        ju = tuple((float(a), float(c1), float(c2)) for a, c1, c2 in self.joint_upper)
        jl = tuple((float(a), float(c1), float(c2)) for a, c1, c2 in self.joint_lower)
        object.__setattr__(self, "joint_upper", ju)
        object.__setattr__(self, "joint_lower", jl)
        if not 0 <= self.joint_n <= len(ju):
            raise ValueError(f"joint_n={self.joint_n} out of range for {len(ju)} upper entries")
        for _, c1, c2 in ju + jl:
            if c1 < 0 or c2 < 0 or c1 + c2 <= 0:
                raise ValueError(f"joint coefficients must be >= 0 with positive sum, got {(c1, c2)}")

    def joint_constraints(self) -> list[tuple[float, float, float]]:
        """Rows (alpha, A, bound) meaning alpha*Re(s) + A*Re(t) < bound."""
        return [(c1, c2, 1.0 - a) for a, c1, c2 in self.joint_upper[: self.joint_n]]

    def log_joint(self, s: np.ndarray, t: np.ndarray) -> np.ndarray:
        out = np.zeros(np.broadcast(s, t).shape, dtype=complex)
        for j, (a, c1, c2) in enumerate(self.joint_upper):
            if j < self.joint_n:
                out = out + _ln_gamma_unchecked(1.0 - a - c1 * s - c2 * t)
            else:
                out = out + _ln_rgamma(a + c1 * s + c2 * t)
        for b, c1, c2 in self.joint_lower:
            out = out + _ln_rgamma(1.0 - b - c1 * s - c2 * t)
        return out


@dataclass(frozen=True)
class ContourSettings:
    """Integration-line placement and quadrature resolution.

    ``anchor1``/``anchor2`` of ``None`` select the default (middle of the
    pole-free strip).  ``nodes`` counts Gauss-Legendre points per axis on
    ``[-half_height, half_height]``.
    """

    anchor1: float | None = None
    anchor2: float | None = None
    half_height: float = 60.0
    nodes: int = 512
    tolerance: float = 1e-8
    max_doublings: int = 3

    def __post_init__(self):
        if not self.half_height > 0:
            raise ValueError("half_height must be positive")
        if self.nodes < 64:
            raise ValueError("nodes must be at least 64")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")

    def doubled(self) -> "ContourSettings":
        return replace(self, half_height=2 * self.half_height, nodes=2 * self.nodes)


@dataclass(frozen=True)
class FoxHValue:
    """Value of a Mellin-Barnes evaluation with its self-convergence residual."""

    value: float
    err_estimate: float
    contour: ContourSettings = field(repr=False)

    def __float__(self):
        return self.value


# ---------------------------------------------------------------------------
# Quadrature along a vertical line
# ---------------------------------------------------------------------------

_MIN_PANEL_ORDER = 8


@functools.lru_cache(maxsize=64)
def _leg(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


@functools.lru_cache(maxsize=256)
def _line_rule(half_height: float, nodes: int, inner: float) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on [-H, H], graded geometrically from 0.

    The innermost panel has half-width ``inner`` (comparable to the distance
    to the nearest pole, which sits at imaginary offset ``inner`` from the
    real tau axis); panel widths double outward until ``half_height``.
    """
    inner = min(inner, half_height)
    edges = [0.0]
    w = inner
    while edges[-1] + 1e-12 < half_height:
        edges.append(min(edges[-1] + w, half_height))
        w *= 2.0
    if len(edges) > 2 and edges[-1] - edges[-2] < 0.25 * (edges[-2] - edges[-3]):
        edges.pop(-2)
    right = np.array(edges)
    panels = np.concatenate([-right[:0:-1], right])
    n_panels = len(panels) - 1
    # the floor grows with nodes so that doubling always refines every panel
    order = max(_MIN_PANEL_ORDER, nodes // n_panels, nodes // 32)
    x, w = _leg(order)
    lo, hi = panels[:-1, None], panels[1:, None]
    tau = (0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel()
    wt = (0.5 * (hi - lo) * w).ravel()
    return tau, wt


def _logsumexp_complex(logs: np.ndarray, weights: np.ndarray) -> complex:
    finite = np.isfinite(logs.real)
    if not finite.any():
        return 0.0 + 0.0j
    peak = logs.real[finite].max()
    terms = np.where(finite, np.exp(np.where(finite, logs - peak, 0.0)), 0.0)
    # fixed-order reduction
    return complex(np.sum(weights * terms)) * np.exp(peak)


def _inner_width(distance: float) -> float:
    return max(min(distance, 1.0), 1e-3)


def _check_anchor(c: float, lo: float, hi: float, label: str):
    if not lo < c < hi:
        raise ContourError(f"{label}={c} outside pole-free strip ({lo}, {hi})")


def _default_anchor(lo: float, hi: float) -> float:
    if math.isfinite(lo) and math.isfinite(hi):
        if not lo < hi:
            raise ContourError(f"empty pole-free strip ({lo}, {hi})")
        return 0.5 * (lo + hi)
    if math.isfinite(lo):
        return lo + 0.5
    if math.isfinite(hi):
        return hi - 0.5
    return 0.0


def _univariate_once(params, z, c, contour):
    tau, wt = _line_rule(contour.half_height, contour.nodes,
                         _inner_width(params.pole_distance(c)))
    s = c + 1j * tau
    logs = params.log_kernel(s) - s * math.log(z)
    return _logsumexp_complex(logs, wt) / (2.0 * math.pi)


def _converge(evaluate, contour):
    """Double nodes and half-height until two successive values agree."""
    current = contour
    prev = evaluate(current)
    for _ in range(contour.max_doublings):
        current = current.doubled()
        val = evaluate(current)
        if not (np.isfinite(val.real) and np.isfinite(prev.real)):
            raise ConvergenceError("non-finite Mellin-Barnes quadrature")
        scale = max(abs(val.real), 1e-30)
        diff = abs(val - prev)
        if diff <= contour.tolerance * scale:
            if abs(val.imag) / scale >= contour.tolerance:
                raise ConvergenceError(f"imaginary residue {val.imag:.3g} exceeds tolerance")
            return FoxHValue(val.real, diff, current)
        prev = val
    raise ConvergenceError(
        f"contour quadrature did not converge: last change {diff:.3g} vs value {val.real:.6g}"
    )


@functools.lru_cache(maxsize=4096)
def _fox_h_univariate_cached(params, z, contour):
    lo, hi = params.strip()
    c = contour.anchor1 if contour.anchor1 is not None else _default_anchor(lo, hi)
    _check_anchor(c, lo, hi, "anchor1")
    return _converge(lambda ct: _univariate_once(params, z, c, ct), contour)


def fox_h_univariate(params: FoxHUnivariateParams, z: float,
                     contour: ContourSettings | None = None) -> FoxHValue:
    """Evaluate ``H^{m,n}_{p,q}[z]`` for real ``z > 0``.

    Raises
    ------
    ContourError
        If the anchor does not separate the two pole families.
    ConvergenceError
        If doubling the resolution keeps changing the value by more than
        ``contour.tolerance`` (relative).
    """
    if not z > 0:
        raise ValueError(f"z must be positive, got {z}")
    return _fox_h_univariate_cached(params, float(z), contour or ContourSettings())


def meijer_g(m: int, n: int, a: Sequence[float], b: Sequence[float], z: float,
             contour: ContourSettings | None = None) -> FoxHValue:
    """Meijer ``G^{m,n}_{p,q}[z | a; b]`` as the unit-coefficient Fox H."""
    params = FoxHUnivariateParams(tuple((x, 1.0) for x in a), tuple((x, 1.0) for x in b), m, n)
    return fox_h_univariate(params, z, contour)


# ---------------------------------------------------------------------------
# Bivariate
# ---------------------------------------------------------------------------

_LATTICE = 9


def _lattice(lo: float, hi: float) -> np.ndarray:
    if not math.isfinite(lo) and not math.isfinite(hi):
        lo, hi = -20.0, 20.0
    elif not math.isfinite(hi):
        hi = lo + 20.0
    elif not math.isfinite(lo):
        lo = hi - 20.0
    margin = min(0.5, 0.15 * (hi - lo))
    return np.linspace(lo + margin, hi - margin, _LATTICE)


def _saddle_anchors(params: FoxHBivariateParams, x: float, y: float) -> tuple[float, float] | None:
    """Lattice point minimizing the real log-integrand at tau = 0.

    For arguments far from 1 the value of the integral is much smaller than
    the integrand on a mid-strip line, and the quadrature loses it to
    cancellation; the real-axis minimum approximates the saddle of the
    steepest-descent path.  The lattice is fixed per strip so nearby
    arguments share anchors and hence cached kernel grids.
    """
    g1 = _lattice(*params.var1.strip())
    g2 = _lattice(*params.var2.strip())
    s, t = np.meshgrid(g1, g2, indexing="ij")
    ok = np.ones(s.shape, dtype=bool)
    for al, A, bound in params.joint_constraints():
        ok &= (bound - al * s - A * t) / max(al, A) > 0.25
    if not ok.any():
        return None
    with np.errstate(all="ignore"):
        f = (params.var1.log_kernel(g1.astype(complex)).real[:, None]
             + params.var2.log_kernel(g2.astype(complex)).real[None, :]
             + params.log_joint(s.astype(complex), t.astype(complex)).real
             - s * math.log(x) - t * math.log(y))
    f = np.where(ok & np.isfinite(f), f, np.inf)
    i, j = np.unravel_index(np.argmin(f), f.shape)
    if not np.isfinite(f[i, j]):
        return None
    return float(g1[i]), float(g2[j])


def bivariate_anchors(params: FoxHBivariateParams, contour: ContourSettings | None = None,
                      x: float | None = None, y: float | None = None) -> tuple[float, float]:
    """Anchors for the two integration lines, validated against every pole family.

    With arguments given, free anchors sit at the lattice saddle estimate.
    Otherwise both move from the left edge of their strips towards the strip
    midpoints, stopping halfway to any coupled (joint-numerator) pole.
    """
    contour = contour or ContourSettings()
    lo1, hi1 = params.var1.strip()
    lo2, hi2 = params.var2.strip()
    rows = params.joint_constraints()
    c1, c2 = contour.anchor1, contour.anchor2
    if (c1 is None or c2 is None) and x is not None and y is not None:
        found = _saddle_anchors(params, x, y)
        if found is not None:
            c1 = found[0] if c1 is None else c1
            c2 = found[1] if c2 is None else c2
    if c1 is None or c2 is None:
        d1 = _default_anchor(lo1, hi1)
        d2 = _default_anchor(lo2, hi2)
        base1 = lo1 if math.isfinite(lo1) else d1 - 0.5
        base2 = lo2 if math.isfinite(lo2) else d2 - 0.5
        lam = 1.0
        for al, A, bound in rows:
            slack = bound - al * base1 - A * base2
            if slack <= 0:
                raise ContourError("joint numerator poles block the default contour")
            rise = al * (d1 - base1) + A * (d2 - base2)
            if rise > 0:
                lam = min(lam, 0.5 * slack / rise)
        if c1 is None:
            c1 = base1 + lam * (d1 - base1)
        if c2 is None:
            c2 = base2 + lam * (d2 - base2)
    _check_anchor(c1, lo1, hi1, "anchor1")
    _check_anchor(c2, lo2, hi2, "anchor2")
    for al, A, bound in rows:
        if not al * c1 + A * c2 < bound:
            raise ContourError(f"anchors ({c1}, {c2}) cross a joint pole: {al}s+{A}t < {bound}")
    return float(c1), float(c2)


def _joint_gap(params, c1, c2) -> float:
    gaps = [(bound - al * c1 - A * c2) / max(al, A) for al, A, bound in params.joint_constraints()]
    return min(gaps, default=math.inf)


@functools.lru_cache(maxsize=16)
def _bivariate_grid(params, c1, c2, half_height, nodes):
    # gamma part of the integrand is independent of (x, y); cached per contour
    gap = _joint_gap(params, c1, c2)
    w1 = _inner_width(min(params.var1.pole_distance(c1), gap))
    w2 = _inner_width(min(params.var2.pole_distance(c2), gap))
    tau1, wt1 = _line_rule(half_height, nodes, w1)
    tau2, wt2 = _line_rule(half_height, nodes, w2)
    s = c1 + 1j * tau1
    t = c2 + 1j * tau2
    logs = (params.var1.log_kernel(s)[:, None] + params.var2.log_kernel(t)[None, :]
            + params.log_joint(s[:, None], t[None, :]))
    return s, t, logs, wt1[:, None] * wt2[None, :]


def _bivariate_once(params, x, y, c1, c2, contour):
    s, t, logs, wt = _bivariate_grid(params, c1, c2, contour.half_height, contour.nodes)
    logs = logs - (s * math.log(x))[:, None] - (t * math.log(y))[None, :]
    return _logsumexp_complex(logs, wt) / (2.0 * math.pi) ** 2


@functools.lru_cache(maxsize=4096)
def _fox_h_bivariate_cached(params, x, y, contour):
    c1, c2 = bivariate_anchors(params, contour, x, y)
    return _converge(lambda ct: _bivariate_once(params, x, y, c1, c2, ct), contour)


def fox_h_bivariate(params: FoxHBivariateParams, x: float, y: float,
                    contour: ContourSettings | None = None) -> FoxHValue:
    """Evaluate the bivariate Fox H-function at ``(x, y)``, both positive.

    Same error behaviour as :func:`fox_h_univariate`.
    """
    if not (x > 0 and y > 0):
        raise ValueError(f"x and y must be positive, got {(x, y)}")
    return _fox_h_bivariate_cached(params, float(x), float(y), contour or ContourSettings())


def bivariate_trapezoid(params: FoxHBivariateParams, x: float, y: float,
                        contour: ContourSettings | None = None, nodes: int = 2048) -> complex:
    """Brute-force uniform trapezoid evaluation of the bivariate integrand.

    Independent of the graded Gauss-Legendre machinery; used as a
    high-resolution reference.
    """
    contour = contour or ContourSettings()
    c1, c2 = bivariate_anchors(params, contour, x, y)
    tau = np.linspace(-contour.half_height, contour.half_height, nodes)
    h = tau[1] - tau[0]
    wt = np.full(nodes, h)
    wt[[0, -1]] *= 0.5
    s = c1 + 1j * tau
    t = c2 + 1j * tau
    l1 = params.var1.log_kernel(s) - s * math.log(x)
    l2 = params.var2.log_kernel(t) - t * math.log(y)
    logs = l1[:, None] + l2[None, :] + params.log_joint(s[:, None], t[None, :])
    return _logsumexp_complex(logs, wt[:, None] * wt[None, :]) / (2.0 * math.pi) ** 2
