"""
Moments under b-bit phase quantization
======================================

Second and fourth moments of X and Y in closed form, checked against
simulation, then used to moment-match Gamma laws for X^2 and Y^2.
"""

import numpy as np

from riscopula import moments
from riscopula.montecarlo import SystemConfig, draw_xy, estimate_moments, ks_distance

M = 16
for b in (1, 2, 3):
    L = 2**b
    est = estimate_moments(SystemConfig(M, b), 400_000, seed=b)
    print(f"b={b}  E[X^2] {moments.mean_square(M, L, 'x'):9.4f} vs {est.x2.value:9.4f}"
          f"   E[Y^4] {moments.fourth_moment(M, L, 'y'):9.4f} vs {est.y4.value:9.4f}")

fit = moments.gamma_fit(M, 2, "x")
print(f"\nX^2 ~ Gamma(shape={fit.shape:.3f}, scale={fit.scale:.3f}) for M={M}, b=2")
x, _ = draw_xy(SystemConfig(M, 2), 400_000, seed=9)
print("KS distance of the fit:", round(ks_distance(np.sort(x * x), fit.cdf), 4))
