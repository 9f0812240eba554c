"""
In-phase and quadrature marginals of the one-bit RIS channel
============================================================

With one-bit phase control the residual phase is uniform on
[-pi/2, pi/2].  X then follows a Gamma law and Y a signed mixture of
Gamma laws; both are compared here with simulated channels.
"""

import numpy as np

from riscopula import marginals
from riscopula.montecarlo import SystemConfig, draw_xy, ks_distance

scale = marginals.PHYSICAL_SCALE  # E|h|^2 = E|g|^2 = 1 puts each element at mean 1/2

for M in (1, 2, 4, 8):
    x, y = draw_xy(SystemConfig(M, 1), 200_000, seed=M)
    dx = ks_distance(np.sort(x), lambda t: marginals.cdf_x(M, t, scale))
    dy = ks_distance(np.sort(y), lambda t: marginals.cdf_y(M, t, scale))
    print(f"M={M:2d}  KS(X)={dx:.4f}  KS(Y)={dy:.4f}")

# the Y law is a Laplace mixture; its weights add up to one half
print("mixture weights, M=4:", marginals.laplace_sum_weights(4))
