"""
Meijer G and Fox H by contour integration
=========================================

Both functions are evaluated as Mellin-Barnes integrals along a vertical
line.  Known reductions make good sanity checks.
"""

import math

from riscopula import specfun
from riscopula.specfun import FoxHUnivariateParams, meijer_g, fox_h_univariate

# G^{1,0}_{0,1}(z | 0) is just exp(-z)
r = meijer_g(1, 0, [], [0.0], 2.0)
print(f"G(2)   = {r.value:.15f}  exp(-2) = {math.exp(-2):.15f}  err ~ {r.err_estimate:.1e}")

# G^{2,0}_{0,2}(z | 0, 1/2) = sqrt(pi) exp(-2 sqrt z)
r = meijer_g(2, 0, [], [0.0, 0.5], 1.0)
print(f"G(1)   = {r.value:.15f}  sqrt(pi) e^-2 = {math.sqrt(math.pi) * math.exp(-2):.15f}")

# with unit coefficients the Fox H reduces to the Meijer G
h = fox_h_univariate(FoxHUnivariateParams((), ((0.0, 1.0),), 1, 0), 2.0)
print(f"H(2)   = {h.value:.15f}")

# complex log-gamma, the building block of every kernel
print("lnGamma(2.5+1.5j) =", specfun.ln_gamma_complex(2.5 + 1.5j))
print("Gamma(2.5, 0.7)   =", specfun.upper_incomplete_gamma(2.5, 0.7))
