"""
Outage probability four ways
============================

Direct quadrature, the Fox-H closed form, the Gamma-copula model for
b-bit phases and the high-SNR power law, next to a Monte-Carlo estimate.
"""

import numpy as np

from riscopula import outage
from riscopula.montecarlo import SystemConfig, estimate_outage

gamma_th = 10**0.5
print(" snr_db        MC     quad   closed   asymptote")
for snr_db in range(0, 31, 6):
    c = SystemConfig(4, 1, 10 ** (snr_db / 10), 1.0, gamma_th)
    mc = estimate_outage(c, 1_000_000, seed=snr_db).value
    q = outage.outage_quadrature_onebit(c).value
    cf = outage.outage_closed_form_onebit(c).value
    a = outage.outage_asymptotic(c).value
    print(f"{snr_db:7d} {mc:9.3e} {q:9.3e} {cf:9.3e} {a:9.3e}")

# two-bit phases, Gamma margins and an FGM coupling; affine in theta
c = SystemConfig(16, 2, 10**-1.1, 1.0, gamma_th)  # -11 dB, where the outage is visible
for th in (0.0, 0.5):
    print(f"b=2 M=16 theta={th}: {outage.outage_bbit(c, th).value:.4e}")
print("MC:", estimate_outage(c, 1_000_000, seed=1).value)

rho = 10 ** (np.arange(30, 51, 5) / 10)
vals = [outage.outage_quadrature_onebit(SystemConfig(4, 1, r, 1.0, gamma_th)).value for r in rho]
print("high-SNR slope for M=4:", round(outage.snr_slope(np.array(vals), rho), 3))
