"""
Where to put the surface
========================

The RIS sits on the line between transmitter and receiver.  The cascaded
path loss (l1 l2)^-nu is weakest near either end, so outage peaks in the
middle.
"""

from riscopula import outage
from riscopula.montecarlo import SystemConfig

D, nu = 10.0, 2.8
tx, gamma_th = 10**1.5, 10**0.5
for i in range(1, 20):
    d = D * i / 20
    pl = outage.path_loss(d, D - d, nu)
    o = outage.outage_quadrature_onebit(SystemConfig(8, 1, tx, pl, gamma_th)).value
    print(f"d={d:5.2f}  path loss {pl:.3e}  outage {o:.4f}  " + "#" * int(40 * o))
