"""Key rate against channel transmission, with and without bit-error monitoring.

e = 3% and f_EC = 1.1.  For each transmission the source intensity and
photon-number threshold are optimized; monitoring helps a lot for short
blocks and only modestly for long ones.
"""

import numpy as np

from rrdps.optimizer import SweepConfig, sweep

etas = tuple(np.logspace(0, -3, 7))
for L in (6, 64):
    mon = sweep(SweepConfig(L=L, e=0.03, f_ec=1.1, eta_grid=etas, monitored=True))
    unm = sweep(SweepConfig(L=L, e=0.03, f_ec=1.1, eta_grid=etas, monitored=False))
    print(f"\nL = {L}")
    print("    eta     monitored  (nu_th, mu)     unmonitored  (nu_th, mu)    gain")
    for a, b in zip(mon, unm):
        gain = a.rate_per_pulse / b.rate_per_pulse - 1 if b.rate_per_pulse > 0 else float("inf")
        print(
            f"  {a.eta:.0e}   {a.rate_per_pulse:.3e}  ({a.nu_th:2d}, {a.mu:.2e})   "
            f"{b.rate_per_pulse:.3e}  ({b.nu_th:2d}, {b.mu:.2e})  {gain:6.2f}"
        )
