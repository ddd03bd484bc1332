"""How much does monitoring the bit error rate buy?

For each photon number nu the phase-error bound starts at (nu-1)/L when
no bit errors are seen and climbs to the unmonitored value nu/(L-1) once
the error rate passes a threshold.  This prints both ends and a coarse
curve, and shows how close the straight two-segment fit gets.
"""

import numpy as np

from rrdps.security_bounds import e_star, phase_error_bound, BoundQuery, segment_approx

L = 6
print(f"block size L = {L}\n")
print(" nu   F(e=0)   threshold e*   F(e>=e*)")
for nu in range(1, L - 1):
    lo = phase_error_bound(BoundQuery(L, nu, 0.0)).f_value
    hi = phase_error_bound(BoundQuery(L, nu, 0.5)).f_value
    print(f"{nu:3d}   {lo:.4f}   {e_star(L, nu):.4f}         {hi:.4f}")

nu = 3
print(f"\nnu = {nu}:   e       F       fit   lambda*  branch")
for e in np.linspace(0, 0.25, 11):
    res = phase_error_bound(BoundQuery(L, nu, float(e)))
    lam = res.lambda_opt if isinstance(res.lambda_opt, str) else f"{res.lambda_opt:.3g}"
    print(f"        {e:.3f}   {res.f_value:.4f}  {segment_approx(L, nu, float(e)):.4f}  {lam:>7}  {res.branch}")

# the fit never strays far, even for long blocks
worst = max(
    abs(phase_error_bound(BoundQuery(64, nu, float(e))).f_value - segment_approx(64, nu, float(e)))
    for nu in (1, 8, 16, 32)
    for e in np.linspace(0, 0.5, 51)
)
print(f"\nL = 64: worst gap between exact bound and two-segment fit = {worst:.4f}")
