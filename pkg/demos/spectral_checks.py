"""Where the closed forms come from, checked numerically.

The bound is built from the largest eigenvalue of (phase-error operator
minus lambda times bit-error operator) on a fixed photon-number sector.
Below, that eigenvalue is computed three ways for small blocks: by
diagonalizing the full 2^L * L dimensional operator, by diagonalizing the
reduced sector matrices, and from the closed forms.
"""

from rrdps import security_bounds as sb
from rrdps import spectral_oracle as so

for L in (3, 4, 5):
    ops = so.build_joint_operators(L)
    for nu in range(1, L - 1):
        report = so.verify_sector_decomposition(L, nu, [0.0, 0.5, 2.0], ops=ops)
        for lam, full, closed in report.eigenvalues:
            reduced = max(
                so.max_eigenvalue(so.build_lambda_minus(L, nu - 1, lam)),
                so.max_eigenvalue(so.build_lambda_plus(L, nu + 1, lam)),
            )
            print(f"L={L} nu={nu} lambda={lam:<4}  full {full:.10f}  reduced {reduced:.10f}  closed {closed:.10f}")
        assert report.passed

# the sector matrices are structured enough that their determinant is closed form
m = so.combination(0.3, -1.1, 0.7, d=6, m=2)
print("\ndet, closed form vs elimination:", so.det_closed_form(0.3, -1.1, 0.7, 6, 2), so.det_bruteforce(m))
print("sector spread under position relabelling:", so.permuted_sector_spread(8, 4, 1.0))
