"""Self-verification suite: closed forms against brute-force oracles.

Every check yields a :class:`~rrdps.spectral_oracle.CheckResult` holding
the worst deviation seen and the tolerance it is held to.
"""

from __future__ import annotations

import numpy as np

from rrdps import security_bounds, spectral_oracle
from rrdps.spectral_oracle import CheckResult

LAMBDAS = (0.0, 0.1, 1.0, 10.0)
JOINT_LAMBDAS = (0.0, 0.05, 0.1, 0.3, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0)


def check_determinant_identity(n_draws: int = 1000, max_dim: int = 8, seed: int = 0) -> CheckResult:
    """Closed-form determinant vs elimination.

    Deviation is ``|closed - brute| / max(|brute|, 1e-3)``, so the 1e-9
    tolerance is relative for ordinary determinants and 1e-12 absolute near zero.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_draws):
        alpha, beta, gamma = rng.uniform(-2.0, 2.0, size=3)
        d = int(rng.integers(1, max_dim + 1))
        m = int(rng.integers(0, d + 1))
        closed = spectral_oracle.det_closed_form(alpha, beta, gamma, d, m)
        brute = spectral_oracle.det_bruteforce(
            spectral_oracle.combination(alpha, beta, gamma, d, m)
        )
        worst = max(worst, abs(closed - brute) / max(abs(brute), 1e-3))
    return CheckResult("determinant_closed_form", worst, 1e-9)


def check_eigenvalue_closure(L_values=range(3, 13), lambdas=LAMBDAS) -> CheckResult:
    worst = 0.0
    for L in L_values:
        for nu in range(1, L - 1):
            for lam in lambdas:
                got_m = spectral_oracle.max_eigenvalue(spectral_oracle.build_lambda_minus(L, nu - 1, lam))
                got_p = spectral_oracle.max_eigenvalue(spectral_oracle.build_lambda_plus(L, nu + 1, lam))
                worst = max(
                    worst,
                    abs(got_m - security_bounds.omega_minus(L, nu, lam)),
                    abs(got_p - security_bounds.omega_plus(L, nu, lam)),
                )
    return CheckResult("lambda_eigenvalue_closure", worst, 1e-9)


def check_lower_sectors(L_values=range(3, 13), lambdas=LAMBDAS) -> CheckResult:
    """Weights nu-3, nu-5, ... never beat the nu-1 sector.

    Deviation is the largest excess ``sector - omega_minus`` (0 when none).
    """
    worst = 0.0
    for L in L_values:
        for nu in range(1, L - 1):
            for lam in lambdas:
                top = security_bounds.omega_minus(L, nu, lam)
                for w in range(nu - 3, -1, -2):
                    val = spectral_oracle.max_eigenvalue(
                        spectral_oracle.build_lambda_minus(L, w, lam), method="lapack"
                    )
                    worst = max(worst, val - top)
    return CheckResult("lower_weight_sectors_dominated", worst, 1e-12)


def check_omega_monotone_in_nu(L_values=range(3, 13), lambdas=LAMBDAS) -> CheckResult:
    """Deviation is the largest ``omega(nu) - omega(nu+1)``; must be negative."""
    worst = -np.inf
    for L in L_values:
        for nu in range(1, L - 2):
            for lam in lambdas:
                worst = max(
                    worst,
                    security_bounds.omega(L, nu, lam) - security_bounds.omega(L, nu + 1, lam),
                )
    # strict increase: a gap within 1e-12 of zero counts as a tie and fails
    return CheckResult("omega_increasing_in_nu", max(worst + 1e-12, 0.0), 0.0)


def check_permutation_symmetry(L_values=range(3, 9)) -> CheckResult:
    worst = 0.0
    for L in L_values:
        for nu in range(1, L - 1):
            for lam in LAMBDAS:
                worst = max(worst, spectral_oracle.permuted_sector_spread(L, nu, lam))
    return CheckResult("sector_permutation_symmetry", worst, 1e-12)


def check_povm_identities(L_values=range(3, 9)) -> list[CheckResult]:
    worst: dict[str, float] = {}
    for L in L_values:
        for name, dev in spectral_oracle.povm_identity_deviations(L).items():
            worst[name] = max(worst.get(name, 0.0), dev)
    return [CheckResult(name, dev, 1e-12) for name, dev in worst.items()]


def check_joint_space(L_values=(3,), lambdas=JOINT_LAMBDAS) -> list[CheckResult]:
    worst: dict[str, tuple[float, float]] = {}

    def record(name: str, dev: float, tol: float) -> None:
        prev = worst.get(name, (0.0, tol))[0]
        worst[name] = (max(prev, dev), tol)

    for L in L_values:
        ops = spectral_oracle.build_joint_operators(L)
        for name, dev in spectral_oracle.joint_structure_deviations(ops).items():
            record(f"joint_{name}", dev, 1e-12)
        for nu in range(1, L - 1):
            report = spectral_oracle.verify_sector_decomposition(L, nu, lambdas, ops=ops)
            for c in report.checks:
                record(c.check_name.split("[")[0], c.max_deviation, c.tolerance)
    return [CheckResult(name, dev, tol) for name, (dev, tol) in worst.items()]


def check_bound_shape(cases=((6, range(1, 4)),), n_e: int = 101) -> list[CheckResult]:
    """Monotonicity in e and nu, the cap nu/(L-1), and closeness to the segment fit."""
    e_grid = np.linspace(0.0, 0.5, n_e)
    mono_e = mono_nu = cap = seg = 0.0
    for L, nus in cases:
        table = {}
        for nu in nus:
            vals = np.array(
                [security_bounds.phase_error_bound_value(L, nu, e) for e in e_grid]
            )
            table[nu] = vals
            mono_e = max(mono_e, float(np.max(-np.diff(vals), initial=0.0)))
            cap = max(cap, float(np.max(vals - nu / (L - 1))), float(np.max(-vals)))
            approx = np.array([security_bounds.segment_approx(L, nu, e) for e in e_grid])
            seg = max(seg, float(np.max(np.abs(vals - approx))))
        nus = sorted(table)
        for a, b in zip(nus, nus[1:]):
            mono_nu = max(mono_nu, float(np.max(table[a] - table[b])))
    return [
        CheckResult("bound_nondecreasing_in_e", max(mono_e, 0.0), 1e-12),
        CheckResult("bound_nondecreasing_in_nu", max(mono_nu, 0.0), 1e-12),
        CheckResult("bound_within_cap", max(cap, 0.0), 0.0),
        CheckResult("bound_segment_fit", seg, 0.02),
    ]


def run_verification(level: str = "fast", seed: int = 0) -> list[CheckResult]:
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    full = level == "full"
    checks = [
        check_determinant_identity(seed=seed),
        check_eigenvalue_closure(),
        check_lower_sectors(),
        check_omega_monotone_in_nu(),
        check_permutation_symmetry(),
    ]
    checks += check_povm_identities()
    checks += check_joint_space(L_values=(3, 4, 5) if full else (3,))
    bound_cases = ((6, range(1, 4)), (64, range(1, 33))) if full else ((6, range(1, 4)),)
    checks += check_bound_shape(bound_cases)
    return checks
