"""Phase-error-rate bounds for RRDPS with bit-error monitoring.

The central object is the trade-off curve

    F(nu, e) = inf_{lam >= 0} [ lam * e + Omega(nu, lam) ],

where ``Omega`` is the largest eigenvalue of the photon-number restricted
operator ``e_ph - lam * e_bit``.  It has the closed form
``max(omega_minus, omega_plus)``; both branches are implemented here and
checked against dense eigensolves in :mod:`rrdps.spectral_oracle`.

``Omega`` is a largest eigenvalue of an operator affine in ``lam``, so it
is convex in ``lam`` and the objective above is convex too.  The minimizer
exploits that with a grid scan followed by golden-section refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Union

import numpy as np

from rrdps._golden import golden_section
from rrdps.errors import NumericError

Branch = Literal["minus", "plus", "tie"]
LambdaOpt = Union[float, Literal["limit"]]

TIE_TOL = 1e-12


def _check_block(L: int, nu: int) -> None:
    if int(L) != L or int(nu) != nu:
        raise ValueError(f"L and nu must be integers, got L={L!r}, nu={nu!r}")
    if L < 3:
        raise ValueError(f"block size L must be >= 3, got {L}")
    if not 1 <= nu <= L - 2:
        raise ValueError(f"nu must satisfy 1 <= nu <= L-2 = {L - 2}, got {nu}")


def _check_lambda(lam) -> None:
    if np.any(np.asarray(lam) < 0):
        raise ValueError("lambda must be nonnegative")


@dataclass(frozen=True)
class BoundQuery:
    L: int
    nu: int
    e: float

    def __post_init__(self) -> None:
        _check_block(self.L, self.nu)
        if not (self.e >= 0 and math.isfinite(self.e)):
            raise ValueError(f"bit error rate must be finite and >= 0, got {self.e}")


@dataclass(frozen=True)
class BoundResult:
    f_value: float
    lambda_opt: LambdaOpt
    branch: Branch


@dataclass(frozen=True)
class MinimizerSettings:
    """Search domain for the infimum over lambda."""

    lambda_min: float = 1e-6
    lambda_max: float = 1e6
    n_grid: int = 200
    rel_tol: float = 1e-10

    def grid(self) -> np.ndarray:
        log_grid = np.logspace(
            math.log10(self.lambda_min), math.log10(self.lambda_max), self.n_grid
        )
        return np.concatenate(([0.0], log_grid))


DEFAULT_SETTINGS = MinimizerSettings()


def binary_entropy(x):
    """Binary entropy in bits, with ``0 log 0 = 0``.  Accepts scalars or arrays."""
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise ValueError(f"binary entropy argument must lie in [0, 1], got {x!r}")
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -arr * np.log2(arr) - (1 - arr) * np.log2(1 - arr)
    h = np.where((arr == 0) | (arr == 1), 0.0, h)
    if h.ndim == 0:
        return float(h)
    return h


def omega_minus(L: int, nu: int, lam):
    """Largest eigenvalue over the sector with X-weight ``nu - 1``.

    ``1 - sqrt(1 - x)`` is evaluated as ``x / (1 + sqrt(1 - x))`` to keep
    precision at large ``lam`` where ``x`` is tiny.
    """
    _check_block(L, nu)
    _check_lambda(lam)
    lam_arr = np.asarray(lam, dtype=float)
    s = L * lam_arr + 2.0
    x = 8.0 * (nu - 1) * lam_arr / (s * s)
    if np.any(x > 1.0):
        raise ValueError("square-root argument in omega_minus is negative")
    val = (nu - 1) / (L - 1) - s / (4.0 * (L - 1)) * (x / (1.0 + np.sqrt(1.0 - x)))
    return float(val) if val.ndim == 0 else val


def omega_plus(L: int, nu: int, lam):
    """Largest eigenvalue over the sector with X-weight ``nu + 1``."""
    _check_block(L, nu)
    _check_lambda(lam)
    lam_arr = np.asarray(lam, dtype=float)
    val = nu / (L - 1) - lam_arr * (L - 1 - nu) / (2.0 * (L - 1))
    return float(val) if val.ndim == 0 else val


def omega(L: int, nu: int, lam):
    val = np.maximum(omega_minus(L, nu, lam), omega_plus(L, nu, lam))
    return float(val) if np.ndim(val) == 0 else val


def e_star(L: int, nu: int) -> float:
    """Bit error rate above which F saturates at ``nu / (L - 1)``."""
    _check_block(L, nu)
    return (L - 1 - nu) / (2.0 * (L - 1))


def _scalar_objective(L: int, nu: int, e: float):
    # math-only path for the refinement loop; the numpy path is too slow per call
    a = (nu - 1) / (L - 1)
    b = nu / (L - 1)
    slope = (L - 1 - nu) / (2.0 * (L - 1))
    four_lm1 = 4.0 * (L - 1)

    def f(lam: float) -> float:
        s = L * lam + 2.0
        x = 8.0 * (nu - 1) * lam / (s * s)
        om = a - s / four_lm1 * (x / (1.0 + math.sqrt(1.0 - x)))
        op = b - lam * slope
        return lam * e + (om if om > op else op)

    return f


def _branch_at(L: int, nu: int, lam: float) -> Branch:
    om = omega_minus(L, nu, lam)
    op = omega_plus(L, nu, lam)
    if abs(om - op) <= TIE_TOL:
        return "tie"
    return "minus" if om > op else "plus"


def phase_error_bound(
    q: BoundQuery, cfg: MinimizerSettings = DEFAULT_SETTINGS
) -> BoundResult:
    """Evaluate ``F(nu, e)`` by grid scan plus golden-section refinement.

    If the objective is still decreasing at the top of the lambda grid the
    infimum is the unattained large-lambda limit ``(nu - 1) / L`` and
    ``lambda_opt`` is reported as ``"limit"``.
    """
    L, nu, e = q.L, q.nu, float(q.e)
    cap = nu / (L - 1)
    grid = cfg.grid()
    values = grid * e + omega(L, nu, grid)
    if not np.all(np.isfinite(values)):
        raise NumericError(f"non-finite objective for L={L}, nu={nu}, e={e}")

    i = int(np.argmin(values))
    if i == len(grid) - 1:
        f_value = (nu - 1) / L
        return BoundResult(min(max(f_value, 0.0), cap), "limit", "minus")

    best_lam, best_val = float(grid[i]), float(values[i])
    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[i + 1])
    lam_ref, val_ref = golden_section(
        _scalar_objective(L, nu, e), lo, hi, rel_tol=cfg.rel_tol
    )
    if not math.isfinite(val_ref):
        raise NumericError(f"non-finite refinement for L={L}, nu={nu}, e={e}")
    if val_ref < best_val:
        best_lam, best_val = lam_ref, val_ref

    f_value = min(max(best_val, 0.0), cap)
    return BoundResult(f_value, best_lam, _branch_at(L, nu, best_lam))


def phase_error_bound_value(
    L: int, nu: int, e: float, cfg: MinimizerSettings = DEFAULT_SETTINGS
) -> float:
    return phase_error_bound(BoundQuery(L, nu, e), cfg).f_value


def segment_approx(L: int, nu: int, e: float) -> float:
    """Two-segment approximation to ``F``: a line from ``(nu-1)/L`` at e=0
    up to ``nu/(L-1)`` at ``e_star``, flat afterwards."""
    threshold = e_star(L, nu)
    if e < 0:
        raise ValueError(f"bit error rate must be >= 0, got {e}")
    high = nu / (L - 1)
    if e >= threshold:
        return high
    t = e / threshold
    return (nu - 1) / L * (1 - t) + high * t
