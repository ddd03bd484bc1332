"""Key-rate maximization over the mean photon number and the tagging threshold."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from rrdps._golden import golden_section
from rrdps.rate_model import ProtocolParams, RatePoint, key_rate

N_MU_GRID = 40


@dataclass(frozen=True)
class SweepConfig:
    L: int
    e: float = 0.03
    f_ec: float = 1.1
    eta_grid: Sequence[float] = (1.0,)
    nu_th_range: Optional[tuple[int, int]] = None
    mu_bracket: Optional[tuple[float, float]] = None
    refine_tol: float = 1e-6
    monitored: bool = True

    def __post_init__(self) -> None:
        etas = np.asarray(self.eta_grid, dtype=float)
        if etas.size == 0 or np.any(etas <= 0) or np.any(etas > 1):
            raise ValueError("eta_grid must be nonempty with values in (0, 1]")
        if etas.size > 1:
            diffs = np.diff(etas)
            if not (np.all(diffs > 0) or np.all(diffs < 0)):
                raise ValueError("eta_grid must be strictly monotone")
        lo, hi = self.nu_range
        if not 1 <= lo <= hi <= self.L - 2:
            raise ValueError(f"nu_th_range must lie within [1, {self.L - 2}], got {(lo, hi)}")
        m_lo, m_hi = self.mu_limits
        if not 0 < m_lo < m_hi:
            raise ValueError(f"mu_bracket must satisfy 0 < lo < hi, got {(m_lo, m_hi)}")

    @property
    def nu_range(self) -> tuple[int, int]:
        return self.nu_th_range if self.nu_th_range is not None else (1, self.L - 2)

    @property
    def mu_limits(self) -> tuple[float, float]:
        return self.mu_bracket if self.mu_bracket is not None else (1e-5, 10.0 / self.L)


def _rate(cfg: SweepConfig, eta: float, nu_th: int, mu: float) -> RatePoint:
    p = ProtocolParams(cfg.L, nu_th, mu, eta, cfg.e, cfg.f_ec)
    return key_rate(p, monitored=cfg.monitored)


def _better(a: RatePoint, b: RatePoint) -> bool:
    """Is ``a`` strictly preferable to ``b``?  Ties go to smaller nu_th, then smaller mu."""
    if a.rate_per_pulse != b.rate_per_pulse:
        return a.rate_per_pulse > b.rate_per_pulse
    if a.rate_per_pulse == 0.0 and a.rate_per_block != b.rate_per_block:
        # keep the least negative raw rate as diagnostics
        return a.rate_per_block > b.rate_per_block
    return (a.nu_th, a.mu) < (b.nu_th, b.mu)


def _best_for_threshold(cfg: SweepConfig, eta: float, nu_th: int) -> RatePoint:
    lo, hi = cfg.mu_limits
    log_grid = np.linspace(math.log(lo), math.log(hi), N_MU_GRID)
    points = [_rate(cfg, eta, nu_th, float(math.exp(x))) for x in log_grid]
    raw = np.array([p.rate_per_block for p in points])
    i = int(np.argmax(raw))
    best = points[i]

    a = log_grid[max(i - 1, 0)]
    b = log_grid[min(i + 1, N_MU_GRID - 1)]

    def neg_rate(log_mu: float) -> float:
        return -_rate(cfg, eta, nu_th, math.exp(log_mu)).rate_per_block

    # refine_tol is relative in mu, i.e. absolute in log(mu)
    x_ref, _ = golden_section(neg_rate, a, b, rel_tol=0.0, abs_tol=cfg.refine_tol)
    refined = _rate(cfg, eta, nu_th, math.exp(x_ref))
    if refined.rate_per_block > best.rate_per_block:
        best = refined
    return best


def optimize_at(eta: float, cfg: SweepConfig) -> RatePoint:
    """Best rate per pulse at transmission ``eta`` over every nu_th and mu in range."""
    if not 0 < eta <= 1:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    lo, hi = cfg.nu_range
    best = None
    for nu_th in range(lo, hi + 1):
        cand = _best_for_threshold(cfg, eta, nu_th)
        if best is None or _better(cand, best):
            best = cand
    return best


@dataclass
class SweepResult:
    points: list[RatePoint] = field(default_factory=list)
    failures: dict[float, str] = field(default_factory=dict)


def sweep(cfg: SweepConfig) -> list[RatePoint]:
    """Optimize at every eta of the grid, in order.

    A point that raises is logged in :func:`sweep_detailed` and skipped
    here; use that variant to see failures.
    """
    return sweep_detailed(cfg).points


def sweep_detailed(cfg: SweepConfig) -> SweepResult:
    result = SweepResult()
    for eta in cfg.eta_grid:
        try:
            result.points.append(optimize_at(float(eta), cfg))
        except (ValueError, ArithmeticError) as exc:
            result.failures[float(eta)] = f"{type(exc).__name__}: {exc}"
    return result
