"""Asymptotic key rate of RRDPS with a coherent-state source.

Per emitted block the rate is ``Q * (1 - EC - PA)`` with

* ``EC = f_ec * h(e)``
* ``PA = d + (1 - d) * h(phi)``, ``d = min(1, e_src / (2 Q))`` the tagged
  fraction and ``phi`` the phase-error bound at the untagged error rate
  ``e / (1 - d)``.  Without monitoring, ``phi = nu_th / (L - 1)``.

Dark counts are neglected and detector inefficiency is folded into ``eta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from scipy import stats

from rrdps.errors import DegenerateInputError
from rrdps.security_bounds import binary_entropy, phase_error_bound_value


@dataclass(frozen=True)
class ProtocolParams:
    """Operating point of one RRDPS link.

    ``N`` (number of rounds) and the common phase ``delta`` of the protocol
    do not enter the asymptotic rate; rates are reported per block (G/N)
    and per pulse (G/(L N)).
    """

    L: int
    nu_th: int
    mu: float
    eta: float
    e: float
    f_ec: float = 1.1

    def __post_init__(self) -> None:
        if int(self.L) != self.L or self.L < 3:
            raise ValueError(f"L must be an integer >= 3, got {self.L}")
        if int(self.nu_th) != self.nu_th or not 1 <= self.nu_th <= self.L - 2:
            raise ValueError(f"nu_th must be an integer in [1, L-2], got {self.nu_th}")
        if not self.mu > 0:
            raise ValueError(f"mu must be > 0, got {self.mu}")
        if not 0 < self.eta <= 1:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta}")
        if not 0 <= self.e <= 0.5:
            raise ValueError(f"e must lie in [0, 0.5], got {self.e}")
        if not self.f_ec >= 1:
            raise ValueError(f"f_ec must be >= 1, got {self.f_ec}")


@dataclass(frozen=True)
class RatePoint:
    eta: float
    mu: float
    nu_th: int
    q: float
    e_src: float
    delta_tag: float
    e_unt: float
    ec_cost: float
    pa_cost: float
    rate_per_block: float
    rate_per_pulse: float
    monitored: bool = True
    flag: Optional[str] = None


def detection_rate(L: int, mu: float, eta: float) -> float:
    """``Q = x exp(-x)`` with ``x = L mu eta / 2``."""
    if mu < 0 or not 0 <= eta <= 1:
        raise ValueError(f"need mu >= 0 and 0 <= eta <= 1, got mu={mu}, eta={eta}")
    x = L * mu * eta / 2.0
    return x * math.exp(-x)


def source_tail(L: int, mu: float, nu_th: int) -> float:
    """Probability that a block carries more than ``nu_th`` photons (Poisson, mean L mu)."""
    if mu < 0 or nu_th < 0:
        raise ValueError(f"need mu >= 0 and nu_th >= 0, got mu={mu}, nu_th={nu_th}")
    return float(stats.poisson.sf(nu_th, L * mu))


def tag_fraction(e_src: float, q: float) -> float:
    if q <= 0:
        raise DegenerateInputError("detection rate is zero; tagged fraction undefined")
    return min(1.0, e_src / (2.0 * q))


def untagged_error(e: float, delta_tag: float) -> float:
    if not 0 <= delta_tag <= 1:
        raise ValueError(f"delta_tag must lie in [0, 1], got {delta_tag}")
    if delta_tag == 1:
        raise DegenerateInputError("every detected round is tagged")
    return e / (1.0 - delta_tag)


def ec_cost(e: float, f_ec: float) -> float:
    return f_ec * binary_entropy(e)


def _phase_bound(L: int, nu_th: int, e_unt: float, monitored: bool) -> float:
    if monitored:
        return phase_error_bound_value(L, nu_th, e_unt)
    return nu_th / (L - 1)


def _pa_parts(L, nu_th, mu, e, q, monitored):
    e_src = source_tail(L, mu, nu_th)
    delta = tag_fraction(e_src, q)
    if delta >= 1.0:
        return e_src, 1.0, math.inf, 1.0
    e_unt = untagged_error(e, delta)
    phi = _phase_bound(L, nu_th, e_unt, monitored)
    # the bound is only meaningful up to 1/2; beyond that PA saturates
    pa = delta + (1.0 - delta) * binary_entropy(min(phi, 0.5))
    return e_src, delta, e_unt, pa


def pa_cost(p: ProtocolParams, q: float, monitored: bool = True) -> float:
    """Privacy-amplification cost per detected round.  Returns 1 if every round is tagged."""
    return _pa_parts(p.L, p.nu_th, p.mu, p.e, q, monitored)[3]


def rate_from_counts(
    p: ProtocolParams, q: float, e: float | None = None, monitored: bool = True
) -> RatePoint:
    """Assemble a RatePoint for a given detection rate ``q`` (and optional error rate)."""
    e = p.e if e is None else e
    if q <= 0:
        return RatePoint(
            p.eta, p.mu, p.nu_th, 0.0, source_tail(p.L, p.mu, p.nu_th), 1.0,
            math.inf, ec_cost(e, p.f_ec), 1.0, 0.0, 0.0, monitored, "no-detections",
        )
    e_src, delta, e_unt, pa = _pa_parts(p.L, p.nu_th, p.mu, e, q, monitored)
    ec = ec_cost(e, p.f_ec)
    per_block = q * (1.0 - ec - pa)
    flag = "all-tagged" if delta >= 1.0 else None
    return RatePoint(
        eta=p.eta,
        mu=p.mu,
        nu_th=p.nu_th,
        q=q,
        e_src=e_src,
        delta_tag=delta,
        e_unt=e_unt,
        ec_cost=ec,
        pa_cost=pa,
        rate_per_block=per_block,
        rate_per_pulse=max(0.0, per_block) / p.L,
        monitored=monitored,
        flag=flag,
    )


def key_rate(p: ProtocolParams, monitored: bool = True) -> RatePoint:
    return rate_from_counts(p, detection_rate(p.L, p.mu, p.eta), monitored=monitored)
