"""Security analysis toolkit for round-robin DPS QKD with bit-error monitoring."""

__version__ = "0.1.0"

from rrdps.security_bounds import (  # noqa: E402
    BoundQuery,
    BoundResult,
    MinimizerSettings,
    binary_entropy,
    e_star,
    omega,
    omega_minus,
    omega_plus,
    phase_error_bound,
    segment_approx,
)
from rrdps.rate_model import ProtocolParams, RatePoint, key_rate  # noqa: E402
from rrdps.optimizer import SweepConfig, optimize_at, sweep  # noqa: E402
from rrdps.protocol_sim import ChannelModel, SimConfig, SimStats, run_rounds  # noqa: E402

__all__ = [
    "BoundQuery",
    "BoundResult",
    "ChannelModel",
    "MinimizerSettings",
    "ProtocolParams",
    "RatePoint",
    "SimConfig",
    "SimStats",
    "SweepConfig",
    "binary_entropy",
    "e_star",
    "key_rate",
    "omega",
    "omega_minus",
    "omega_plus",
    "optimize_at",
    "phase_error_bound",
    "run_rounds",
    "segment_approx",
    "sweep",
]
