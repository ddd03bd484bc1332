"""Monte Carlo simulation of RRDPS rounds.

Each round: Alice draws L phase bits (and a common phase that nothing
downstream reads), the channel delivers a Poisson number of photons with
mean ``L mu eta``, and Bob proceeds only if exactly one photon arrived.
The single photon is put in a real L-amplitude state, passed through a
noise model, and measured with the three-step procedure: a fair coin
decides failure, otherwise an outcome ``({k, l}, s_B)`` is drawn with
probability ``(psi_k + (-1)**s_B psi_l)**2 / (2 (L - 1))``.

Rounds are processed in fixed-size chunks, each with its own RNG substream
``SeedSequence(seed, spawn_key=(chunk_index,))``, so results do not depend
on how chunks are scheduled.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from rrdps.errors import DegenerateInputError
from rrdps.rate_model import ProtocolParams, RatePoint, rate_from_counts

CHUNK_ROUNDS = 1 << 16


@dataclass(frozen=True)
class ChannelModel:
    kind: Literal["ideal", "phase_flip", "position_dephase"] = "ideal"
    p: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("ideal", "phase_flip", "position_dephase"):
            raise ValueError(f"unknown channel kind {self.kind!r}")
        if not 0 <= self.p <= 1:
            raise ValueError(f"channel parameter must be a probability, got {self.p}")

    def expected_error_rate(self) -> float:
        if self.kind == "phase_flip":
            return 2 * self.p * (1 - self.p)
        if self.kind == "position_dephase":
            return self.p / 2
        return 0.0


@dataclass(frozen=True)
class SimConfig:
    L: int
    mu: float
    eta: float
    rounds: int
    sample_fraction: float = 0.5
    channel: ChannelModel = ChannelModel()
    seed: int = 0
    # False pins the common phase to 0; the draw is still consumed
    randomize_common_phase: bool = True

    def __post_init__(self) -> None:
        if self.L < 3:
            raise ValueError(f"L must be >= 3, got {self.L}")
        if self.mu < 0 or not 0 <= self.eta <= 1:
            raise ValueError("need mu >= 0 and 0 <= eta <= 1")
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")
        if not 0 < self.sample_fraction < 1:
            raise ValueError(f"sample_fraction must lie in (0, 1), got {self.sample_fraction}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class SimStats:
    emitted: int
    detected: int
    sampled: int
    errors_in_sample: int
    sifted_bits_alice: np.ndarray
    sifted_bits_bob: np.ndarray
    seed_used: int

    @property
    def q_emp(self) -> float:
        return self.detected / self.emitted if self.emitted else 0.0

    @property
    def e_emp(self) -> float:
        return self.errors_in_sample / self.sampled if self.sampled else 0.0

    def as_dict(self) -> dict:
        return {
            "emitted": self.emitted,
            "detected": self.detected,
            "q_emp": self.q_emp,
            "sampled": self.sampled,
            "errors_in_sample": self.errors_in_sample,
            "e_emp": self.e_emp,
            "sifted_bits_alice": "".join(map(str, self.sifted_bits_alice.tolist())),
            "sifted_bits_bob": "".join(map(str, self.sifted_bits_bob.tolist())),
            "seed_used": self.seed_used,
        }


def outcome_table(L: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Index arrays ``(k, l, s_B)`` enumerating the ``2 * C(L, 2)`` outcomes."""
    pairs = list(itertools.combinations(range(L), 2))
    k = np.array([p[0] for p in pairs for _ in (0, 1)])
    l = np.array([p[1] for p in pairs for _ in (0, 1)])
    s_b = np.tile([0, 1], len(pairs))
    return k, l, s_b


def outcome_probabilities(psi: np.ndarray) -> np.ndarray:
    """Step-(iii) outcome probabilities for one state or a batch (last axis = L)."""
    psi = np.asarray(psi, dtype=float)
    L = psi.shape[-1]
    k, l, s_b = outcome_table(L)
    sign = 1.0 - 2.0 * s_b
    amp = psi[..., k] + sign * psi[..., l]
    return amp * amp / (2.0 * (L - 1))


def alice_emit(L: int, rng: np.random.Generator) -> tuple[np.ndarray, float]:
    """Phase bits ``s`` and the common phase ``delta``.

    ``delta`` is returned for completeness; no statistic depends on it.
    """
    s = rng.integers(0, 2, size=L, dtype=np.int8)
    delta = float(rng.uniform(0.0, 2.0 * math.pi))
    return s, delta


def channel_photon_count(L: int, mu: float, eta: float, rng: np.random.Generator) -> int:
    if mu < 0 or eta < 0:
        raise ValueError("mu and eta must be nonnegative")
    return int(rng.poisson(L * mu * eta))


def _apply_channel(amps: np.ndarray, channel: ChannelModel, rng: np.random.Generator) -> np.ndarray:
    n, L = amps.shape
    if channel.kind == "phase_flip" and channel.p > 0:
        flips = rng.random((n, L)) < channel.p
        amps = np.where(flips, -amps, amps)
    elif channel.kind == "position_dephase" and channel.p > 0:
        collapse = rng.random(n) < channel.p
        where = rng.integers(0, L, size=n)
        if np.any(collapse):
            amps = amps.copy()
            amps[collapse] = 0.0
            amps[np.flatnonzero(collapse), where[collapse]] = 1.0
    return amps


def single_photon_state(s: np.ndarray, channel: ChannelModel, rng: np.random.Generator) -> np.ndarray:
    """Unit L-vector for one photon spread over the block with phases ``(-1)**s``."""
    s = np.asarray(s)
    amps = ((1.0 - 2.0 * s) / math.sqrt(s.size))[None, :]
    return _apply_channel(amps, channel, rng)[0]


def bob_measure_batch(psis: np.ndarray, rng: np.random.Generator):
    """Vectorized three-step measurement.

    Returns ``(success, k, l, s_B)`` arrays; entries of k/l/s_B are -1 on failure.
    """
    psis = np.atleast_2d(np.asarray(psis, dtype=float))
    norms = np.linalg.norm(psis, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-9):
        raise ValueError("input states must have unit norm")
    n, L = psis.shape
    success = rng.random(n) < 0.5
    probs = outcome_probabilities(psis[success])
    cdf = np.cumsum(probs, axis=1)
    u = rng.random(probs.shape[0]) * cdf[:, -1]
    idx = np.minimum((cdf < u[:, None]).sum(axis=1), probs.shape[1] - 1)
    k_tab, l_tab, s_tab = outcome_table(L)
    k = np.full(n, -1)
    l = np.full(n, -1)
    s_b = np.full(n, -1)
    k[success] = k_tab[idx]
    l[success] = l_tab[idx]
    s_b[success] = s_tab[idx]
    return success, k, l, s_b


def bob_measure(psi: np.ndarray, rng: np.random.Generator) -> Optional[tuple[tuple[int, int], int]]:
    """One measurement: ``None`` on failure, else ``((k, l), s_B)`` with k < l (0-based)."""
    success, k, l, s_b = bob_measure_batch(np.asarray(psi)[None, :], rng)
    if not success[0]:
        return None
    return (int(k[0]), int(l[0])), int(s_b[0])


def _run_chunk(cfg: SimConfig, n: int, rng: np.random.Generator):
    L = cfg.L
    s = rng.integers(0, 2, size=(n, L), dtype=np.int8)
    delta = rng.uniform(0.0, 2.0 * math.pi, size=n)
    if not cfg.randomize_common_phase:
        delta[:] = 0.0
    # delta multiplies every amplitude of a fixed-photon-number block by the
    # same phase, so it never enters the single-photon statistics below
    counts = rng.poisson(L * cfg.mu * cfg.eta, size=n)
    single = counts == 1
    s1 = s[single]
    amps = (1.0 - 2.0 * s1.astype(float)) / math.sqrt(L)
    psis = _apply_channel(amps, cfg.channel, rng)
    success, k, l, s_b = bob_measure_batch(psis.reshape(-1, L), rng)
    s_det = s1[success]
    rows = np.arange(len(s_det))
    alice = (s_det[rows, k[success]] ^ s_det[rows, l[success]]).astype(np.int8)
    bob = s_b[success].astype(np.int8)
    sampled = rng.random(len(alice)) < cfg.sample_fraction
    return (
        len(alice),
        int(sampled.sum()),
        int((alice[sampled] != bob[sampled]).sum()),
        alice[~sampled],
        bob[~sampled],
    )


def run_rounds(cfg: SimConfig) -> SimStats:
    detected = sampled = errors = 0
    keys_a, keys_b = [], []
    n_chunks = -(-cfg.rounds // CHUNK_ROUNDS)
    for chunk in range(n_chunks):
        n = min(CHUNK_ROUNDS, cfg.rounds - chunk * CHUNK_ROUNDS)
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(chunk,)))
        d, smp, err, ka, kb = _run_chunk(cfg, n, rng)
        detected += d
        sampled += smp
        errors += err
        keys_a.append(ka)
        keys_b.append(kb)
    return SimStats(
        emitted=cfg.rounds,
        detected=detected,
        sampled=sampled,
        errors_in_sample=errors,
        sifted_bits_alice=np.concatenate(keys_a) if keys_a else np.zeros(0, np.int8),
        sifted_bits_bob=np.concatenate(keys_b) if keys_b else np.zeros(0, np.int8),
        seed_used=cfg.seed,
    )


def strict_detection_rate(L: int, mu: float, eta: float) -> float:
    """Detection probability of the simulator: exactly one photon, then the 1/2 coin."""
    x = L * mu * eta
    return 0.5 * x * math.exp(-x)


def estimate_rate_from_sim(stats: SimStats, p: ProtocolParams, monitored: bool = True) -> RatePoint:
    """Key rate with the empirical detection and error rates plugged in."""
    if stats.sampled == 0:
        raise DegenerateInputError("no sampled rounds; empirical error rate undefined")
    return rate_from_counts(p, stats.q_emp, e=min(stats.e_emp, 0.5), monitored=monitored)
