"""
End-to-end reception statistics of the one-shot link.

Conditioned on the transmitted bit, a molecule of the population is counted
at the receiver when three independent events line up: it starts inside the
illuminated interval (probability p_tx), it switches while the light is on
(switch probability), and it sits inside the counting window at the sampling
time (hit probability). Thinning a binomial keeps it binomial, so the counts
after each stage follow Binomial(n_sys, p) with the per-stage p below.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .channel import ChannelModel, hit_probability
from .config import SystemConfig
from .photochem import SwitchingModel, switch_probability

# per-trial sampling is exact but O(n) memory per draw; above this trial
# count fall back to the generator's binomial sampler
_BERNOULLI_MAX_TRIALS = 10_000
_CHUNK_BUDGET = 1 << 24  # uniforms held in memory at once


class Stage(enum.Enum):
    """Progress of a molecule through the reception chain."""

    AT_TX = "at_tx"          # inside the illuminated interval at modulation time
    SWITCHED = "switched"    # flipped to the fluorescent state
    RECEIVED = "received"    # inside the counting window at the sampling time


@dataclass(frozen=True)
class ReceptionDistribution:
    """Binomial(trials_n, success_p) count distribution after a stage."""

    trials_n: int
    success_p: float
    stage: Stage

    def __post_init__(self) -> None:
        if self.trials_n < 0:
            raise ValueError("trials_n must be non-negative")
        if not 0.0 <= self.success_p <= 1.0:
            raise ValueError("success_p must be in [0, 1]")

    @property
    def mean(self) -> float:
        return self.trials_n * self.success_p

    @property
    def variance(self) -> float:
        return self.trials_n * self.success_p * (1.0 - self.success_p)


def _switch_p(cfg: SystemConfig, irradiance: float | None) -> float:
    model = SwitchingModel.from_config(cfg, irradiance=irradiance)
    return switch_probability(model, cfg.n_sys * cfg.p_tx)


def at_tx_distribution(cfg: SystemConfig) -> ReceptionDistribution:
    """Count of molecules that start inside the illuminated interval."""
    return ReceptionDistribution(cfg.n_sys, cfg.p_tx, Stage.AT_TX)


def switched_distribution(
    cfg: SystemConfig, s: int = 1, irradiance: float | None = None
) -> ReceptionDistribution:
    """Count of molecules switched by the transmitter for bit s."""
    if s not in (0, 1):
        raise ValueError("s must be 0 or 1")
    p = cfg.p_tx * _switch_p(cfg, irradiance) if s else 0.0
    return ReceptionDistribution(cfg.n_sys, p, Stage.SWITCHED)


def reception_probability(
    cfg: SystemConfig,
    s: int = 1,
    t: float | None = None,
    irradiance: float | None = None,
    hit_p: float | None = None,
) -> float:
    """Per-molecule probability of being counted at the sampling time.

    t defaults to the configured sampling time. hit_p, when given, replaces
    the transport factor with an externally supplied value (power sweeps
    against a fixed channel use this).
    """
    if s not in (0, 1):
        raise ValueError("s must be 0 or 1")
    if s == 0:
        return 0.0
    if hit_p is None:
        when = cfg.t_s if t is None else t
        hit_p = hit_probability(ChannelModel.from_config(cfg), when)
    elif not 0.0 <= hit_p <= 1.0:
        raise ValueError("hit_p must be in [0, 1]")
    return cfg.p_tx * _switch_p(cfg, irradiance) * hit_p


def received_distribution(
    cfg: SystemConfig,
    s: int = 1,
    t: float | None = None,
    irradiance: float | None = None,
    hit_p: float | None = None,
) -> ReceptionDistribution:
    """Count of molecules inside the counting window at the sampling time."""
    p = reception_probability(cfg, s=s, t=t, irradiance=irradiance, hit_p=hit_p)
    return ReceptionDistribution(cfg.n_sys, p, Stage.RECEIVED)


def received_count_pmf(dist: ReceptionDistribution, k) -> np.ndarray | float:
    """Binomial pmf of dist at integer count(s) k, evaluated in log space.

    Stable for trial counts far beyond where factorials overflow. k must lie
    in [0, trials_n].
    """
    k_arr = np.asarray(k, dtype=float)
    n = dist.trials_n
    p = dist.success_p

    if k_arr.size and (
        np.any(k_arr < 0) or np.any(k_arr > n) or np.any(k_arr != np.floor(k_arr))
    ):
        raise ValueError(f"k must be an integer in [0, {n}]")
    if p == 0.0:
        out = np.where(k_arr == 0, 1.0, 0.0)
    elif p == 1.0:
        out = np.where(k_arr == n, 1.0, 0.0)
    else:
        log_pmf = (
            gammaln(n + 1.0) - gammaln(k_arr + 1.0) - gammaln(n - k_arr + 1.0)
            + k_arr * np.log(p) + (n - k_arr) * np.log1p(-p)
        )
        out = np.exp(log_pmf)
    if np.isscalar(k) or np.ndim(k) == 0:
        return float(out)
    return out


def sample_received_count(
    dist: ReceptionDistribution, rng: np.random.Generator, size: int | None = None
):
    """Draw counts from dist.

    Small populations are sampled per trial (one uniform per molecule), the
    same event structure as the particle simulation; large populations use
    the generator's binomial sampler. Either path is exact.
    """
    n_draws = 1 if size is None else int(size)
    if n_draws < 0:
        raise ValueError("size must be non-negative")
    n = dist.trials_n
    p = dist.success_p

    if n == 0 or n > _BERNOULLI_MAX_TRIALS:
        counts = rng.binomial(n, p, size=n_draws)
    else:
        counts = np.empty(n_draws, dtype=np.int64)
        rows_per_chunk = max(1, _CHUNK_BUDGET // max(n, 1))
        start = 0
        while start < n_draws:
            stop = min(start + rows_per_chunk, n_draws)
            u = rng.random((stop - start, n))
            counts[start:stop] = (u < p).sum(axis=1)
            start = stop
    if size is None:
        return int(counts[0])
    return counts


@dataclass(frozen=True)
class TxNoiseStats:
    """Moments of the transmitter noise: the deviation of the switched count
    from its expectation. Zero mean by construction; the variance is the
    binomial variance of the switched count."""

    mean: float
    variance: float


def tx_noise_stats(
    cfg: SystemConfig, s: int = 1, irradiance: float | None = None
) -> TxNoiseStats:
    dist = switched_distribution(cfg, s=s, irradiance=irradiance)
    return TxNoiseStats(mean=0.0, variance=dist.variance)
