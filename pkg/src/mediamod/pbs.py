"""
Particle-based Monte-Carlo simulation of the link.

Each realization places the molecule population uniformly along the duct
axis, applies the transmitter's switching as a single Bernoulli event per
molecule at the start of the symbol (the molecules are effectively static
while the light is on), then propagates every molecule with independent
Gaussian steps: dz = v*dt + sqrt(2*D*dt)*g. The axial domain is unbounded;
the observed subvolume is a counting window, not a walled box, so molecules
may drift past its edges.

States never change after modulation, so the Gaussian increments between two
record times can be drawn as one coalesced jump with the summed variance.
That path is statistically identical to per-step propagation and is the
default; per-step propagation remains available for cross-checks.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .photochem import SwitchingModel, switch_probability

_GRID_RTOL = 1e-9


class MoleculeState(enum.IntEnum):
    STATE_B = 0   # ground state, not fluorescent at the readout wavelength
    STATE_A = 1   # switched state, counted by the receiver


@dataclass(frozen=True)
class Molecule:
    """Read-only snapshot of one molecule."""

    z: float
    state: MoleculeState


@dataclass
class Population:
    """Positions and states of every signaling molecule in one realization."""

    z: np.ndarray       # float64, axial positions [m]
    state: np.ndarray   # int8, MoleculeState values

    def __len__(self) -> int:
        return self.z.shape[0]

    def __getitem__(self, i: int) -> Molecule:
        return Molecule(z=float(self.z[i]), state=MoleculeState(int(self.state[i])))


def init_population(cfg: SystemConfig, rng: np.random.Generator) -> Population:
    """Uniform positions over the observed subvolume, everything in state B."""
    z = rng.random(cfg.n_sys) * cfg.duct.sys_length
    state = np.full(cfg.n_sys, MoleculeState.STATE_B, dtype=np.int8)
    return Population(z=z, state=state)


def apply_modulation(
    pop: Population,
    cfg: SystemConfig,
    s: int,
    p_switch: float,
    rng: np.random.Generator,
) -> int:
    """Switch molecules inside the illuminated interval for bit s.

    Always draws one uniform per molecule, so runs for s = 0 and s = 1 from
    identical generator states stay aligned step for step. Returns the number
    of molecules switched.
    """
    if s not in (0, 1):
        raise ValueError("s must be 0 or 1")
    if not 0.0 <= p_switch <= 1.0:
        raise ValueError("p_switch must be in [0, 1]")
    u = rng.random(len(pop))
    flip = (
        (pop.z >= cfg.tx.z_a) & (pop.z <= cfg.tx.z_b) & (u < s * p_switch)
    )
    pop.state[flip] = MoleculeState.STATE_A
    return int(np.count_nonzero(flip))


def step(pop: Population, cfg: SystemConfig, dt: float, rng: np.random.Generator) -> None:
    """Advance every molecule by one Gaussian increment of duration dt."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    g = rng.standard_normal(len(pop))
    sigma = np.where(
        pop.state == MoleculeState.STATE_A,
        math.sqrt(2.0 * cfg.molecule.diff_a * dt),
        math.sqrt(2.0 * cfg.molecule.diff_b * dt),
    )
    pop.z += cfg.flow_v * dt + sigma * g


def count_state_a_in_rx(pop: Population, cfg: SystemConfig) -> int:
    """Number of switched molecules inside the counting window."""
    hit = (
        (pop.state == MoleculeState.STATE_A)
        & (pop.z >= cfg.rx.z_a)
        & (pop.z <= cfg.rx.z_b)
    )
    return int(np.count_nonzero(hit))


def _assert_on_grid(t: float, dt: float, what: str) -> int:
    k = round(t / dt)
    if k < 0 or abs(k * dt - t) > _GRID_RTOL * max(abs(t), dt):
        raise ValueError(f"{what} {t!r} is not a non-negative multiple of dt={dt!r}")
    return k


@dataclass(frozen=True)
class PbsEnsemble:
    """Run plan for a batch of realizations."""

    realizations: int
    dt: float                        # s, propagation step
    record_times: tuple[float, ...]  # s, strictly increasing, multiples of dt
    seed: int | None = None          # None: fall back to the config seed

    def __post_init__(self) -> None:
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if not self.record_times:
            raise ValueError("record_times must not be empty")
        if any(b <= a for a, b in zip(self.record_times, self.record_times[1:])):
            raise ValueError("record_times must be strictly increasing")
        for t in self.record_times:
            _assert_on_grid(t, self.dt, "record time")

    @property
    def horizon(self) -> float:
        return self.record_times[-1]

    @classmethod
    def from_config(cls, cfg: SystemConfig) -> "PbsEnsemble":
        """Default plan: all configured realizations, one record at the
        sampling time."""
        return cls(
            realizations=cfg.n_realizations,
            dt=cfg.pbs_dt,
            record_times=(cfg.t_s,),
            seed=cfg.seed,
        )


@dataclass(frozen=True)
class EnsembleStats:
    """Per-record-time statistics over all realizations."""

    times: np.ndarray        # (T,) record times
    mean_rx: np.ndarray      # (T,) mean switched count in the window
    stderr_rx: np.ndarray    # (T,) standard error of mean_rx
    counts_rx: np.ndarray    # (R, T) per-realization counts, int64
    n_switched: np.ndarray   # (R,) molecules switched per realization
    sample_index: int        # column of counts_rx holding the sampling time

    @property
    def counts_at_sampling_time(self) -> np.ndarray:
        return self.counts_rx[:, self.sample_index]

    @property
    def pmf_at_sampling_time(self) -> np.ndarray:
        """Empirical pmf of the count at the sampling time (index = count)."""
        return empirical_pmf(self.counts_at_sampling_time)


def empirical_pmf(counts: np.ndarray, n_max: int | None = None) -> np.ndarray:
    """Relative frequency of each count value 0..n_max."""
    counts = np.asarray(counts, dtype=np.int64)
    if counts.size == 0:
        raise ValueError("counts must not be empty")
    top = int(counts.max()) if n_max is None else int(n_max)
    freq = np.bincount(counts, minlength=top + 1).astype(float)
    if freq.shape[0] > top + 1:
        raise ValueError("counts exceed n_max")
    return freq / counts.size


def run_ensemble(
    cfg: SystemConfig,
    s: int,
    ensemble: PbsEnsemble,
    exact_jumps: bool = True,
    irradiance: float | None = None,
) -> EnsembleStats:
    """Simulate the ensemble and return count statistics at the record times.

    The record grid must contain the configured sampling time, where the
    count distribution is collected. Every realization gets its own child
    generator spawned from the master seed, so results do not depend on
    execution order and any single realization can be reproduced in
    isolation. The switch probability is evaluated once at the expected
    illuminated count, matching the analytic chain.
    """
    model = SwitchingModel.from_config(cfg, irradiance=irradiance)
    p_switch = switch_probability(model, cfg.n_sys * cfg.p_tx)

    times = np.asarray(ensemble.record_times, dtype=float)
    n_times = times.shape[0]
    tol = _GRID_RTOL * max(cfg.t_s, ensemble.dt)
    at_ts = np.nonzero(np.abs(times - cfg.t_s) <= tol)[0]
    if at_ts.size == 0:
        raise ValueError(
            f"record_times must include the sampling time {cfg.t_s!r}"
        )
    sample_index = int(at_ts[0])
    seed = cfg.seed if ensemble.seed is None else ensemble.seed
    children = np.random.SeedSequence(seed).spawn(ensemble.realizations)

    counts = np.empty((ensemble.realizations, n_times), dtype=np.int64)
    switched = np.empty(ensemble.realizations, dtype=np.int64)

    steps_to = [_assert_on_grid(t, ensemble.dt, "record time") for t in ensemble.record_times]

    for r, child in enumerate(children):
        rng = np.random.default_rng(child)
        pop = init_population(cfg, rng)
        switched[r] = apply_modulation(pop, cfg, s, p_switch, rng)
        done = 0
        for j, target in enumerate(steps_to):
            gap = target - done
            if gap > 0:
                if exact_jumps:
                    step(pop, cfg, gap * ensemble.dt, rng)
                else:
                    for _ in range(gap):
                        step(pop, cfg, ensemble.dt, rng)
            counts[r, j] = count_state_a_in_rx(pop, cfg)
            done = target

    mean = counts.mean(axis=0)
    if ensemble.realizations > 1:
        stderr = counts.std(axis=0, ddof=1) / math.sqrt(ensemble.realizations)
    else:
        stderr = np.zeros(n_times)
    return EnsembleStats(
        times=times, mean_rx=mean, stderr_rx=stderr,
        counts_rx=counts, n_switched=switched, sample_index=sample_index,
    )
