"""
Analytical models and particle-based simulation for a media-modulation
molecular communication link: photochemical switching at the transmitter,
diffusion-advection transport to a transparent counting receiver, binomial
reception statistics, and the resulting one-shot bit error rate.
"""

from .config import (
    CONSTANTS,
    ConfigError,
    DuctGeometry,
    MoleculeParams,
    PhysicalConstants,
    RxConfig,
    SystemConfig,
    TxConfig,
    ValidityReport,
    load_config,
    serialize_config,
    validate_config,
    validate_static_assumption,
)
from .photochem import (
    SwitchingModel,
    integrate_switching_ode,
    photon_energy,
    photon_flux,
    state_b_population,
    switch_probability,
)
from .channel import (
    ChannelModel,
    expected_cir,
    hit_probability,
    hit_probability_quadrature,
    point_kernel,
)
from .stats import (
    ReceptionDistribution,
    Stage,
    TxNoiseStats,
    at_tx_distribution,
    received_count_pmf,
    received_distribution,
    reception_probability,
    sample_received_count,
    switched_distribution,
    tx_noise_stats,
)
from .detect import (
    BerEstimate,
    DetectorConfig,
    ber_analytic,
    ber_empirical,
    detect,
)
from .pbs import (
    EnsembleStats,
    Molecule,
    MoleculeState,
    PbsEnsemble,
    Population,
    apply_modulation,
    count_state_a_in_rx,
    empirical_pmf,
    init_population,
    run_ensemble,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS",
    "ConfigError",
    "DuctGeometry",
    "MoleculeParams",
    "PhysicalConstants",
    "RxConfig",
    "SystemConfig",
    "TxConfig",
    "ValidityReport",
    "load_config",
    "serialize_config",
    "validate_config",
    "validate_static_assumption",
    "SwitchingModel",
    "integrate_switching_ode",
    "photon_energy",
    "photon_flux",
    "state_b_population",
    "switch_probability",
    "ChannelModel",
    "expected_cir",
    "hit_probability",
    "hit_probability_quadrature",
    "point_kernel",
    "ReceptionDistribution",
    "Stage",
    "TxNoiseStats",
    "at_tx_distribution",
    "received_count_pmf",
    "received_distribution",
    "reception_probability",
    "sample_received_count",
    "switched_distribution",
    "tx_noise_stats",
    "BerEstimate",
    "DetectorConfig",
    "ber_analytic",
    "ber_empirical",
    "detect",
    "EnsembleStats",
    "Molecule",
    "MoleculeState",
    "PbsEnsemble",
    "Population",
    "apply_modulation",
    "count_state_a_in_rx",
    "empirical_pmf",
    "init_population",
    "run_ensemble",
    "step",
    "__version__",
]
