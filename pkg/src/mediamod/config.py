"""
Experiment configuration for the media-modulation link simulator.

All parameters are SI. A configuration is described by a flat ``key = value``
text document; omitted keys fall back to the default duct/molecule parameter
set. Loading validates every physical invariant (positive geometry, receiver
downstream of the transmitter, intervals inside the system volume, ...) so
that downstream modules can assume a consistent :class:`SystemConfig`.

The configuration is immutable after construction and safe to share across
concurrent workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace


class ConfigError(ValueError):
    """Malformed configuration text or violated parameter invariant."""


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA-exact constants. Not overridable through the config file."""

    planck: float = 6.62607015e-34     # J*s
    light_speed: float = 299792458.0   # m/s
    avogadro: float = 6.02214076e23    # 1/mol


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class DuctGeometry:
    height: float = 1e-3       # m, duct height (also the photon path length)
    width: float = 1e-3        # m, duct width
    sys_length: float = 0.5    # m, axial extent of the observed subvolume

    @property
    def v_sys(self) -> float:
        """Volume of the observed subvolume [m^3]."""
        return self.width * self.height * self.sys_length


@dataclass(frozen=True)
class TxConfig:
    z_a: float = 0.1                   # m, upstream edge of the illuminated interval
    z_b: float = 0.15                  # m, downstream edge
    irradiance_on: float = 1e3         # W/m^2, input power density for bit 1
    irradiation_time: float = 5e-3     # s, illumination duration per symbol
    wavelength_ba: float = 365e-9      # m, switch-on wavelength (state B -> A)

    @property
    def length(self) -> float:
        """Axial extent of the illuminated interval [m]."""
        return self.z_b - self.z_a


@dataclass(frozen=True)
class RxConfig:
    z_a: float = 0.3                   # m, upstream edge of the counting window
    z_b: float = 0.35                  # m, downstream edge
    wavelength_fluor_in: float = 515e-9   # m, readout excitation (metadata)
    wavelength_fluor_out: float = 529e-9  # m, fluorescence emission (metadata)

    @property
    def length(self) -> float:
        return self.z_b - self.z_a


@dataclass(frozen=True)
class MoleculeParams:
    diff_a: float = 1e-10              # m^2/s, diffusion coefficient, state A
    diff_b: float = 1e-10              # m^2/s, diffusion coefficient, state B
    molar_absorption: float = 8.3e3    # m^2/mol, molar absorption coefficient
    quantum_yield: float = 0.41        # switched molecules per absorbed photon
    wavelength_ab: float = 405e-9      # m, erase wavelength A -> B (metadata)


@dataclass(frozen=True)
class SystemConfig:
    """Complete, validated description of one link experiment."""

    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    duct: DuctGeometry = field(default_factory=DuctGeometry)
    tx: TxConfig = field(default_factory=TxConfig)
    rx: RxConfig = field(default_factory=RxConfig)
    molecule: MoleculeParams = field(default_factory=MoleculeParams)
    flow_v: float = 0.01               # m/s, uniform axial flow velocity
    n_sys: int = 1000                  # signaling molecules in the subvolume
    pbs_dt: float = 1e-2               # s, particle-simulation time step
    n_realizations: int = 10000        # Monte-Carlo realizations per ensemble
    seed: int = 12345                  # master seed for all stochastic runs

    @property
    def area_tx(self) -> float:
        """Illuminated duct surface area [m^2]."""
        return self.tx.length * self.duct.width

    @property
    def v_tx(self) -> float:
        """Illuminated volume [m^3]."""
        return self.duct.width * self.duct.height * self.tx.length

    @property
    def p_tx(self) -> float:
        """Probability that a uniformly placed molecule starts inside the
        illuminated interval: v_tx / v_sys."""
        return self.v_tx / self.duct.v_sys

    @property
    def d(self) -> float:
        """Center-to-center transmitter/receiver distance [m]."""
        return (self.rx.z_b + self.rx.z_a) / 2.0 - (self.tx.z_b + self.tx.z_a) / 2.0

    @property
    def t_s(self) -> float:
        """Sampling time d / flow_v [s]: the mean transit time from the
        illuminated interval to the counting window."""
        return self.d / self.flow_v


@dataclass(frozen=True)
class ValidityReport:
    """Outcome of the static-molecule check (see validate_static_assumption)."""

    lhs: float     # m, diffusion + drift displacement during illumination
    rhs: float     # m, axial extent of the illuminated interval
    ratio: float   # lhs / rhs
    ok: bool


# Canonical key order. Each entry: key -> (section, attribute, converter).
_FLOAT_KEYS = {
    "sys_length": ("duct", "sys_length"),
    "height": ("duct", "height"),
    "width": ("duct", "width"),
    "z_a_tx": ("tx", "z_a"),
    "z_b_tx": ("tx", "z_b"),
    "irradiance_on": ("tx", "irradiance_on"),
    "irradiation_time": ("tx", "irradiation_time"),
    "wavelength_ba": ("tx", "wavelength_ba"),
    "z_a_rx": ("rx", "z_a"),
    "z_b_rx": ("rx", "z_b"),
    "wavelength_fluor_in": ("rx", "wavelength_fluor_in"),
    "wavelength_fluor_out": ("rx", "wavelength_fluor_out"),
    "diff_a": ("molecule", "diff_a"),
    "diff_b": ("molecule", "diff_b"),
    "molar_absorption": ("molecule", "molar_absorption"),
    "quantum_yield": ("molecule", "quantum_yield"),
    "wavelength_ab": ("molecule", "wavelength_ab"),
    "flow_v": (None, "flow_v"),
    "pbs_dt": (None, "pbs_dt"),
}

_INT_KEYS = {
    "n_sys": (None, "n_sys"),
    "n_realizations": (None, "n_realizations"),
    "seed": (None, "seed"),
}

KNOWN_KEYS = tuple(_FLOAT_KEYS) + tuple(_INT_KEYS)


def parse_document(text: str) -> dict[str, str]:
    """Parse a flat ``key = value`` document into a raw string mapping.

    Blank lines and ``#`` comments are skipped. Unknown keys, duplicate keys,
    and lines without ``=`` are rejected.
    """
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _FLOAT_KEYS and key not in _INT_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        raw[key] = value
    return raw


def _convert(key: str, value: str) -> float | int:
    try:
        x = float(value)
    except ValueError:
        raise ConfigError(f"key {key!r}: cannot parse {value!r} as a number") from None
    if not math.isfinite(x):
        raise ConfigError(f"key {key!r}: value must be finite, got {value!r}")
    if key in _INT_KEYS:
        if x != int(x):
            raise ConfigError(f"key {key!r}: expected an integer, got {value!r}")
        return int(x)
    return x


def build_config(mapping: dict[str, str]) -> SystemConfig:
    """Build and validate a SystemConfig from a raw key/value mapping.

    ``diff_b`` follows ``diff_a`` when not set explicitly (the molecule is
    assumed to keep its size when its state changes).
    """
    values: dict[str, float | int] = {k: _convert(k, v) for k, v in mapping.items()}
    for key in mapping:
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r}")
    if "diff_a" in values and "diff_b" not in values:
        values["diff_b"] = values["diff_a"]

    cfg = SystemConfig()
    sections: dict[str, object] = {
        "duct": cfg.duct, "tx": cfg.tx, "rx": cfg.rx, "molecule": cfg.molecule,
    }
    top: dict[str, float | int] = {}
    for key, value in values.items():
        section, attr = (_FLOAT_KEYS | _INT_KEYS)[key]
        if section is None:
            top[attr] = value
        else:
            sections[section] = replace(sections[section], **{attr: value})
    cfg = replace(
        cfg,
        duct=sections["duct"], tx=sections["tx"], rx=sections["rx"],
        molecule=sections["molecule"], **top,
    )
    validate_config(cfg)
    return cfg


def load_config(text: str) -> SystemConfig:
    """Load a SystemConfig from configuration text (empty text -> defaults)."""
    return build_config(parse_document(text))


def _require(ok: bool, name: str, predicate: str) -> None:
    if not ok:
        raise ConfigError(f"invariant violation: {name} must satisfy {predicate}")


def validate_config(cfg: SystemConfig) -> None:
    """Check every parameter invariant; raise ConfigError naming the field."""
    _require(cfg.duct.height > 0, "height", "> 0")
    _require(cfg.duct.width > 0, "width", "> 0")
    _require(cfg.duct.sys_length > 0, "sys_length", "> 0")

    _require(cfg.tx.z_a >= 0, "z_a_tx", ">= 0")
    _require(cfg.tx.z_a < cfg.tx.z_b, "z_a_tx", "< z_b_tx")
    _require(cfg.tx.irradiance_on >= 0, "irradiance_on", ">= 0")
    _require(cfg.tx.irradiation_time > 0, "irradiation_time", "> 0")
    _require(cfg.tx.wavelength_ba > 0, "wavelength_ba", "> 0")

    _require(cfg.rx.z_a < cfg.rx.z_b, "z_a_rx", "< z_b_rx")
    _require(cfg.rx.z_a >= cfg.tx.z_b, "z_a_rx", ">= z_b_tx (receiver downstream)")
    _require(cfg.rx.wavelength_fluor_in > 0, "wavelength_fluor_in", "> 0")
    _require(cfg.rx.wavelength_fluor_out > 0, "wavelength_fluor_out", "> 0")
    _require(cfg.tx.z_b <= cfg.duct.sys_length, "z_b_tx", "<= sys_length")
    _require(cfg.rx.z_b <= cfg.duct.sys_length, "z_b_rx", "<= sys_length")

    _require(cfg.molecule.diff_a > 0, "diff_a", "> 0")
    _require(cfg.molecule.diff_b > 0, "diff_b", "> 0")
    _require(cfg.molecule.molar_absorption > 0, "molar_absorption", "> 0")
    _require(0 < cfg.molecule.quantum_yield <= 1, "quantum_yield", "in (0, 1]")
    _require(cfg.molecule.wavelength_ab > 0, "wavelength_ab", "> 0")

    _require(cfg.flow_v > 0, "flow_v", "> 0")
    _require(cfg.n_sys >= 1, "n_sys", ">= 1")
    _require(cfg.pbs_dt > 0, "pbs_dt", "> 0")
    _require(cfg.n_realizations >= 1, "n_realizations", ">= 1")
    _require(cfg.seed >= 0, "seed", ">= 0")


def _format_value(x: float | int) -> str:
    return repr(x) if isinstance(x, float) else str(x)


def config_items(cfg: SystemConfig) -> list[tuple[str, float | int]]:
    """All configurable values in canonical key order."""
    sections = {"duct": cfg.duct, "tx": cfg.tx, "rx": cfg.rx, "molecule": cfg.molecule}
    items: list[tuple[str, float | int]] = []
    for key in KNOWN_KEYS:
        section, attr = (_FLOAT_KEYS | _INT_KEYS)[key]
        obj = cfg if section is None else sections[section]
        items.append((key, getattr(obj, attr)))
    return items


def serialize_config(cfg: SystemConfig) -> str:
    """Render cfg as configuration text. load_config(serialize_config(cfg))
    reconstructs an identical SystemConfig (floats round-trip via repr)."""
    lines = [f"{key} = {_format_value(value)}" for key, value in config_items(cfg)]
    return "\n".join(lines) + "\n"


def validate_static_assumption(cfg: SystemConfig, threshold: float = 0.01) -> ValidityReport:
    """Check that molecules barely move while the transmitter is lit.

    The displacement scale during one illumination, diffusion standard
    deviation plus flow drift, must be a small fraction of the illuminated
    interval; otherwise the closed-volume switching model is invalid.
    The default threshold 0.01 operationalizes "much smaller than".
    """
    t_on = cfg.tx.irradiation_time
    lhs = math.sqrt(2.0 * cfg.molecule.diff_b * t_on) + cfg.flow_v * t_on
    rhs = cfg.tx.length
    ratio = lhs / rhs
    return ValidityReport(lhs=lhs, rhs=rhs, ratio=ratio, ok=ratio < threshold)
