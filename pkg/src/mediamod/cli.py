"""
Command line front end.

Subcommands:
  validate          parameter invariants, static-molecule regime, derived values
  switching-curve   switch probability over a power sweep, per illuminated count
  cir               expected count over a time grid, optionally with simulation
  pmf               analytic vs simulated count distribution at the sampling time
  ber               bit error rate over a power sweep, per population size

Output is CSV on stdout (or --out FILE). Every table embeds the fully
resolved configuration as '#' comment lines, and floats are written with
repr, so reruns with identical inputs produce byte-identical files.

Exit codes: 0 ok, 1 a validation check failed, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from .channel import ChannelModel, hit_probability
from .config import (
    ConfigError,
    SystemConfig,
    build_config,
    parse_document,
    serialize_config,
    validate_static_assumption,
)
from .detect import ber_analytic, ber_empirical
from .pbs import PbsEnsemble, empirical_pmf, run_ensemble
from .photochem import SwitchingModel, switch_probability
from .stats import received_count_pmf, received_distribution

CONFIG_ENV_VAR = "MEDIAMOD_CONFIG"

# power sweeps run against a fixed reference channel unless --derived is set
_REFERENCE_HIT = 0.999
_REFERENCE_PTX = 0.1


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _load_cfg(args: argparse.Namespace) -> SystemConfig:
    path = args.config or os.environ.get(CONFIG_ENV_VAR)
    mapping: dict[str, str] = {}
    if path:
        mapping = parse_document(Path(path).read_text())
    for item in args.set or []:
        key, sep, value = item.partition("=")
        if not sep or not key.strip() or not value.strip():
            raise ConfigError(f"--set expects key=value, got {item!r}")
        mapping[key.strip()] = value.strip()
    if args.seed is not None:
        mapping["seed"] = str(args.seed)
    return build_config(mapping)


def _emit(args: argparse.Namespace, cfg: SystemConfig, columns: list[str],
          rows: list[tuple], footer: list[str] | None = None) -> None:
    lines = [f"# {line}" for line in serialize_config(cfg).splitlines()]
    lines.append(",".join(columns))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    lines.extend(footer or [])
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _power_grid(args: argparse.Namespace) -> list[float]:
    if args.power:
        if any(p < 0 for p in args.power):
            raise ConfigError("--power values must be non-negative")
        if any(b <= a for a, b in zip(args.power, args.power[1:])):
            raise ConfigError("--power values must be strictly increasing")
        return list(args.power)
    if args.p_min <= 0 or args.p_max <= 0:
        raise ConfigError("power bounds must be positive")
    if args.p_max < args.p_min:
        raise ConfigError("--p-max must be >= --p-min")
    if args.points < 1:
        raise ConfigError("--points must be >= 1")
    grid = np.logspace(math.log10(args.p_min), math.log10(args.p_max), args.points)
    return [float(p) for p in grid]


def _cmd_validate(cfg: SystemConfig, args: argparse.Namespace) -> int:
    report = validate_static_assumption(cfg, threshold=args.threshold)
    model = SwitchingModel.from_config(cfg)
    n_tx = cfg.n_sys * cfg.p_tx
    p_one = switch_probability(model, 1.0)
    p_exp = switch_probability(model, n_tx)
    # relative shift of p_switch when all expected molecules compete
    margin = abs(p_exp - p_one) / p_one if p_one > 0 else 0.0
    independent = margin < 0.01

    print(f"displacement_during_illumination = {report.lhs!r} m")
    print(f"illuminated_interval = {report.rhs!r} m")
    print(f"ratio = {report.ratio!r} (threshold {args.threshold!r})")
    print(f"static_assumption = {'ok' if report.ok else 'violated'}")
    print(f"p_tx = {cfg.p_tx!r}")
    print(f"sampling_time = {cfg.t_s!r} s")
    print(f"absorption_scale = {model.absorption_scale!r}")
    print(f"photon_flux_at_irradiance_on = {model.flux!r} 1/s")
    print(f"switch_independence_margin = {margin!r}")
    print(f"switch_independence = {'ok' if independent else 'violated'}")
    return 0 if (report.ok and independent) else 1


def _cmd_switching_curve(cfg: SystemConfig, args: argparse.Namespace) -> int:
    n_tx_values = args.n_tx or [cfg.n_sys * cfg.p_tx]
    if any(n <= 0 for n in n_tx_values):
        raise ConfigError("--n-tx values must be positive")
    rows = []
    for power in _power_grid(args):
        model = SwitchingModel.from_config(cfg, irradiance=power)
        for n_tx in n_tx_values:
            rows.append((power, n_tx, switch_probability(model, n_tx)))
    _emit(args, cfg, ["power_w_per_m2", "n_tx", "p_switch"], rows)
    return 0


def _cmd_cir(cfg: SystemConfig, args: argparse.Namespace) -> int:
    if args.t_max <= 0 or args.points < 2:
        raise ConfigError("--t-max must be positive and --points >= 2")
    channel = ChannelModel.from_config(cfg)
    model = SwitchingModel.from_config(cfg)
    p_sw = switch_probability(model, cfg.n_sys * cfg.p_tx)
    scale = cfg.n_sys * cfg.p_tx * p_sw
    grid = [float(t) for t in np.linspace(0.0, args.t_max, args.points)]

    columns = ["t_seconds", "h_analytic", "cir_analytic"]
    pbs_stats = None
    if args.pbs:
        ensemble = PbsEnsemble(
            realizations=cfg.n_realizations,
            dt=cfg.pbs_dt,
            record_times=tuple(grid),
            seed=cfg.seed,
        )
        pbs_stats = run_ensemble(cfg, s=1, ensemble=ensemble)
        columns += ["cir_pbs_mean", "cir_pbs_stderr"]

    rows = []
    for j, t in enumerate(grid):
        h = hit_probability(channel, t)
        row = [t, h, scale * h]
        if pbs_stats is not None:
            row += [float(pbs_stats.mean_rx[j]), float(pbs_stats.stderr_rx[j])]
        rows.append(tuple(row))
    _emit(args, cfg, columns, rows)
    return 0


def _cmd_pmf(cfg: SystemConfig, args: argparse.Namespace) -> int:
    ensemble = PbsEnsemble.from_config(cfg)
    stats = run_ensemble(cfg, s=args.s, ensemble=ensemble)
    counts = stats.counts_at_sampling_time
    dist = received_distribution(cfg, s=args.s)
    spread = int(math.ceil(dist.mean + 8.0 * math.sqrt(dist.variance)))
    n_max = min(cfg.n_sys, max(int(counts.max()), spread))
    k = np.arange(n_max + 1)
    analytic = received_count_pmf(dist, k)
    empirical = empirical_pmf(counts, n_max=n_max)
    tv = 0.5 * float(np.abs(analytic - empirical).sum()) + 0.5 * float(1.0 - analytic.sum())
    rows = [(int(ki), float(a), float(e)) for ki, a, e in zip(k, analytic, empirical)]
    _emit(args, cfg, ["k", "pmf_analytic", "pmf_empirical"], rows,
          footer=[f"# tv_distance = {tv!r}", f"# realizations = {ensemble.realizations}"])
    return 0


def _cmd_ber(cfg: SystemConfig, args: argparse.Namespace) -> int:
    if args.theta < 1:
        raise ConfigError("--theta must be >= 1")
    n_sys_values = args.n_sys or [cfg.n_sys]
    if any(n < 1 for n in n_sys_values):
        raise ConfigError("--n-sys values must be >= 1")
    if args.derived:
        p_tx = cfg.p_tx
        hit = hit_probability(ChannelModel.from_config(cfg), cfg.t_s)
    else:
        p_tx = _REFERENCE_PTX
        hit = _REFERENCE_HIT
    rng = np.random.default_rng(cfg.seed)
    columns = ["power_w_per_m2", "n_sys", "p_switch", "p_r", "ber_analytic"]
    if args.trials > 0:
        columns += ["ber_empirical", "ci95_lo", "ci95_hi"]
    rows = []
    for power in _power_grid(args):
        model = SwitchingModel.from_config(cfg, irradiance=power)
        for n_sys in n_sys_values:
            p_sw = switch_probability(model, n_sys * p_tx)
            p_r = p_tx * p_sw * hit
            row = [power, n_sys, p_sw, p_r, ber_analytic(n_sys, p_r, theta=args.theta)]
            if args.trials > 0:
                est = ber_empirical(n_sys, p_r, args.trials, rng, theta=args.theta)
                row += [est.ber, est.ci_low, est.ci_high]
            rows.append(tuple(row))
    mode = "derived" if args.derived else "reference"
    _emit(args, cfg, columns, rows,
          footer=[f"# channel_mode = {mode}", f"# hit_probability = {hit!r}"])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mediamod",
        description="Analytical models and particle simulation of a "
                    "media-modulation molecular communication link.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"config file (or ${CONFIG_ENV_VAR})")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config key (repeatable)")
    common.add_argument("--seed", type=int, help="override the master seed")
    common.add_argument("--out", help="write CSV here instead of stdout")

    power = argparse.ArgumentParser(add_help=False)
    power.add_argument("--p-min", type=float, default=1e3, help="W/m^2 (default 1e3)")
    power.add_argument("--p-max", type=float, default=1e6, help="W/m^2 (default 1e6)")
    power.add_argument("--points", type=int, default=25,
                       help="log-spaced grid size (default 25)")
    power.add_argument("--power", type=float, action="append", metavar="P",
                       help="explicit power value, repeatable (overrides the grid)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common],
                       help="check invariants, the static-molecule regime, "
                            "and switching independence")
    p.add_argument("--threshold", type=float, default=0.01,
                   help="max displacement/interval ratio (default 0.01)")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("switching-curve", parents=[common, power],
                       help="switch probability vs input power")
    p.add_argument("--n-tx", type=float, action="append", metavar="N",
                   help="illuminated molecule count, repeatable "
                        "(default: expected count from the config)")
    p.set_defaults(func=_cmd_switching_curve)

    p = sub.add_parser("cir", parents=[common],
                       help="hit probability and expected count vs time")
    p.add_argument("--t-max", type=float, default=40.0, help="s (default 40)")
    p.add_argument("--points", type=int, default=41, help="grid size (default 41)")
    p.add_argument("--pbs", action="store_true",
                   help="add simulated mean and standard error columns")
    p.set_defaults(func=_cmd_cir)

    p = sub.add_parser("pmf", parents=[common],
                       help="count distribution at the sampling time, "
                            "analytic vs simulated")
    p.add_argument("--s", type=int, default=1, choices=(0, 1),
                   help="transmitted bit (default 1)")
    p.set_defaults(func=_cmd_pmf)

    p = sub.add_parser("ber", parents=[common, power],
                       help="bit error rate vs input power")
    p.add_argument("--n-sys", type=int, action="append", metavar="N",
                   help="population size, repeatable (default: from config)")
    p.add_argument("--theta", type=int, default=1, help="detection threshold (default 1)")
    p.add_argument("--derived", action="store_true",
                   help="derive the transport factor from the configured channel "
                        "instead of the fixed reference value")
    p.add_argument("--trials", type=int, default=0,
                   help="add Monte-Carlo columns with this many trials per row")
    p.set_defaults(func=_cmd_ber)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_cfg(args)
        return args.func(cfg, args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
