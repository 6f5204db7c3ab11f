"""``chemolink`` command line.

Exit codes: 0 success, 1 configuration or parameter validation failure,
2 an in-run assertion failed (see ``assertions.json``), 3 I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import secrets
import sys
from pathlib import Path

from .channel import channel_stats, mobility_for, snr, validity_report, variance_terms
from .config import ConfigError, RunConfig, load_config
from .detection import UnboundedOptimumError, ook_link_performance, optimal_intensity, snr_db
from .montecarlo import KINDS, run_experiment
from .output import (Provenance, format_value, package_version, render_csv, write_assertions,
                     write_table)
from .physics import ParameterError, derive_coefficients

logger = logging.getLogger("chemolink")

EXIT_OK, EXIT_VALIDATION, EXIT_ASSERTION, EXIT_IO = 0, 1, 2, 3


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="INI file (default: built-in defaults)")
    common.add_argument("--seed", type=int, help="top-level seed, unsigned 64-bit")
    common.add_argument("--threads", type=int, help="worker process cap")
    common.add_argument("--out", type=Path, help="output directory (overrides output.directory)")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override a config value; repeatable")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="chemolink", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("derive", parents=[common], help="derived coefficients and validity at the ON intensity")
    sub.add_parser("design", parents=[common], help="optimal intensity and the resulting link budget")
    p = sub.add_parser("stats", parents=[common], help="channel statistics at a given intensity")
    p.add_argument("--intensity", type=float, required=True)
    p = sub.add_parser("experiment", parents=[common], help="run a validation or sweep experiment")
    p.add_argument("kind", choices=KINDS)
    sub.add_parser("validate", parents=[common], help="check the config and report the validity ratios")
    return parser


def _load(args) -> RunConfig:
    overrides = list(args.overrides)
    if args.threads is not None:
        overrides.append(f"experiment.threads={args.threads}")
    return load_config(args.config, overrides)


def _resolve_seed(args, cfg: RunConfig) -> int:
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError("--seed", "must be an unsigned 64-bit integer")
        return args.seed
    if cfg.seed is not None:
        return cfg.seed
    seed = secrets.randbits(64)
    logger.info("no seed given; drew %d from system entropy", seed)
    return seed


def _print_table(pairs) -> None:
    width = max(len(k) for k, _ in pairs)
    for key, value in pairs:
        text = format_value(value, 6) if isinstance(value, float) else str(value)
        print(f"  {key:<{width}}  {text}")


def _print_csv(provenance: Provenance, pairs, digits: int) -> None:
    print()
    sys.stdout.write(render_csv([k for k, _ in pairs], [[v for _, v in pairs]], provenance, digits))


def _validity_pairs(report) -> list:
    return [("sigma_x_over_d", report.ratio_sigma_x_over_d), ("peclet", report.peclet),
            ("quasi_steady_margin", report.quasi_steady_margin), ("valid_flags", report.flags())]


def _warn_validity(report) -> None:
    if not report.sigma_x_ok:
        logger.warning("far-field assumption violated: sigma_x/d = %.3g > 0.1", report.ratio_sigma_x_over_d)
    if not report.peclet_ok:
        logger.warning("Peclet number %.3g exceeds 0.1", report.peclet)
    if not report.quasi_steady_ok:
        logger.warning("quasi-steady margin T D_B / d^2 = %.3g is below 1", report.quasi_steady_margin)


def cmd_derive(args, cfg: RunConfig, prov: Provenance) -> int:
    coef = derive_coefficients(cfg.params)
    if coef.K_control == 0:
        logger.warning("K_control = 0: propulsion is disabled (cap half-angle, flux or mobility is zero)")
    report = validity_report(coef, cfg.link, cfg.link.I1)
    pairs = [("D_t_m2_s", coef.D_t), ("D_r_per_s", coef.D_r), ("tau_r_s", coef.tau_r),
             ("A_cap_m2", coef.A_cap), ("K_control_m_s", coef.K_control), ("kappa_em_per_s", coef.kappa_em),
             ("G_ch_per_m2", coef.G_ch), ("H0", coef.H0), ("sigma_m", cfg.link.sigma_m),
             ("I_on", cfg.link.I1)] + _validity_pairs(report)
    print("derived coefficients")
    _print_table(pairs)
    _warn_validity(report)
    _print_csv(prov, pairs, cfg.output.significant_digits)
    return EXIT_OK


def cmd_design(args, cfg: RunConfig, prov: Provenance) -> int:
    coef = derive_coefficients(cfg.params)
    i_opt = optimal_intensity(coef, cfg.link)
    perf = ook_link_performance(coef, cfg.link, i_opt)
    s = snr(coef, cfg.link, i_opt)
    pairs = [("I_opt", i_opt), ("snr", s), ("snr_db", snr_db(s)), ("bep", perf.bep), ("gamma", perf.gamma),
             ("envelope", f"0 <= I <= {format_value(i_opt, 6)}")] + _validity_pairs(perf.validity)
    print("design point")
    _print_table(pairs)
    _warn_validity(perf.validity)
    _print_csv(prov, pairs, cfg.output.significant_digits)
    return EXIT_OK


def cmd_stats(args, cfg: RunConfig, prov: Provenance) -> int:
    coef = derive_coefficients(cfg.params)
    I = args.intensity
    st = channel_stats(coef, cfg.link, mobility_for(coef, cfg.link.T, I), I)
    meas, passive, active = variance_terms(coef, cfg.link, I)
    report = validity_report(coef, cfg.link, I)
    s = snr(coef, cfg.link, I) if I > 0 else 0.0
    pairs = [("I", float(I)), ("mu", st.mu), ("sigma_x_sq_m2", st.sigma_x_sq), ("sigma_Y_sq", st.sigma_Y_sq),
             ("var_measurement", meas), ("var_passive", passive), ("var_active", active),
             ("snr", s), ("snr_db", snr_db(s))] + _validity_pairs(report)
    print(f"channel statistics at I = {format_value(float(I), 6)}")
    _print_table(pairs)
    _warn_validity(report)
    _print_csv(prov, pairs, cfg.output.significant_digits)
    return EXIT_OK


def cmd_validate(args, cfg: RunConfig, prov: Provenance) -> int:
    coef = derive_coefficients(cfg.params)
    report = validity_report(coef, cfg.link, cfg.link.I1)
    print("configuration ok")
    _print_table([("config_sha256", prov.config_hash)] + _validity_pairs(report))
    _warn_validity(report)
    return EXIT_OK


def cmd_experiment(args, cfg: RunConfig, prov: Provenance) -> int:
    spec = cfg.experiment_spec(args.kind, prov.seed)
    result = run_experiment(spec)
    out = args.out or cfg.output.directory
    for table in result.tables:
        path = write_table(out, table, prov, cfg.output.significant_digits)
        logger.info("wrote %s", path)
    write_assertions(out, result.kind, result.checks, prov)
    if cfg.output.plots:
        from .plotting import render
        render(result, out)
    for check in result.checks:
        print(f"{'PASS' if check.passed else 'FAIL'}  {check.name}  {check.detail}")
    return EXIT_OK if result.passed else EXIT_ASSERTION


COMMANDS = {"derive": cmd_derive, "design": cmd_design, "stats": cmd_stats,
            "experiment": cmd_experiment, "validate": cmd_validate}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _load(args)
        # only experiments consume randomness; other commands record a seed only if one was given
        if args.command == "experiment":
            seed = _resolve_seed(args, cfg)
        else:
            seed = args.seed if args.seed is not None else cfg.seed
        command = args.command + (f" {args.kind}" if args.command == "experiment" else "")
        prov = Provenance(cfg.config_hash, seed, package_version(), command)
        return COMMANDS[args.command](args, cfg, prov)
    except (ConfigError, ParameterError, UnboundedOptimumError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
