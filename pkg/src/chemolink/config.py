"""Run configuration: a sectioned INI file with the unit in every key name.

Unknown sections or keys are rejected so a misspelt unit suffix cannot be
silently ignored. ``--set section.key=value`` overrides are applied on top of
the file before validation.
"""

from __future__ import annotations

import configparser
import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel import LinkConfig, calibrate_sigma_m
from .montecarlo import ExperimentSpec
from .physics import K_BOLTZMANN, ParameterError, PhysicalParams, derive_coefficients


class ConfigError(ValueError):
    """Configuration problem; ``path`` is the offending ``section.key`` (or several)."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# key -> (PhysicalParams field, default)
PHYSICAL_KEYS = {
    "radius_m": ("a", 1e-6),
    "viscosity_pa_s": ("eta", 1e-3),
    "temperature_k": ("T_env", 293.0),
    "cap_half_angle_rad": ("alpha", math.pi / 2),
    "flux_amplitude_per_m2_s": ("kappa_base", 1e20),
    "phoretic_mobility_m5_per_s": ("b_dp", -4e-36),
    "fuel_diffusivity_m2_s": ("D_fuel", 2e-9),
    "signal_diffusivity_m2_s": ("D_B", 2e-9),
    "receiver_gain": ("beta_R", 1.0),
    "boltzmann_j_per_k": ("k_B", K_BOLTZMANN),
}
LINK_KEYS = {
    "distance_m": 50e-6,
    "symbol_duration_s": 1.0,
    "sigma_m": None,
    "snr_ref_db": None,
    "ref_intensity": 50.0,
    "ref_distance_m": 50e-6,
    "i0": 0.0,
    "i1": 50.0,
}
EXPERIMENT_KEYS = {
    "intensities": None,
    "i_min": 1.0,
    "i_max": 200.0,
    "n_intensities": 60,
    "sweep_distance_m": None,
    "sweep_viscosity_pa_s": None,
    "sweep_duration_s": None,
    "ks_intensities": "10, 40",
    "intensity": None,
    "n_trials": 10_000,
    "seed": None,
    "time_step_s": 1e-4,
    "threads": 1,
}
OUTPUT_KEYS = {
    "directory": "results",
    "significant_digits": 10,
    "plots": True,
}
SECTIONS = {"physical": PHYSICAL_KEYS, "link": LINK_KEYS,
            "experiment": EXPERIMENT_KEYS, "output": OUTPUT_KEYS}

# used when no --config is given; identical to configs/default.ini
DEFAULT_INI = """\
[physical]
radius_m = 1e-6
viscosity_pa_s = 1e-3
temperature_k = 293
cap_half_angle_rad = 1.5707963267948966
flux_amplitude_per_m2_s = 1e20
phoretic_mobility_m5_per_s = -4e-36
fuel_diffusivity_m2_s = 2e-9
signal_diffusivity_m2_s = 2e-9
receiver_gain = 1

[link]
distance_m = 50e-6
symbol_duration_s = 1
snr_ref_db = 20
ref_intensity = 50
ref_distance_m = 50e-6
i0 = 0
i1 = 50

[experiment]
i_min = 1
i_max = 200
n_intensities = 60
n_trials = 10000
time_step_s = 1e-4
threads = 1

[output]
directory = results
significant_digits = 10
plots = true
"""

SWEEP_KEYS = {"sweep_distance_m": "d_m", "sweep_viscosity_pa_s": "eta_pa_s", "sweep_duration_s": "T_s"}


@dataclass(frozen=True)
class OutputConfig:
    directory: Path
    significant_digits: int = 10
    plots: bool = True


@dataclass(frozen=True)
class RunConfig:
    params: PhysicalParams
    link: LinkConfig
    experiment: dict  # ExperimentSpec keyword arguments except kind/params/link/seed
    seed: int | None
    output: OutputConfig
    canonical: str  # normalized text the provenance hash is taken over

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical.encode()).hexdigest()

    def experiment_spec(self, kind: str, seed: int) -> ExperimentSpec:
        extra = dict(self.experiment)
        if kind == "pdf_validation" and not extra.pop("explicit_grid", False):
            extra.pop("intensity_grid", None)
        else:
            extra.pop("explicit_grid", None)
        return ExperimentSpec(kind=kind, params=self.params, link=self.link, seed=seed, **extra)


def _parser() -> configparser.ConfigParser:
    # keys are case-sensitive unit names; no interpolation surprises with '%'
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    return cp


def read_ini(path: str | Path | None) -> configparser.ConfigParser:
    cp = _parser()
    if path is None:
        cp.read_string(DEFAULT_INI, source="<default>")
        return cp
    with open(path, encoding="utf-8") as fh:  # OSError propagates (I/O failure)
        try:
            cp.read_file(fh)
        except configparser.Error as exc:
            raise ConfigError(str(path), f"cannot parse: {exc}") from exc
    return cp


def apply_overrides(cp: configparser.ConfigParser, overrides: list[str]) -> None:
    for item in overrides or ():
        key, sep, value = item.partition("=")
        section, dot, name = key.strip().partition(".")
        if not sep or not dot or not name:
            raise ConfigError(item, "override must look like section.key=value")
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, name, value.strip())


def _float(section: str, key: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{section}.{key}", f"expected a number, got {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{section}.{key}", f"must be finite, got {raw!r}")
    return value


def _int(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{section}.{key}", f"expected an integer, got {raw!r}") from None


def _floats(section: str, key: str, raw: str) -> tuple[float, ...]:
    parts = [p for p in raw.replace(",", " ").split() if p]
    if not parts:
        raise ConfigError(f"{section}.{key}", "empty list")
    return tuple(_float(section, key, p) for p in parts)


def _bool(section: str, key: str, raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{section}.{key}", f"expected a boolean, got {raw!r}")


def _check_keys(cp: configparser.ConfigParser) -> None:
    for section in cp.sections():
        if section not in SECTIONS:
            raise ConfigError(section, f"unknown section; expected one of {sorted(SECTIONS)}")
        for key in cp[section]:
            if key not in SECTIONS[section]:
                raise ConfigError(f"{section}.{key}", "unknown key")


def _get(cp, section, key):
    if cp.has_section(section) and key in cp[section]:
        return cp[section][key]
    return None


def build_config(cp: configparser.ConfigParser) -> RunConfig:
    _check_keys(cp)

    values = {}
    for key, (name, default) in PHYSICAL_KEYS.items():
        raw = _get(cp, "physical", key)
        values[name] = default if raw is None else _float("physical", key, raw)
    try:
        params = PhysicalParams(**values)
    except ParameterError as exc:
        key = next(k for k, (n, _) in PHYSICAL_KEYS.items() if n == exc.field)
        raise ConfigError(f"physical.{key}", str(exc)) from exc

    def link_value(key):
        raw = _get(cp, "link", key)
        return LINK_KEYS[key] if raw is None else _float("link", key, raw)

    sigma_raw, snr_raw = _get(cp, "link", "sigma_m"), _get(cp, "link", "snr_ref_db")
    if sigma_raw is None and snr_raw is None:
        raise ConfigError("link.sigma_m, link.snr_ref_db", "exactly one of the two keys is required")
    if sigma_raw is not None and snr_raw is not None:
        raise ConfigError("link.sigma_m, link.snr_ref_db", "give only one of the two keys")
    if sigma_raw is not None:
        sigma_m = _float("link", "sigma_m", sigma_raw)
    else:
        coef = derive_coefficients(params)
        try:
            sigma_m = calibrate_sigma_m(coef, link_value("ref_distance_m"), link_value("ref_intensity"),
                                        _float("link", "snr_ref_db", snr_raw))
        except ParameterError as exc:
            raise ConfigError(f"link.{exc.field}", str(exc)) from exc
    try:
        link = LinkConfig(d=link_value("distance_m"), T=link_value("symbol_duration_s"), sigma_m=sigma_m,
                          I0=link_value("i0"), I1=link_value("i1"))
    except ParameterError as exc:
        names = {"d": "distance_m", "T": "symbol_duration_s", "I0": "i0", "I1": "i1"}
        raise ConfigError(f"link.{names.get(exc.field, exc.field)}", str(exc)) from exc

    exp = {}
    raw = _get(cp, "experiment", "intensities")
    if raw is not None:
        exp["intensity_grid"] = _floats("experiment", "intensities", raw)
        exp["explicit_grid"] = True
    else:
        lo = _float("experiment", "i_min", _get(cp, "experiment", "i_min") or "1")
        hi = _float("experiment", "i_max", _get(cp, "experiment", "i_max") or "200")
        n = _int("experiment", "n_intensities", _get(cp, "experiment", "n_intensities") or "60")
        if not (0 < lo < hi) or n < 2:
            raise ConfigError("experiment.i_min", "need 0 < i_min < i_max and n_intensities >= 2")
        exp["intensity_grid"] = tuple(np.geomspace(lo, hi, n).tolist())
    sweeps = {}
    for key, panel in SWEEP_KEYS.items():
        raw = _get(cp, "experiment", key)
        if raw is not None:
            sweeps[panel] = _floats("experiment", key, raw)
    if sweeps:
        exp["sweep_values"] = sweeps
    raw = _get(cp, "experiment", "ks_intensities")
    if raw is not None:
        exp["ks_intensities"] = _floats("experiment", "ks_intensities", raw)
    raw = _get(cp, "experiment", "intensity")
    if raw is not None:
        exp["intensity"] = _float("experiment", "intensity", raw)
    raw = _get(cp, "experiment", "n_trials")
    if raw is not None:
        exp["n_trials"] = _int("experiment", "n_trials", raw)
    raw = _get(cp, "experiment", "time_step_s")
    if raw is not None:
        exp["dt"] = _float("experiment", "time_step_s", raw)
    raw = _get(cp, "experiment", "threads")
    if raw is not None:
        exp["threads"] = max(1, _int("experiment", "threads", raw))
    raw = _get(cp, "experiment", "seed")
    seed = None if raw is None else _int("experiment", "seed", raw)
    if seed is not None and not 0 <= seed < 2**64:
        raise ConfigError("experiment.seed", "must be an unsigned 64-bit integer")

    digits_raw = _get(cp, "output", "significant_digits")
    digits = 10 if digits_raw is None else _int("output", "significant_digits", digits_raw)
    if not 1 <= digits <= 17:
        raise ConfigError("output.significant_digits", "must lie in [1, 17]")
    plots_raw = _get(cp, "output", "plots")
    output = OutputConfig(directory=Path(_get(cp, "output", "directory") or OUTPUT_KEYS["directory"]),
                          significant_digits=digits,
                          plots=True if plots_raw is None else _bool("output", "plots", plots_raw))

    return RunConfig(params=params, link=link, experiment=exp, seed=seed, output=output,
                     canonical=canonical_text(cp))


def canonical_text(cp: configparser.ConfigParser) -> str:
    """Sorted ``section.key=value`` lines of everything that can change results.

    Output location, plotting and worker count are excluded: they never change
    the numbers written.
    """
    skip = {("output", "directory"), ("output", "plots"), ("experiment", "threads"),
            ("experiment", "seed")}
    lines = []
    for section in sorted(cp.sections()):
        for key in sorted(cp[section]):
            if (section, key) not in skip:
                lines.append(f"{section}.{key}={cp[section][key].strip()}")
    return "\n".join(lines) + "\n"


def load_config(path: str | Path | None = None, overrides: list[str] | None = None) -> RunConfig:
    cp = read_ini(path)
    apply_overrides(cp, overrides or [])
    return build_config(cp)
