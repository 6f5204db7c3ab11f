import json
import math
from pathlib import Path

import pytest

from chemolink import cli
from chemolink.config import DEFAULT_INI, ConfigError, load_config
from chemolink.output import format_value, read_csv, render_csv

ROOT = Path(__file__).resolve().parents[1]


def _csv_row(stdout: str) -> dict:
    lines = [ln for ln in stdout.splitlines() if ln and not ln.startswith("#")]
    header, row = lines[-2].split(","), lines[-1].split(",")
    return dict(zip(header, row))


def _write(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_shipped_config_matches_builtin():
    assert (ROOT / "configs" / "default.ini").read_text() == DEFAULT_INI


def test_default_config_values():
    cfg = load_config()
    assert cfg.params.a == 1e-6 and cfg.link.d == 50e-6
    assert cfg.link.sigma_m == pytest.approx(2.5e21, rel=1e-12)
    assert cfg.seed is None


def test_unknown_key_rejected(tmp_path):
    path = _write(tmp_path, DEFAULT_INI.replace("radius_m", "radius_um"))
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert info.value.path == "physical.radius_um"


def test_unknown_section_rejected():
    with pytest.raises(ConfigError):
        load_config(None, ["plotting.dpi=100"])


def test_missing_noise_names_both_keys(tmp_path):
    path = _write(tmp_path, DEFAULT_INI.replace("snr_ref_db = 20\n", ""))
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert "sigma_m" in str(info.value) and "snr_ref_db" in str(info.value)


def test_both_noise_keys_rejected():
    with pytest.raises(ConfigError):
        load_config(None, ["link.sigma_m=1"])


def test_bad_value_reports_key_path():
    with pytest.raises(ConfigError) as info:
        load_config(None, ["physical.viscosity_pa_s=-1"])
    assert info.value.path == "physical.viscosity_pa_s"
    with pytest.raises(ConfigError) as info:
        load_config(None, ["link.distance_m=abc"])
    assert info.value.path == "link.distance_m"


def test_overrides_change_hash():
    assert load_config().config_hash != load_config(None, ["link.distance_m=30e-6"]).config_hash
    # output location and worker count never change the numbers
    assert load_config().config_hash == load_config(None, ["output.directory=x", "experiment.threads=4"]).config_hash


def test_format_policy():
    assert format_value(1 / 3) == "0.3333333333"
    assert format_value(3) == "3"
    assert format_value(math.nan) == "nan"
    assert format_value(True) == "1"
    assert render_csv(["a"], [[0.1 + 0.2]], digits=10) == "a\n0.3\n"


def test_derive_prints_relaxation_time(capsys):
    assert cli.main(["derive"]) == 0
    row = _csv_row(capsys.readouterr().out)
    assert 5.5 <= float(row["tau_r_s"]) <= 6.5


def test_derive_warns_when_propulsion_disabled(tmp_path, capsys, caplog):
    path = _write(tmp_path, DEFAULT_INI.replace("snr_ref_db = 20", "sigma_m = 1e21"))
    assert cli.main(["derive", "--config", str(path), "--set", "physical.cap_half_angle_rad=0"]) == 0
    row = _csv_row(capsys.readouterr().out)
    assert float(row["K_control_m_s"]) == 0.0
    assert "propulsion is disabled" in caplog.text


def test_missing_noise_exit_code(tmp_path, capsys):
    path = _write(tmp_path, DEFAULT_INI.replace("snr_ref_db = 20\n", ""))
    assert cli.main(["validate", "--config", str(path)]) == 1
    err = capsys.readouterr().err
    assert "sigma_m" in err and "snr_ref_db" in err


def test_reference_snr_needs_emission(capsys):
    assert cli.main(["derive", "--set", "physical.cap_half_angle_rad=0"]) == 1
    assert "link.snr_ref_db" in capsys.readouterr().err


def test_missing_config_file_is_io_error(tmp_path):
    assert cli.main(["validate", "--config", str(tmp_path / "nope.ini")]) == 3


def test_design_doubles_with_distance(tmp_path, capsys):
    # fixed sigma_m so that only d changes
    path = _write(tmp_path, DEFAULT_INI.replace("snr_ref_db = 20", "sigma_m = 1e21"))
    results = []
    for d in ("30e-6", "60e-6"):
        assert cli.main(["design", "--config", str(path), "--set", f"link.distance_m={d}"]) == 0
        results.append(float(_csv_row(capsys.readouterr().out)["I_opt"]))
    assert results[1] / results[0] == pytest.approx(2.0, rel=1e-9)


def test_design_unit_parameters(tmp_path, capsys):
    # H0 = beta_R kappa a^2 / (2 D_B) = 1 and K = -b kappa / (4 D_fuel) = 1 at a hemispherical cap;
    # D_r = 1 (radius and viscosity chosen for it) and T solves g(T) = 1
    from scipy.optimize import brentq
    kT = 1.380649e-23 * 293.0
    a = 1e-6
    eta = kT / (8 * math.pi * a**3)
    T = brentq(lambda t: math.exp(-t) + t - 2.0, 1.0, 3.0)
    kappa = 1.0
    D_B = kappa * a * a / 2
    ini = (f"[physical]\nradius_m = {a!r}\nviscosity_pa_s = {eta!r}\ntemperature_k = 293\n"
           f"flux_amplitude_per_m2_s = {kappa!r}\nphoretic_mobility_m5_per_s = -8e-9\n"
           f"fuel_diffusivity_m2_s = 2e-9\nsignal_diffusivity_m2_s = {D_B!r}\nreceiver_gain = 1\n"
           f"[link]\ndistance_m = 1\nsymbol_duration_s = {T!r}\nsigma_m = 1\n")
    assert cli.main(["design", "--config", str(_write(tmp_path, ini))]) == 0
    row = _csv_row(capsys.readouterr().out)
    assert float(row["I_opt"]) == pytest.approx(1.0, rel=1e-8)


def test_design_bep_consistent(capsys):
    from chemolink.channel import channel_stats, mobility_for
    from chemolink.detection import DetectorSpec, bep, ml_threshold
    from chemolink.physics import derive_coefficients
    assert cli.main(["design"]) == 0
    row = _csv_row(capsys.readouterr().out)
    cfg = load_config()
    c = derive_coefficients(cfg.params)
    I = float(row["I_opt"])
    off = channel_stats(c, cfg.link, mobility_for(c, 1.0, 0.0), 0.0)
    on = channel_stats(c, cfg.link, mobility_for(c, 1.0, I), I)
    s0, s1 = math.sqrt(off.sigma_Y_sq), math.sqrt(on.sigma_Y_sq)
    expected = bep(DetectorSpec(off.mu, s0, on.mu, s1, ml_threshold(off.mu, s0, on.mu, s1)))
    assert float(row["bep"]) == pytest.approx(expected, rel=1e-9)


def test_stats_command(capsys):
    assert cli.main(["stats", "--intensity", "0"]) == 0
    row = _csv_row(capsys.readouterr().out)
    assert float(row["mu"]) == 0.0 and float(row["sigma_Y_sq"]) == pytest.approx(2.5e21**2, rel=1e-9)


def test_snr_sweep_schema_and_determinism(tmp_path, capsys):
    for run in ("a", "b"):
        assert cli.main(["experiment", "snr_sweep", "--seed", "7", "--out", str(tmp_path / run)]) == 0
    header, rows = read_csv(tmp_path / "a" / "snr_sweep.csv")
    assert header == ["d_m", "I", "snr", "snr_db", "i_opt_closed", "i_opt_grid", "valid_flags"]
    assert len(rows) == 180
    for name in ("snr_sweep.csv", "snr_sweep_summary.csv", "assertions.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert (tmp_path / "a" / "snr_sweep.png").stat().st_size > 0
    text = (tmp_path / "a" / "snr_sweep.csv").read_text()
    assert "# seed: 7" in text and "# config_sha256: " in text and "# version: artifact" in text


def test_failed_assertion_exit_code_and_report(tmp_path, capsys):
    # bep_sensitivity's distance ordering does not hold at the default calibration
    code = cli.main(["experiment", "bep_sensitivity", "--seed", "1", "--out", str(tmp_path),
                     "--set", "output.plots=false"])
    report = json.loads((tmp_path / "assertions.json").read_text())
    assert code == (0 if report["passed"] else 2)
    assert {c["name"] for c in report["checks"]} >= {"min_bep_increasing_in_d"}
    assert not (tmp_path / "bep_sensitivity.png").exists()


def test_unseeded_run_records_entropy(tmp_path, capsys):
    cli.main(["experiment", "empirical_bep", "--out", str(tmp_path), "--set", "experiment.n_trials=1000",
              "--set", "output.plots=false"])
    line = next(ln for ln in (tmp_path / "empirical_bep.csv").read_text().splitlines() if ln.startswith("# seed"))
    seed = int(line.split(":")[1])
    assert 0 <= seed < 2**64
    # replaying the recorded seed reproduces the file
    cli.main(["experiment", "empirical_bep", "--out", str(tmp_path / "replay"), "--seed", str(seed),
              "--set", "experiment.n_trials=1000", "--set", "output.plots=false"])
    assert (tmp_path / "empirical_bep.csv").read_bytes() == (tmp_path / "replay" / "empirical_bep.csv").read_bytes()


def test_pdf_validation_files(tmp_path, capsys):
    cli.main(["experiment", "pdf_validation", "--seed", "3", "--out", str(tmp_path),
              "--set", "experiment.n_trials=300", "--set", "output.plots=true"])
    for I in (10, 40, 70, 100):
        header, rows = read_csv(tmp_path / f"pdf_validation_I{I}.csv")
        assert len(rows) == 60 and header[:2] == ["I", "bin_left"]
    assert (tmp_path / "pdf_validation.png").exists()
