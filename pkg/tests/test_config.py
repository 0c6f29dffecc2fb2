import os

import pytest
from numpy.testing import assert_allclose

from twocrystal_opo.exceptions import ConfigurationError
from twocrystal_opo.utils.config import (
    apply_overrides,
    load_config,
    load_env_settings,
    parse_config,
)


def test_minimal_config_defaults(minimal_config):
    config = minimal_config
    assert config.cavity.kappa == 0.01
    assert config.cavity.g == 0.001
    assert config.cavity.epsilon0 == 0.0
    assert config.drive.sigma == 1.0
    assert config.drive.pump_intensity is None
    assert config.noise.pump_variance == 2.0
    assert config.sweep.spacing == "log"
    assert config.sweep.omega_points == 200
    assert config.sweep.sigma_list == (1.0,)
    assert config.sweep.c_list == (0.0,)
    assert config.output.format == "csv"
    assert config.output.path is None
    assert config.output.target == os.path.join("output", "sweep.csv")


def test_default_grid(minimal_config):
    omegas = minimal_config.sweep.omegas()
    assert len(omegas) == 200
    assert omegas[0] == pytest.approx(0.01)
    assert omegas[-1] == pytest.approx(100.0)


def test_linear_spacing(minimal_text):
    config = parse_config(minimal_text + "[sweep]\nspacing = linear\nomega_min = 1\nomega_max = 3\nomega_points = 3\n")
    assert_allclose(config.sweep.omegas(), [1.0, 2.0, 3.0])


def test_lists_and_format(minimal_text):
    config = parse_config(minimal_text + "[sweep]\nsigma_list = 1, 1.1\nc_list = 1, 0.2, 0\n"
                                         "[output]\nformat = SVG\npath = out/plot.svg\n")
    assert config.sweep.sigma_list == (1.0, 1.1)
    assert config.sweep.c_list == (1.0, 0.2, 0.0)
    assert config.output.format == "svg"
    assert config.output.path == "out/plot.svg"
    assert config.output.target == "out/plot.svg"


def test_sigma_from_pump_intensity():
    config = parse_config("[cavity]\nkappa = 0.02\ng = 0.002\n[drive]\npump_intensity = 800\n")
    assert config.drive.sigma == pytest.approx(2.0)
    assert config.drive.pump_intensity == 800.0
    assert config.sweep.sigma_list == (pytest.approx(2.0),)


def test_conflicting_drive():
    with pytest.raises(ConfigurationError) as excinfo:
        parse_config("[cavity]\nkappa = 0.02\ng = 0.002\n[drive]\nsigma = 1\npump_intensity = 800\n")
    assert "drive.sigma" in str(excinfo.value)
    assert "drive.pump_intensity" in str(excinfo.value)


def test_missing_drive():
    with pytest.raises(ConfigurationError) as excinfo:
        parse_config("[cavity]\nkappa = 0.02\ng = 0.002\n")
    assert excinfo.value.key_path == "drive"


def test_missing_required_key():
    with pytest.raises(ConfigurationError) as excinfo:
        parse_config("[cavity]\ng = 0.002\n[drive]\nsigma = 1\n")
    assert excinfo.value.key_path == "cavity.kappa"


@pytest.mark.parametrize("extra,key_path", [
    ("[cavity2]\nkappa = 1\n", "cavity2"),
    ("[noise]\nvariance = 2\n", "noise.variance"),
    ("[sweep]\nomega_points = 1\n", "sweep.omega_points"),
    ("[sweep]\nomega_min = 5\nomega_max = 5\n", "sweep.omega_max"),
    ("[sweep]\nomega_min = 0\n", "sweep.omega_min"),
    ("[sweep]\nc_list = 0, -1\n", "sweep.c_list"),
    ("[sweep]\nsigma_list = 0.5\n", "sweep.sigma_list"),
    ("[sweep]\nspacing = cubic\n", "sweep.spacing"),
    ("[sweep]\nomega_points = many\n", "sweep.omega_points"),
    ("[noise]\npump_variance = 0\n", "noise.pump_variance"),
    ("[output]\nformat = png\n", "output.format"),
])
def test_rejected_values(minimal_text, extra, key_path):
    with pytest.raises(ConfigurationError) as excinfo:
        parse_config(minimal_text + extra)
    assert excinfo.value.key_path == key_path


def test_malformed_text():
    with pytest.raises(ConfigurationError):
        parse_config("kappa = 0.01\n")


def test_overrides(minimal_config):
    config = apply_overrides(minimal_config, sigma=(1.0, 1.1), coupling=(0.0, 1.0),
                             omega_points=50, pump_variance=1.0, output="x.svg", output_format="svg")
    assert config.drive.sigma == 1.0
    assert config.sweep.sigma_list == (1.0, 1.1)
    assert config.sweep.c_list == (0.0, 1.0)
    assert config.sweep.omega_points == 50
    assert config.noise.pump_variance == 1.0
    assert config.output.path == "x.svg"
    assert config.output.format == "svg"
    assert minimal_config.sweep.omega_points == 200


def test_default_target_follows_format(minimal_config):
    config = apply_overrides(minimal_config, output_format="svg")
    assert config.output.path is None
    assert config.output.target == os.path.join("output", "sweep.svg")


@pytest.mark.parametrize("path,output_format", [("x.csv", "svg"), ("plots/x.SVG", "csv")])
def test_path_extension_must_match_format(minimal_config, path, output_format):
    with pytest.raises(ConfigurationError) as excinfo:
        apply_overrides(minimal_config, output=path, output_format=output_format)
    assert excinfo.value.key_path == "output.path"


def test_unknown_extension_is_kept(minimal_config):
    config = apply_overrides(minimal_config, output="results.dat", output_format="svg")
    assert config.output.target == "results.dat"


def test_overrides_are_validated(minimal_config):
    with pytest.raises(ConfigurationError) as excinfo:
        apply_overrides(minimal_config, omega_min=10.0, omega_max=1.0)
    assert excinfo.value.key_path == "sweep.omega_max"


def test_load_config_from_file(tmp_path, minimal_text):
    path = tmp_path / "run.ini"
    path.write_text(minimal_text, encoding="utf-8")
    assert load_config(str(path)) == parse_config(minimal_text)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(str(tmp_path / "absent.ini"))


def test_load_config_defaults():
    config = load_config(None)
    assert config.cavity.kappa == 0.01
    assert config.drive.sigma == 1.0


def test_env_settings(monkeypatch):
    monkeypatch.setenv("OPO_MAX_WORKERS", "2")
    monkeypatch.setenv("OPO_LOG_DIR", "custom_logs")
    monkeypatch.setenv("OPO_OUTPUT_DIR", "custom_output")
    monkeypatch.setenv("OPO_CONFIG_PATH", "run.ini")
    env = load_env_settings()
    assert env.max_workers == 2
    assert env.log_dir == "custom_logs"
    assert env.output_dir == "custom_output"
    assert env.config_path == "run.ini"


def test_env_settings_bad_workers(monkeypatch):
    monkeypatch.setenv("OPO_MAX_WORKERS", "zero")
    with pytest.raises(ConfigurationError) as excinfo:
        load_env_settings()
    assert excinfo.value.key_path == "OPO_MAX_WORKERS"
