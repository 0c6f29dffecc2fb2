"""
Configuration Module

This module parses sectioned run files into an immutable RunConfig tree,
applies command-line overrides, and reads environment defaults.

A run file looks like:

    [cavity]
    kappa = 0.01
    g = 0.001

    [drive]
    sigma = 1.0

    [sweep]
    c_list = 0, 0.2, 1
"""

import configparser
import logging
import math
import os
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from dotenv import load_dotenv

from ..exceptions import ConfigurationError, ParameterError
from ..physics.cavity import sigma_from_pump

logger = logging.getLogger(__name__)

SPACINGS = ("log", "linear")
FORMATS = ("csv", "svg")

DEFAULT_CONFIG_TEXT = """
[cavity]
kappa = 0.01
g = 0.001

[drive]
sigma = 1.0
"""


@dataclass(frozen=True)
class CavityConfig:
    kappa: float
    g: float
    epsilon0: float = 0.0
    delta_a: float = 0.0
    delta_b: float = 0.0
    psi: float = 0.0


@dataclass(frozen=True)
class DriveConfig:
    """Pump drive; sigma is always resolved, pump_intensity only when given."""

    sigma: float
    pump_intensity: Optional[float] = None


@dataclass(frozen=True)
class NoiseConfig:
    pump_variance: float = 2.0


@dataclass(frozen=True)
class SweepConfig:
    omega_min: float = 0.01
    omega_max: float = 100.0
    omega_points: int = 200
    spacing: str = "log"
    sigma_list: Tuple[float, ...] = ()
    c_list: Tuple[float, ...] = (0.0,)

    def omegas(self) -> np.ndarray:
        """Ascending analysis-frequency grid."""
        if self.spacing == "log":
            return np.logspace(math.log10(self.omega_min), math.log10(self.omega_max), self.omega_points)
        return np.linspace(self.omega_min, self.omega_max, self.omega_points)


@dataclass(frozen=True)
class OutputConfig:
    path: Optional[str] = None
    format: str = "csv"

    @property
    def target(self) -> str:
        """Output file; defaults to output/sweep.<format>."""
        return self.path or os.path.join("output", f"sweep.{self.format}")


@dataclass(frozen=True)
class RunConfig:
    cavity: CavityConfig
    drive: DriveConfig
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    output: OutputConfig = field(default_factory=OutputConfig)


@dataclass(frozen=True)
class EnvSettings:
    """Process-level defaults taken from the environment."""

    config_path: Optional[str]
    log_dir: str
    max_workers: int
    output_dir: str


def _parse_float(raw: str, key_path: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ConfigurationError(f"expected a number, got {raw!r}", key_path) from None
    if not math.isfinite(value):
        raise ConfigurationError(f"expected a finite number, got {raw!r}", key_path)
    return value


def _parse_int(raw: str, key_path: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(f"expected an integer, got {raw!r}", key_path) from None


def _parse_list(raw: str, key_path: str) -> Tuple[float, ...]:
    items = [item.strip() for item in raw.split(",") if item.strip()]
    if not items:
        raise ConfigurationError("expected a comma separated list of numbers", key_path)
    return tuple(_parse_float(item, key_path) for item in items)


def _parse_choice(choices: Tuple[str, ...]) -> Callable[[str, str], str]:
    def parse(raw: str, key_path: str) -> str:
        value = raw.strip().lower()
        if value not in choices:
            raise ConfigurationError(f"expected one of {', '.join(choices)}, got {raw!r}", key_path)
        return value
    return parse


def _parse_str(raw: str, key_path: str) -> str:
    return raw.strip()


# section -> key -> parser
SCHEMA: Dict[str, Dict[str, Callable[[str, str], object]]] = {
    "cavity": {
        "kappa": _parse_float,
        "g": _parse_float,
        "epsilon0": _parse_float,
        "delta_a": _parse_float,
        "delta_b": _parse_float,
        "psi": _parse_float,
    },
    "drive": {
        "sigma": _parse_float,
        "pump_intensity": _parse_float,
    },
    "noise": {
        "pump_variance": _parse_float,
    },
    "sweep": {
        "omega_min": _parse_float,
        "omega_max": _parse_float,
        "omega_points": _parse_int,
        "spacing": _parse_choice(SPACINGS),
        "sigma_list": _parse_list,
        "c_list": _parse_list,
    },
    "output": {
        "path": _parse_str,
        "format": _parse_choice(FORMATS),
    },
}


def _read_sections(text: str) -> Dict[str, Dict[str, object]]:
    parser = configparser.ConfigParser(interpolation=None, default_section="__defaults__")
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise ConfigurationError(f"malformed run file: {e}") from e

    values: Dict[str, Dict[str, object]] = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigurationError("unknown section", section)
        values[section] = {}
        for key, raw in parser.items(section):
            key_path = f"{section}.{key}"
            if key not in SCHEMA[section]:
                raise ConfigurationError("unknown key", key_path)
            values[section][key] = SCHEMA[section][key](raw, key_path)
    return values


def _require(values: Dict[str, Dict[str, object]], section: str, key: str):
    try:
        return values[section][key]
    except KeyError:
        raise ConfigurationError("missing required key", f"{section}.{key}") from None


def validate_config(config: RunConfig) -> RunConfig:
    """
    Check the range rules of a RunConfig.

    Returns:
        RunConfig: The same config, for chaining

    Raises:
        ConfigurationError: With the key path of the first offending value
    """
    cavity, sweep = config.cavity, config.sweep
    if not 0.0 < cavity.kappa < 1.0:
        raise ConfigurationError(f"must lie in (0, 1), got {cavity.kappa}", "cavity.kappa")
    if cavity.g <= 0.0:
        raise ConfigurationError(f"must be positive, got {cavity.g}", "cavity.g")
    if config.drive.sigma < 1.0:
        raise ConfigurationError(f"must be >= 1 (above threshold), got {config.drive.sigma}", "drive.sigma")
    if config.noise.pump_variance <= 0.0:
        raise ConfigurationError(f"must be positive, got {config.noise.pump_variance}", "noise.pump_variance")
    if sweep.omega_min <= 0.0:
        raise ConfigurationError(f"must be positive, got {sweep.omega_min}", "sweep.omega_min")
    if sweep.omega_points < 2:
        raise ConfigurationError(f"must be at least 2, got {sweep.omega_points}", "sweep.omega_points")
    if sweep.omega_max <= sweep.omega_min:
        raise ConfigurationError(
            f"must exceed omega_min ({sweep.omega_min}), got {sweep.omega_max}", "sweep.omega_max")
    if sweep.spacing not in SPACINGS:
        raise ConfigurationError(f"expected one of {', '.join(SPACINGS)}", "sweep.spacing")
    if not sweep.sigma_list:
        raise ConfigurationError("must not be empty", "sweep.sigma_list")
    for sigma in sweep.sigma_list:
        if sigma < 1.0:
            raise ConfigurationError(f"values must be >= 1, got {sigma}", "sweep.sigma_list")
    if not sweep.c_list:
        raise ConfigurationError("must not be empty", "sweep.c_list")
    for c in sweep.c_list:
        if c < 0.0:
            raise ConfigurationError(f"values must be >= 0, got {c}", "sweep.c_list")
    if config.output.format not in FORMATS:
        raise ConfigurationError(f"expected one of {', '.join(FORMATS)}", "output.format")
    if config.output.path:
        extension = os.path.splitext(config.output.path)[1].lower().lstrip(".")
        if extension in FORMATS and extension != config.output.format:
            raise ConfigurationError(f"a .{extension} file does not match format {config.output.format!r}",
                                     "output.path")
    return config


def parse_config(text: str) -> RunConfig:
    """
    Parse and validate a run file.

    Args:
        text: Sectioned key = value document

    Returns:
        RunConfig: Validated configuration with defaults applied

    Raises:
        ConfigurationError: Missing, unknown, conflicting or out-of-range keys
    """
    values = _read_sections(text)
    drive = values.get("drive", {})

    kappa = _require(values, "cavity", "kappa")
    g = _require(values, "cavity", "g")
    cavity = CavityConfig(kappa=kappa, g=g, **{k: v for k, v in values["cavity"].items()
                                               if k not in ("kappa", "g")})

    if "sigma" in drive and "pump_intensity" in drive:
        raise ConfigurationError("drive.sigma and drive.pump_intensity are mutually exclusive", "drive")
    if "sigma" in drive:
        drive_config = DriveConfig(sigma=drive["sigma"])
    elif "pump_intensity" in drive:
        try:
            sigma = sigma_from_pump(drive["pump_intensity"], kappa, g)
        except ParameterError as e:
            raise ConfigurationError(str(e), "drive.pump_intensity") from e
        drive_config = DriveConfig(sigma=sigma, pump_intensity=drive["pump_intensity"])
        logger.debug(f"Resolved sigma={sigma} from pump intensity {drive['pump_intensity']}")
    else:
        raise ConfigurationError("one of drive.sigma or drive.pump_intensity is required", "drive")

    sweep_values = dict(values.get("sweep", {}))
    sweep_values.setdefault("sigma_list", (drive_config.sigma,))

    config = RunConfig(
        cavity=cavity,
        drive=drive_config,
        noise=NoiseConfig(**values.get("noise", {})),
        sweep=SweepConfig(**sweep_values),
        output=OutputConfig(**values.get("output", {})),
    )
    return validate_config(config)


def load_config(path: Optional[str] = None) -> RunConfig:
    """
    Load a run file from disk, or the built-in defaults when path is None.

    Raises:
        ConfigurationError: If the file cannot be read or fails validation
    """
    if path is None:
        logger.info("No run file given, using built-in defaults")
        return parse_config(DEFAULT_CONFIG_TEXT)
    try:
        with open(path, "r", encoding="utf-8") as file:
            text = file.read()
    except OSError as e:
        raise ConfigurationError(f"cannot read run file {path}: {e}") from e
    logger.info(f"Loaded run file {path}")
    return parse_config(text)


def apply_overrides(config: RunConfig, sigma: Optional[Tuple[float, ...]] = None,
                    coupling: Optional[Tuple[float, ...]] = None,
                    omega_min: Optional[float] = None, omega_max: Optional[float] = None,
                    omega_points: Optional[int] = None, pump_variance: Optional[float] = None,
                    output: Optional[str] = None, output_format: Optional[str] = None) -> RunConfig:
    """
    Merge command-line values over a parsed config and re-validate.

    A sigma override replaces both the drive sigma (first value) and the
    sweep's sigma list.
    """
    drive, sweep = config.drive, config.sweep
    if sigma:
        drive = DriveConfig(sigma=sigma[0])
        sweep = replace(sweep, sigma_list=tuple(sigma))
    if coupling:
        sweep = replace(sweep, c_list=tuple(coupling))
    sweep_updates = {key: value for key, value in (("omega_min", omega_min), ("omega_max", omega_max),
                                                   ("omega_points", omega_points)) if value is not None}
    sweep = replace(sweep, **sweep_updates)

    noise = config.noise if pump_variance is None else NoiseConfig(pump_variance=pump_variance)
    out = config.output
    if output is not None:
        out = replace(out, path=output)
    if output_format is not None:
        out = replace(out, format=output_format.lower())

    return validate_config(replace(config, drive=drive, sweep=sweep, noise=noise, output=out))


def load_env_settings() -> EnvSettings:
    """Read OPO_* defaults, loading a .env file first when present."""
    load_dotenv()
    raw_workers = os.getenv('OPO_MAX_WORKERS', '4')
    try:
        max_workers = int(raw_workers)
    except ValueError:
        raise ConfigurationError(f"expected an integer, got {raw_workers!r}", "OPO_MAX_WORKERS") from None
    if max_workers < 1:
        raise ConfigurationError(f"must be at least 1, got {max_workers}", "OPO_MAX_WORKERS")
    return EnvSettings(
        config_path=os.getenv('OPO_CONFIG_PATH') or None,
        log_dir=os.getenv('OPO_LOG_DIR', 'logs'),
        max_workers=max_workers,
        output_dir=os.getenv('OPO_OUTPUT_DIR', 'output'),
    )
