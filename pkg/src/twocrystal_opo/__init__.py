"""
Two-Crystal OPO Package

This package simulates a self-phase-locked optical parametric oscillator with
two type-II crystals and a rotated wave plate: classical locking and threshold,
linearized quantum noise spectra, and polarization entanglement criteria.
"""

from .exceptions import (
    EXIT_OK,
    EXIT_CONFIG,
    EXIT_NUMERIC,
    EXIT_DEVIATION,
    OpoError,
    ParameterError,
    ConfigurationError,
    NumericError,
    UsageError,
)
from .processor import (
    run_sweep,
    write_rows,
    log_mancini,
    figure,
    threshold_report,
    steady_state_report,
    validate,
)
from .utils import (
    setup_logging,
    log_performance_summary,
    parse_config,
    load_config,
    apply_overrides,
    load_env_settings,
)
