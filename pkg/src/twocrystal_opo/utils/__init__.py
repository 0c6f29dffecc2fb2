"""
Utilities Module

This module contains logging setup, performance counters and run configuration.
"""

from .logging_config import setup_logging
from .performance_monitor import (
    log_performance_summary,
    increment_counter,
    start_timer,
    stop_timer,
    timed,
)
from .config import (
    RunConfig,
    EnvSettings,
    parse_config,
    load_config,
    apply_overrides,
    validate_config,
    load_env_settings,
)
