"""
Exceptions Module

This module defines the error hierarchy shared by the physics, configuration
and reporting layers, together with the process exit codes used by the CLI.
"""

from typing import Optional, Tuple

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2
EXIT_DEVIATION = 3


class OpoError(Exception):
    """Base class for all errors raised by the package."""

    exit_code = EXIT_NUMERIC


class ParameterError(OpoError, ValueError):
    """An input parameter lies outside its physical domain."""

    exit_code = EXIT_CONFIG


class ConfigurationError(OpoError):
    """A run configuration is missing a key, conflicts, or holds a bad value."""

    exit_code = EXIT_CONFIG

    def __init__(self, message: str, key_path: Optional[str] = None):
        self.key_path = key_path
        if key_path:
            message = f"{key_path}: {message}"
        super().__init__(message)


class UsageError(OpoError):
    """The CLI was invoked with an invalid choice."""

    exit_code = EXIT_CONFIG


class NumericError(OpoError, ArithmeticError):
    """A linear solve or criterion evaluation failed at a given operating point."""

    exit_code = EXIT_NUMERIC

    def __init__(self, message: str, point: Optional[Tuple[float, float, float]] = None):
        self.point = point
        if point is not None:
            omega, sigma, c = point
            message = f"{message} (omega={omega!r}, sigma={sigma!r}, c={c!r})"
        super().__init__(message)
