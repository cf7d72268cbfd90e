"""
errors.py — Exception hierarchy and CLI exit codes.
"""


class SpinlabError(Exception):
    """Base class for errors the CLI reports with a dedicated exit code."""
    exit_code = 1


class ConfigError(SpinlabError):
    """Bad or missing input files, unknown scenario keys, missing seeds."""
    exit_code = 2


class NumericalError(SpinlabError):
    """Rank-deficient constraint systems, non-convergent integrals, zero norms."""
    exit_code = 3
