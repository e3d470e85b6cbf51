from __future__ import annotations

from typing import Any, Dict

import numpy as np

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


class LabException(Exception):
    """Base laboratory exception that carries a process exit code and a diagnostic payload."""

    exit_code: int = EXIT_INTERNAL

    def __init__(self, message: str, *, exit_code: int | None = None, payload: Dict[str, Any] | None = None):
        self.message = message
        if exit_code is not None:
            self.exit_code = exit_code
        self.payload = payload or {}
        super().__init__(message)


class ConfigurationError(LabException):
    """Invalid configuration value or combination (empty families, bad layer sizes, h <= 0, ...)."""

    exit_code = EXIT_USAGE


class UsageError(LabException):
    exit_code = EXIT_USAGE


class ShapeError(LabException, ValueError):
    """Array dimensions do not match what an operation expects."""

    exit_code = EXIT_USAGE


class RelabelIndexError(LabException, IndexError):
    exit_code = EXIT_USAGE


class NumericError(LabException, ArithmeticError):
    """NaN/Inf reached a place where only finite reals are allowed."""

    exit_code = EXIT_NUMERIC


class TrainingDivergedError(NumericError):
    """A training loss became non-finite; `payload` holds the diagnostic snapshot."""


class TheoremCheckFailure(LabException):
    """A randomized distribution violated the uniform worst-case property; payload holds counterexamples."""

    exit_code = EXIT_NUMERIC


class ReproductionIncomplete(LabException):
    exit_code = EXIT_NUMERIC


class StateError(LabException):
    """Operation called on an object in the wrong state (e.g. quantile of an empty queue)."""

    exit_code = EXIT_INTERNAL


class DataError(LabException):
    exit_code = EXIT_IO


class LabIOError(LabException):
    exit_code = EXIT_IO


def require_finite(name: str, value: Any, **context: Any) -> None:
    """Raise NumericError when `value` (scalar or array) holds NaN/Inf."""
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))
        first = bad[0].tolist() if bad.size else []
        raise NumericError(
            f"Non-finite value in {name}",
            payload={"name": name, "first_bad_index": first, "count": int(bad.shape[0]), **context},
        )
