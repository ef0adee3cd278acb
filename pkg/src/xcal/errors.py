from __future__ import annotations

from typing import Any, Optional


class CalibrationError(Exception):
    pass


class ConfigError(CalibrationError, ValueError):
    pass


class RangeViolationError(CalibrationError, ValueError):
    pass


class DomainError(CalibrationError, ValueError):
    pass


class PreconditionError(CalibrationError, RuntimeError):
    pass


class SweepFailureError(CalibrationError):
    """Sweep hit the top of the tuning range without hearing a single beacon.

    The engine re-raises it with the partial trace attached so the caller can
    inspect what was dwelled before restarting.
    """

    def __init__(self, message: str, setting: int, trace: Optional[list[Any]] = None) -> None:
        super().__init__(message)
        self.setting = setting
        self.trace = trace if trace is not None else []
