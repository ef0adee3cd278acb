from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Deque, Literal

import numpy as np

from xcal.calibration.base import Adjust
from xcal.clock.oscillator import ppm_error
from xcal.errors import ConfigError, PreconditionError

FineMode = Literal["windowed", "sliding", "per_beacon"]


class ChipMode(str, Enum):
    UNCALIBRATED = "uncalibrated"
    FAST_DONE = "fast_done"
    FINE_TRACKING = "fine_tracking"


@dataclass
class ChippingCalState:
    """Chipping-clock calibrator bookkeeping.

    ``delta_ticks_per_step`` is the change in ticks counted over one beacon
    interval when the chipping setting moves by one, i.e. ``delta_f * T_b``.
    """

    ticks_ideal: int
    delta_ticks_per_step: float
    window_ppm: float = 400.0
    n: int = 10
    fine_mode: FineMode = "windowed"
    mode: ChipMode = ChipMode.UNCALIBRATED
    tick_history: Deque[int] = field(default_factory=deque)
    last_mean_ppm: float | None = None

    def __post_init__(self) -> None:
        if self.window_ppm <= 0:
            raise ConfigError("window_ppm must be positive")
        if self.n < 1:
            raise ConfigError("n must be at least 1")

    @classmethod
    def for_interval(
        cls,
        t_b_s: float,
        chip_delta_f_hz: float,
        nominal_hz: float = 2_000_000.0,
        **kwargs,
    ) -> "ChippingCalState":
        return cls(
            ticks_ideal=int(round(nominal_hz * t_b_s)),
            delta_ticks_per_step=chip_delta_f_hz * t_b_s,
            **kwargs,
        )

    @property
    def window_size(self) -> int:
        return 1 if self.fine_mode == "per_beacon" else self.n

    def record(self, ticks: int) -> bool:
        """Add one consecutive-pair count; True once a decision is due."""
        self.tick_history.append(int(ticks))
        while len(self.tick_history) > self.window_size:
            self.tick_history.popleft()
        return len(self.tick_history) == self.window_size


def fast_calibrate(ticks_measured: int, cal: ChippingCalState) -> int:
    if cal.delta_ticks_per_step == 0:
        raise ConfigError("delta_ticks_per_step must be non-zero")
    correction = int(np.rint(-(ticks_measured - cal.ticks_ideal) / cal.delta_ticks_per_step))
    cal.mode = ChipMode.FAST_DONE
    cal.tick_history.clear()
    return correction


def fine_calibrate(cal: ChippingCalState) -> Adjust:
    if len(cal.tick_history) < cal.window_size:
        raise PreconditionError(
            f"fine calibration needs {cal.window_size} tick counts, have {len(cal.tick_history)}"
        )
    mean_ppm = ppm_error(float(np.mean(cal.tick_history)), float(cal.ticks_ideal))
    cal.last_mean_ppm = mean_ppm
    cal.mode = ChipMode.FINE_TRACKING
    if abs(mean_ppm) > cal.window_ppm:
        action = Adjust.DOWN if mean_ppm > 0 else Adjust.UP
    else:
        action = Adjust.HOLD
    if cal.fine_mode != "sliding" or action is not Adjust.HOLD:
        cal.tick_history.clear()
    return action
