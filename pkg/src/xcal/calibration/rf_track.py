from __future__ import annotations

from dataclasses import dataclass

from xcal.airlink.receiver import ReceptionReport
from xcal.calibration.base import Adjust
from xcal.errors import ConfigError, PreconditionError


@dataclass(frozen=True)
class RfTrackState:
    deadband_hz: float
    delta_f_hz: float = 90_000.0

    def __post_init__(self) -> None:
        if not 0 <= self.deadband_hz < self.delta_f_hz:
            raise ConfigError(
                f"deadband {self.deadband_hz} Hz must lie in [0, delta_f={self.delta_f_hz} Hz)"
            )

    @classmethod
    def half_step(cls, delta_f_hz: float) -> "RfTrackState":
        return cls(deadband_hz=delta_f_hz / 2, delta_f_hz=delta_f_hz)


def if_track(report: ReceptionReport, track: RfTrackState) -> Adjust:
    """Nudge the RF clock one step toward the beacon carrier.

    Positive IF offset means the (low-side) LO sits below the carrier.
    """
    if not report.crc_ok or report.if_offset_hz is None:
        raise PreconditionError("IF tracking needs a received beacon")
    if report.if_offset_hz > track.deadband_hz:
        return Adjust.UP
    if report.if_offset_hz < -track.deadband_hz:
        return Adjust.DOWN
    return Adjust.HOLD
