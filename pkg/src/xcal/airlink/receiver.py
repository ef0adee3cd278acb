"""Crystal-free receiver front end.

Sign convention: low-side LO. The measured IF is ``carrier - LO``, so an LO
running low shows up as an IF above nominal and the offset reported here is
positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from xcal.airlink.beacon import BeaconSource


class ReceiverModel(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    capture_halfwidth_hz: float = Field(default=1_000_000.0, gt=0)
    if_nominal_hz: float = Field(default=2_500_000.0, gt=0)
    loss_prob: float = Field(default=0.0, ge=0.0, le=1.0)
    loss_bursts: list[tuple[float, float]] = Field(default_factory=list)
    if_resolution_hz: float = Field(default=0.0, ge=0)

    @field_validator("loss_bursts")
    @classmethod
    def _ordered(cls, v: list[tuple[float, float]]):
        for start, end in v:
            if end <= start:
                raise ValueError(f"loss burst ({start}, {end}) must end after it starts")
        return v

    def in_burst(self, t_s: float) -> bool:
        return any(start <= t_s < end for start, end in self.loss_bursts)


@dataclass(frozen=True)
class ReceptionReport:
    crc_ok: bool
    rx_time_s: float
    if_offset_hz: Optional[float] = None  # None when the beacon was lost
    ticks_since_last_rx: Optional[int] = None  # None unless the previous beacon was received too


def attempt_reception(
    rx_rf_freq_hz: float,
    src: BeaconSource,
    rx: ReceiverModel,
    t_s: float,
    loss_sample: float,
) -> ReceptionReport:
    carrier = src.carrier_hz
    tuning_error = rx_rf_freq_hz - carrier
    ok = (
        abs(tuning_error) <= rx.capture_halfwidth_hz
        and loss_sample >= rx.loss_prob
        and not rx.in_burst(t_s)
    )
    if not ok:
        return ReceptionReport(crc_ok=False, rx_time_s=t_s)
    measured_if = (carrier - rx_rf_freq_hz) + rx.if_nominal_hz
    if rx.if_resolution_hz > 0:
        measured_if = round(measured_if / rx.if_resolution_hz) * rx.if_resolution_hz
    return ReceptionReport(crc_ok=True, rx_time_s=t_s, if_offset_hz=measured_if - rx.if_nominal_hz)
