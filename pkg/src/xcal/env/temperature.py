from __future__ import annotations

from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from xcal.errors import DomainError


class TemperatureProfile(BaseModel):
    """Chamber temperature over simulation time.

    - constant: ``base_temp_c`` forever
    - ramp: ``base_temp_c`` rising at ``ramp_rate_c_per_min``, clamped at base + span
    - piecewise: linear between ``segments`` breakpoints, last value held
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["constant", "ramp", "piecewise"] = "constant"
    base_temp_c: float = 25.0
    ramp_rate_c_per_min: float = Field(default=0.0, ge=0)
    ramp_span_c: float = Field(default=0.0, ge=0)
    stability_c: float = Field(default=0.0, ge=0)
    set_error_fraction: float = 0.0
    segments: list[tuple[float, float]] = Field(default_factory=list)

    @field_validator("segments")
    @classmethod
    def _increasing(cls, v: list[tuple[float, float]]):
        times = [t for t, _ in v]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("piecewise breakpoints must be strictly increasing in time")
        return v

    @model_validator(mode="after")
    def _segments_for_piecewise(self) -> "TemperatureProfile":
        if self.kind == "piecewise" and not self.segments:
            raise ValueError("piecewise profile needs at least one breakpoint")
        return self

    def nominal_at(self, t_s: float) -> float:
        """Profile value before chamber imperfections."""
        if t_s < 0:
            raise DomainError(f"negative time {t_s}")
        if self.kind == "constant":
            return self.base_temp_c
        if self.kind == "ramp":
            rise = self.ramp_rate_c_per_min / 60.0 * t_s
            return self.base_temp_c + min(rise, self.ramp_span_c)
        times = [t for t, _ in self.segments]
        if t_s < times[0]:
            raise DomainError(f"t={t_s} s precedes first breakpoint at {times[0]} s")
        temps = [c for _, c in self.segments]
        return float(np.interp(t_s, times, temps))


def temperature_at(profile: TemperatureProfile, t_s: float, jitter_sample: float) -> float:
    return profile.nominal_at(t_s) * (1.0 + profile.set_error_fraction) + jitter_sample
