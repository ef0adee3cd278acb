from __future__ import annotations

import math

from pydantic import BaseModel, ConfigDict, Field

from xcal.errors import DomainError


class BeaconSource(BaseModel):
    """Crystal-based join proxy emitting a beacon every ``period_s``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    f_c_hz: float = Field(default=2_405_000_000.0, gt=0)
    period_s: float = Field(default=0.125, gt=0)
    tx_ppm_error: float = Field(default=10.0, ge=-40.0, le=40.0)
    channel_bandwidth_hz: float = Field(default=2_000_000.0, gt=0)
    phase_s: float = Field(default=0.05, ge=0)

    @property
    def carrier_hz(self) -> float:
        return self.f_c_hz * (1.0 + self.tx_ppm_error * 1e-6)

    @property
    def true_period_s(self) -> float:
        return self.period_s * (1.0 + self.tx_ppm_error * 1e-6)


def beacon_times(src: BeaconSource, horizon_s: float) -> list[float]:
    if not horizon_s > 0:
        raise DomainError(f"horizon must be positive, got {horizon_s}")
    step = src.true_period_s
    n = max(int(math.ceil((horizon_s - src.phase_s) / step)) + 1, 0)
    # k * step, not a running sum
    return [t for t in (src.phase_s + k * step for k in range(n)) if t < horizon_s - 1e-12]
