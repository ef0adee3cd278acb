"""Tunable on-chip oscillators: the RF clock and the 2 MHz chipping clock.

A setting maps linearly onto frequency (``f_min + setting * delta_f``); the
result is perturbed by a linear temperature coefficient and a caller-supplied
noise sample, both in ppm.
"""

from __future__ import annotations

import math
from typing import NamedTuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from xcal.errors import DomainError, RangeViolationError


RF_NOMINAL_HZ = 2_405_000_000.0
RF_DELTA_F_HZ = 90_000.0
RF_TEMPCO_PPM_PER_C = -48.64
RF_NOISE_SIGMA_PPM = 34.1 / 2

CHIP_NOMINAL_HZ = 2_000_000.0
CHIP_DELTA_F_HZ = 800.0
CHIP_TEMPCO_PPM_PER_C = 355.0
CHIP_NOISE_SIGMA_PPM = 278.5 / 2

# The top of the tuning range must reach nominal * (1 + MIN_SPAN).
MIN_SPAN = 1e-2


class TunableOscillator(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    f_nominal_hz: float = Field(gt=0)
    f_at_min_setting_hz: float = Field(gt=0)
    delta_f_hz: float = Field(gt=0)
    setting: int = 0
    max_setting: int = Field(ge=0)
    tempco_ppm_per_c: float = 0.0
    t_ref_c: float = 25.0
    noise_sigma_ppm: float = Field(default=0.0, ge=0)

    @model_validator(mode="after")
    def _check_range(self) -> "TunableOscillator":
        _check_setting(self.setting, self.max_setting)
        top = self.f_at_min_setting_hz + self.max_setting * self.delta_f_hz
        if top < self.f_nominal_hz * (1.0 + MIN_SPAN):
            raise ValueError(
                f"tuning range tops out at {top:.1f} Hz, below nominal +{MIN_SPAN * 1e6:.0f} ppm"
            )
        return self

    def base_frequency(self, setting: int | None = None) -> float:
        """Frequency at reference temperature without noise."""
        s = self.setting if setting is None else setting
        return self.f_at_min_setting_hz + s * self.delta_f_hz

    @property
    def delta_f_ppm(self) -> float:
        return self.delta_f_hz / self.f_nominal_hz * 1e6


class StepResult(NamedTuple):
    oscillator: TunableOscillator
    saturated: bool


def _check_setting(setting: int, max_setting: int) -> None:
    if setting < 0 or setting > max_setting:
        raise RangeViolationError(f"setting {setting} outside [0, {max_setting}]")


def synthesize_frequency(osc: TunableOscillator, temp_c: float, noise_sample: float) -> float:
    _check_setting(osc.setting, osc.max_setting)
    perturbation_ppm = osc.tempco_ppm_per_c * (temp_c - osc.t_ref_c) + noise_sample
    return osc.base_frequency() * (1.0 + perturbation_ppm * 1e-6)


def ppm_error(f_hz: float, f_ref_hz: float) -> float:
    if not f_ref_hz > 0:
        raise DomainError(f"reference frequency must be positive, got {f_ref_hz}")
    return (f_hz - f_ref_hz) / f_ref_hz * 1e6


def step_setting(osc: TunableOscillator, delta: int) -> StepResult:
    target = osc.setting + int(delta)
    clamped = min(max(target, 0), osc.max_setting)
    if clamped == osc.setting:
        return StepResult(osc, clamped != target)
    return StepResult(osc.model_copy(update={"setting": clamped}), clamped != target)


def setting_for(osc: TunableOscillator, f_hz: float) -> int:
    """Nearest in-range setting to ``f_hz`` at reference temperature."""
    s = round((f_hz - osc.f_at_min_setting_hz) / osc.delta_f_hz)
    return int(min(max(s, 0), osc.max_setting))


def oscillator_spanning(
    f_nominal_hz: float,
    delta_f_hz: float,
    *,
    start_offset_ppm: float = 0.0,
    span_ppm: float = 12_000.0,
    tempco_ppm_per_c: float = 0.0,
    noise_sigma_ppm: float = 0.0,
    t_ref_c: float = 25.0,
) -> TunableOscillator:
    """Oscillator whose settings cover nominal ±span_ppm.

    Setting ``n`` with ``f_min + n * delta_f == f_nominal`` exists, so a start
    offset that is a whole number of steps lands exactly.
    """
    steps_below = int(math.ceil(f_nominal_hz * span_ppm * 1e-6 / delta_f_hz - 1e-9))
    f_min = f_nominal_hz - steps_below * delta_f_hz
    max_setting = 2 * steps_below
    start = steps_below + round(f_nominal_hz * start_offset_ppm * 1e-6 / delta_f_hz)
    return TunableOscillator(
        f_nominal_hz=f_nominal_hz,
        f_at_min_setting_hz=f_min,
        delta_f_hz=delta_f_hz,
        setting=int(min(max(start, 0), max_setting)),
        max_setting=max_setting,
        tempco_ppm_per_c=tempco_ppm_per_c,
        t_ref_c=t_ref_c,
        noise_sigma_ppm=noise_sigma_ppm,
    )


def rf_oscillator(**overrides) -> TunableOscillator:
    params = dict(tempco_ppm_per_c=RF_TEMPCO_PPM_PER_C, noise_sigma_ppm=RF_NOISE_SIGMA_PPM)
    params.update(overrides)
    return oscillator_spanning(RF_NOMINAL_HZ, RF_DELTA_F_HZ, **params)


def chipping_oscillator(**overrides) -> TunableOscillator:
    params = dict(tempco_ppm_per_c=CHIP_TEMPCO_PPM_PER_C, noise_sigma_ppm=CHIP_NOISE_SIGMA_PPM)
    params.update(overrides)
    return oscillator_spanning(CHIP_NOMINAL_HZ, CHIP_DELTA_F_HZ, **params)
