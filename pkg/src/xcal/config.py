from __future__ import annotations

from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
try:
    from dotenv import load_dotenv
except Exception:  # pragma: no cover
    load_dotenv = None  # type: ignore

from xcal.airlink.beacon import BeaconSource
from xcal.airlink.receiver import ReceiverModel
from xcal.calibration.chipping import FineMode
from xcal.clock.noise import NoiseModel
from xcal.clock.oscillator import TunableOscillator, chipping_oscillator, rf_oscillator
from xcal.env.temperature import TemperatureProfile
from xcal.errors import ConfigError


class OscillatorConfig(TunableOscillator):
    """Oscillator parameters plus the noise process that drives them."""

    noise_model: NoiseModel = "white"
    walk_tau_s: float = Field(default=10.0, gt=0)

    def oscillator(self) -> TunableOscillator:
        return TunableOscillator(**self.model_dump(include=set(TunableOscillator.model_fields)))


class CalibratorConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    sweep_enabled: bool = True
    sweep_start_setting: int = Field(default=0, ge=0)
    listen_duration_s: float = Field(default=1.0, gt=0)
    timekeeping_ppm: float = 0.0
    silence_hz: float = Field(default=1_000_000.0, gt=0)
    sweep_restarts: int = Field(default=0, ge=0)

    chip_calibration_enabled: bool = True
    fast_calibration_enabled: bool = True
    n: int = Field(default=10, ge=1)
    window_ppm: float = Field(default=400.0, gt=0)
    fine_mode: FineMode = "windowed"

    if_tracking_enabled: bool = True
    deadband_hz: Optional[float] = Field(default=None, ge=0)

    lock_lost_beacons: int = Field(default=8, ge=1)


def _default_rf() -> OscillatorConfig:
    return OscillatorConfig(**rf_oscillator().model_dump())


def _default_chip() -> OscillatorConfig:
    return OscillatorConfig(**chipping_oscillator().model_dump())


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "scenario"
    rf_oscillator: OscillatorConfig = Field(default_factory=_default_rf)
    chipping_oscillator: OscillatorConfig = Field(default_factory=_default_chip)
    temperature: TemperatureProfile = Field(default_factory=TemperatureProfile)
    beacon: BeaconSource = Field(default_factory=BeaconSource)
    receiver: ReceiverModel = Field(default_factory=ReceiverModel)
    calibrator: CalibratorConfig = Field(default_factory=CalibratorConfig)
    duration_s: float = Field(default=60.0, gt=0)
    sub_step_s: float = Field(default=0.0125, gt=0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    output: Optional[str] = None

    @model_validator(mode="after")
    def _cross_checks(self) -> "ScenarioConfig":
        if self.sub_step_s > self.beacon.period_s / 10 + 1e-12:
            raise ValueError(
                f"sub_step_s={self.sub_step_s} exceeds T_b/10={self.beacon.period_s / 10}"
            )
        if self.deadband_hz >= self.rf_oscillator.delta_f_hz:
            raise ValueError("calibrator.deadband_hz must be below the RF tuning step")
        if self.calibrator.sweep_start_setting > self.rf_oscillator.max_setting:
            raise ValueError("calibrator.sweep_start_setting exceeds rf_oscillator.max_setting")
        return self

    @property
    def deadband_hz(self) -> float:
        db = self.calibrator.deadband_hz
        return self.rf_oscillator.delta_f_hz / 2 if db is None else db

    def with_overrides(self, overrides: dict[str, Any]) -> "ScenarioConfig":
        """Apply dotted-path overrides (``calibrator.window_ppm=200``) and re-validate."""
        data = self.model_dump()
        for dotted, value in overrides.items():
            node = data
            *parents, leaf = dotted.split(".")
            for key in parents:
                if not isinstance(node.get(key), dict):
                    raise ConfigError(f"알 수 없는 설정 경로: {dotted}")
                node = node[key]
            if leaf not in node:
                raise ConfigError(f"알 수 없는 설정 경로: {dotted}")
            node[leaf] = value
        return validate_scenario(data)


def validate_scenario(data: dict) -> ScenarioConfig:
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"시나리오 설정 검증 실패: {e}") from e


def _read_toml(path: Path) -> dict:
    with path.open("rb") as f:
        return tomllib.load(f)


def load_scenario(path: Path) -> ScenarioConfig:
    """Load a scenario from TOML and env.

    - Unknown keys anywhere in the tree are rejected.
    - XCAL_SEED / XCAL_DURATION_S / XCAL_OUTPUT override the file.
    """
    # Load .env (if available) so environment overlay can pick them up
    if load_dotenv:
        try:
            load_dotenv()
        except Exception:
            pass

    if not path.exists():
        raise ConfigError(f"시나리오 파일이 없습니다: {path}")
    try:
        data = _read_toml(path)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"TOML 파싱 실패: {path}: {e}") from e
    data.setdefault("name", path.stem)

    # overlay env
    seed = os.getenv("XCAL_SEED")
    if seed:
        try:
            data["seed"] = int(seed)
        except ValueError as e:
            raise ConfigError(f"XCAL_SEED 가 정수가 아닙니다: {seed}") from e
    duration = os.getenv("XCAL_DURATION_S")
    if duration:
        try:
            data["duration_s"] = float(duration)
        except ValueError as e:
            raise ConfigError(f"XCAL_DURATION_S 가 숫자가 아닙니다: {duration}") from e
    out = os.getenv("XCAL_OUTPUT")
    if out:
        data["output"] = out

    return validate_scenario(data)
