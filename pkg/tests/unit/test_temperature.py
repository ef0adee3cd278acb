import pytest
from pydantic import ValidationError

from xcal.env.temperature import TemperatureProfile, temperature_at
from xcal.errors import DomainError


def test_constant_profile():
    p = TemperatureProfile(base_temp_c=30.0)
    assert temperature_at(p, 0.0, 0.0) == 30.0
    assert temperature_at(p, 1e6, 0.0) == 30.0


def test_ramp_rises_then_holds_at_span():
    p = TemperatureProfile(kind="ramp", base_temp_c=25.0, ramp_rate_c_per_min=2.0, ramp_span_c=15.0)
    assert temperature_at(p, 60.0, 0.0) == pytest.approx(27.0)
    assert temperature_at(p, 450.0, 0.0) == pytest.approx(40.0)
    assert temperature_at(p, 900.0, 0.0) == pytest.approx(40.0)


def test_piecewise_interpolates_and_holds_last_value():
    p = TemperatureProfile(kind="piecewise", segments=[(10.0, 20.0), (20.0, 30.0), (40.0, 10.0)])
    assert temperature_at(p, 15.0, 0.0) == pytest.approx(25.0)
    assert temperature_at(p, 30.0, 0.0) == pytest.approx(20.0)
    assert temperature_at(p, 100.0, 0.0) == pytest.approx(10.0)
    with pytest.raises(DomainError):
        temperature_at(p, 5.0, 0.0)


def test_negative_time_rejected():
    with pytest.raises(DomainError):
        temperature_at(TemperatureProfile(), -0.1, 0.0)


def test_set_error_scales_and_jitter_adds():
    p = TemperatureProfile(base_temp_c=25.0, set_error_fraction=0.02)
    assert temperature_at(p, 1.0, 0.1) == pytest.approx(25.6)


def test_profile_validation():
    with pytest.raises(ValidationError):
        TemperatureProfile(kind="piecewise", segments=[(0.0, 20.0), (0.0, 30.0)])
    with pytest.raises(ValidationError):
        TemperatureProfile(kind="piecewise")
    with pytest.raises(ValidationError):
        TemperatureProfile(unknown=1)


def test_ramp_reference_points():
    p = TemperatureProfile(kind="ramp", base_temp_c=25.0, ramp_rate_c_per_min=2.0, ramp_span_c=15.0)
    assert temperature_at(p, 300.0, 0.0) == pytest.approx(35.0)
    assert temperature_at(p, 600.0, 0.0) == pytest.approx(40.0)
