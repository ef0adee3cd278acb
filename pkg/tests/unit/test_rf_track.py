import pytest

from xcal.airlink.receiver import ReceptionReport
from xcal.calibration.base import Adjust
from xcal.calibration.rf_track import RfTrackState, if_track
from xcal.errors import ConfigError, PreconditionError


def _rx(offset_hz: float) -> ReceptionReport:
    return ReceptionReport(crc_ok=True, rx_time_s=1.0, if_offset_hz=offset_hz)


def test_low_lo_steps_up_and_high_lo_steps_down():
    track = RfTrackState.half_step(90_000.0)
    assert track.deadband_hz == 45_000.0
    assert if_track(_rx(50_000.0), track) is Adjust.UP
    assert if_track(_rx(-50_000.0), track) is Adjust.DOWN


def test_deadband_holds():
    track = RfTrackState.half_step(90_000.0)
    assert if_track(_rx(40_000.0), track) is Adjust.HOLD
    assert if_track(_rx(45_000.0), track) is Adjust.HOLD
    assert if_track(_rx(-45_000.0), track) is Adjust.HOLD


def test_zero_deadband_corrects_every_offset():
    track = RfTrackState(deadband_hz=0.0)
    assert if_track(_rx(1.0), track) is Adjust.UP
    assert if_track(_rx(0.0), track) is Adjust.HOLD


def test_deadband_must_stay_below_step():
    with pytest.raises(ConfigError):
        RfTrackState(deadband_hz=90_000.0, delta_f_hz=90_000.0)
    with pytest.raises(ConfigError):
        RfTrackState(deadband_hz=-1.0)


def test_lost_beacon_cannot_be_tracked():
    with pytest.raises(PreconditionError):
        if_track(ReceptionReport(crc_ok=False, rx_time_s=1.0), RfTrackState.half_step(90_000.0))


@pytest.mark.parametrize("deadband_hz", [30_000.0, 45_000.0])
def test_if_track_limit_cycle_stays_within_bound(deadband_hz):
    # noiseless RF clock drifting at a constant rate, corrected once per beacon
    delta_f, f_c, t_b = 90_000.0, 2.405e9, 0.125
    drift_ppm_per_s = 2.0 / 60.0 * 48.64  # 2 C/min ramp on the RF tempco
    track = RfTrackState(deadband_hz=deadband_hz, delta_f_hz=delta_f)
    bound = (delta_f / 2 + deadband_hz) / f_c * 1e6 + drift_ppm_per_s * t_b

    setting = 0
    worst = 0.0
    for k in range(1, 4_000):
        drift_hz = -drift_ppm_per_s * k * t_b * 1e-6 * f_c
        lo = f_c + setting * delta_f + drift_hz
        err_ppm = (lo - f_c) / f_c * 1e6
        if k > 10:
            worst = max(worst, abs(err_ppm))
        adj = if_track(_rx(f_c - lo), track)
        setting += int(adj)
    assert worst <= bound + 1e-9
