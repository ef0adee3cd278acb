"""Discrete-event wiring of oscillators, chamber, air link and calibrator.

Three simpy processes share one device:

- the sub-step clock redraws temperature jitter and oscillator noise every
  ``sub_step_s`` and integrates chipping ticks;
- the beacon source fires at every beacon instant, attempts a reception and
  feeds the calibrator;
- the sweep dweller (cold start only) closes one ``t_L`` dwell at a time.

A trace row is written at every beacon instant and at every other instant
that carries a calibration event, after that instant's actions are applied.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Any, Optional

import simpy
import structlog

from xcal.airlink.beacon import beacon_times
from xcal.airlink.receiver import ReceptionReport, attempt_reception
from xcal.airlink.ticks import TickCounter
from xcal.calibration.base import Adjust, SweepVerdict
from xcal.calibration.chipping import ChipMode, ChippingCalState, fast_calibrate, fine_calibrate
from xcal.calibration.rf_track import RfTrackState, if_track
from xcal.calibration.sweep import SweepPhase, SweepState, sweep_step
from xcal.clock.noise import make_noise
from xcal.clock.oscillator import TunableOscillator, ppm_error, step_setting, synthesize_frequency
from xcal.config import ScenarioConfig
from xcal.engine.rng import RandomStreams
from xcal.env.temperature import temperature_at
from xcal.errors import SweepFailureError
from xcal.reporting.summary import RunSummary, summarize
from xcal.reporting.trace import TraceRecord, records_to_frame


SWEEPING = "sweeping"
TRACKING = "tracking"


class Simulation:
    def __init__(self, cfg: ScenarioConfig, log: Optional[Any] = None) -> None:
        self.cfg = cfg
        self.log = log if log is not None else structlog.get_logger().bind(component="engine")
        self.env = simpy.Environment()
        streams = RandomStreams(cfg.seed)
        self._loss_rng = streams["loss"]
        self._jitter_rng = streams["jitter"]

        rf_cfg, chip_cfg = cfg.rf_oscillator, cfg.chipping_oscillator
        self.rf: TunableOscillator = rf_cfg.oscillator()
        self.chip: TunableOscillator = chip_cfg.oscillator()
        self._rf_noise = make_noise(rf_cfg.noise_model, rf_cfg.noise_sigma_ppm, streams["noise-rf"], rf_cfg.walk_tau_s)
        self._chip_noise = make_noise(
            chip_cfg.noise_model, chip_cfg.noise_sigma_ppm, streams["noise-chip"], chip_cfg.walk_tau_s
        )

        cal = cfg.calibrator
        self.sweep = self._new_sweep()
        self.chip_cal = ChippingCalState.for_interval(
            cfg.beacon.period_s,
            self.chip.delta_f_hz,
            nominal_hz=self.chip.f_nominal_hz,
            window_ppm=cal.window_ppm,
            n=cal.n,
            fine_mode=cal.fine_mode,
        )
        self.rf_track = RfTrackState(deadband_hz=cfg.deadband_hz, delta_f_hz=self.rf.delta_f_hz)

        self.phase = SWEEPING if cal.sweep_enabled else TRACKING
        self.trace: list[TraceRecord] = []
        self.rx_total = 0
        self.lost_total = 0
        self._dwell_count = 0
        self._ticks = TickCounter()
        self._prev_ok = False
        self._lost_streak = 0
        self._lock_lost = False
        self._pending: list[str] = []
        self._failure: Optional[SweepFailureError] = None

        self._last_t = 0.0
        self.temp_c = 0.0
        self._rf_noise_ppm = 0.0
        self._chip_noise_ppm = 0.0
        self.rf_freq_hz = 0.0
        self.chip_freq_hz = 0.0

    # --- instantaneous physics ---
    def _resample(self, t: float) -> None:
        stab = self.cfg.temperature.stability_c
        jitter = float(self._jitter_rng.uniform(-stab, stab))
        self.temp_c = temperature_at(self.cfg.temperature, t, jitter)
        dt = self.cfg.sub_step_s
        self._rf_noise_ppm = self._rf_noise.sample(dt)
        self._chip_noise_ppm = self._chip_noise.sample(dt)
        self._refresh()

    def _refresh(self) -> None:
        self.rf_freq_hz = synthesize_frequency(self.rf, self.temp_c, self._rf_noise_ppm)
        self.chip_freq_hz = synthesize_frequency(self.chip, self.temp_c, self._chip_noise_ppm)

    def _advance(self, t: float) -> None:
        self._ticks.accumulate(self.chip_freq_hz, t - self._last_t)
        self._last_t = t

    def _set_rf(self, osc: TunableOscillator) -> None:
        self.rf = osc
        self._refresh()

    def _step_rf(self, delta: int) -> bool:
        res = step_setting(self.rf, delta)
        if res.saturated:
            self.log.warning("rf.saturated", setting=res.oscillator.setting, t_s=self.env.now)
        self._set_rf(res.oscillator)
        return res.saturated

    def _step_chip(self, delta: int) -> None:
        res = step_setting(self.chip, delta)
        if res.saturated:
            self.log.warning("chip.saturated", setting=res.oscillator.setting, t_s=self.env.now)
        self.chip = res.oscillator
        self._refresh()

    # --- trace ---
    def _emit(self, event: str) -> None:
        self._pending.append(event)

    def _write_row(self, t: float) -> None:
        rec = TraceRecord(
            time_s=t,
            temp_c=self.temp_c,
            rf_setting=self.rf.setting,
            rf_freq_hz=self.rf_freq_hz,
            rf_ppm=ppm_error(self.rf_freq_hz, self.rf.f_nominal_hz),
            chip_setting=self.chip.setting,
            chip_freq_hz=self.chip_freq_hz,
            chip_ppm=ppm_error(self.chip_freq_hz, self.chip.f_nominal_hz),
            beacons_rx_total=self.rx_total,
            beacons_lost_total=self.lost_total,
            event=";".join(self._pending),
        )
        self._pending = []
        if self.trace and abs(self.trace[-1].time_s - t) < 1e-9:
            # same instant from another process: keep one row, newest state
            prev = self.trace.pop()
            rec = replace(rec, event=";".join(e for e in (prev.event, rec.event) if e))
        self.trace.append(rec)

    # --- processes ---
    def _clock(self):
        dt = self.cfg.sub_step_s
        k = 0
        while True:
            k += 1
            yield self.env.timeout(max(k * dt - self.env.now, 0.0))
            now = self.env.now
            self._advance(now)
            self._resample(now)

    def _beacons(self):
        for t in beacon_times(self.cfg.beacon, self.cfg.duration_s):
            yield self.env.timeout(max(t - self.env.now, 0.0))
            self._on_beacon(self.env.now)

    def _new_sweep(self) -> SweepState:
        cal = self.cfg.calibrator
        return SweepState(
            current_setting=cal.sweep_start_setting,
            max_setting=self.rf.max_setting,
            listen_duration_s=cal.listen_duration_s,
            silence_hz=cal.silence_hz,
        )

    def _sweeper(self):
        cal = self.cfg.calibrator
        self._set_rf(self.rf.model_copy(update={"setting": cal.sweep_start_setting}))
        self._emit("SWEEP_START")
        self._write_row(self.env.now)
        self.log.info("sweep.start", setting=self.rf.setting, listen_s=cal.listen_duration_s)
        dwell = cal.listen_duration_s / (1.0 + cal.timekeeping_ppm * 1e-6)
        restarts_left = cal.sweep_restarts
        t0 = self.env.now
        k = 0
        while self.phase == SWEEPING:
            k += 1
            yield self.env.timeout(max(t0 + k * dwell - self.env.now, 0.0))
            now = self.env.now
            self._advance(now)
            try:
                action = sweep_step(self.sweep, self._dwell_count, self.rf.delta_f_hz)
            except SweepFailureError as e:
                self._dwell_count = 0
                if restarts_left > 0:
                    restarts_left -= 1
                    self.log.warning(
                        "sweep.restart",
                        setting=e.setting,
                        t_s=now,
                        elapsed_s=self.sweep.elapsed_s,
                        restarts_left=restarts_left,
                    )
                    self.sweep = self._new_sweep()
                    self._set_rf(self.rf.model_copy(update={"setting": cal.sweep_start_setting}))
                    self._emit("SWEEP_RESTART")
                    self._write_row(now)
                    t0, k = now, 0
                    continue
                self.log.error("sweep.failure", setting=e.setting, t_s=now, elapsed_s=self.sweep.elapsed_s)
                self._failure = e
                self._stop.succeed()
                return
            self._dwell_count = 0
            if action.verdict is SweepVerdict.ADVANCE:
                self._set_rf(self.rf.model_copy(update={"setting": self.sweep.current_setting}))
                continue
            self._set_rf(self.rf.model_copy(update={"setting": action.setting}))
            self.phase = TRACKING
            self._prev_ok = False
            self._emit(f"SWEEP_FINISH={action.setting}")
            self._emit("LOCK_ACQUIRED")
            self._write_row(now)
            self.log.info(
                "sweep.finish",
                setting=action.setting,
                dwells=self.sweep.dwells,
                elapsed_s=self.sweep.elapsed_s,
                t_s=now,
                rf_ppm=round(ppm_error(self.rf.base_frequency(), self.rf.f_nominal_hz), 3),
            )

    def _deadline(self):
        yield self.env.timeout(self.cfg.duration_s)
        if not self._stop.triggered:
            self._stop.succeed()

    # --- beacon handling ---
    def _on_beacon(self, t: float) -> None:
        self._advance(t)
        ticks = self._ticks.close()
        report = attempt_reception(self.rf_freq_hz, self.cfg.beacon, self.cfg.receiver, t, float(self._loss_rng.random()))
        if report.crc_ok:
            self.rx_total += 1
        else:
            self.lost_total += 1

        if self.phase == SWEEPING:
            if report.crc_ok:
                self._dwell_count += 1
        elif report.crc_ok:
            if self._prev_ok:
                report = replace(report, ticks_since_last_rx=ticks)
            self._on_received(report)
        else:
            self._on_lost(t)
        self._prev_ok = report.crc_ok and self.phase == TRACKING
        self._write_row(t)

    def _on_lost(self, t: float) -> None:
        self._lost_streak += 1
        if self._lost_streak == self.cfg.calibrator.lock_lost_beacons and not self._lock_lost:
            self._lock_lost = True
            self._emit("LOCK_LOST")
            self.log.warning("lock.lost", t_s=t, lost=self._lost_streak)

    def _on_received(self, report: ReceptionReport) -> None:
        cal = self.cfg.calibrator
        if self._lock_lost:
            self._lock_lost = False
            self._emit("LOCK_ACQUIRED")
            self.log.info("lock.acquired", t_s=report.rx_time_s, lost=self._lost_streak)
        self._lost_streak = 0

        if cal.chip_calibration_enabled and report.ticks_since_last_rx is not None:
            self._calibrate_chip(report.ticks_since_last_rx)

        if cal.if_tracking_enabled:
            adj = if_track(report, self.rf_track)
            if adj is not Adjust.HOLD:
                self._step_rf(int(adj))
                self._emit(f"IF_STEP={int(adj):+d}")
                self.log.debug("rf.if_step", if_offset_hz=report.if_offset_hz, step=int(adj), setting=self.rf.setting)

    def _calibrate_chip(self, ticks: int) -> None:
        cal = self.chip_cal
        if cal.mode is ChipMode.UNCALIBRATED:
            if self.cfg.calibrator.fast_calibration_enabled:
                correction = fast_calibrate(ticks, cal)
                self._step_chip(correction)
                self._emit(f"FAST_CAL={correction:+d}")
                self.log.info("chip.fast_cal", ticks=ticks, correction=correction, setting=self.chip.setting)
                return
            cal.mode = ChipMode.FAST_DONE
        if not cal.record(ticks):
            return
        adj = fine_calibrate(cal)
        self._emit(f"FINE_CHECK={cal.last_mean_ppm:+.3f}")
        if adj is not Adjust.HOLD:
            self._step_chip(int(adj))
            self._emit(f"FINE_STEP={int(adj):+d}")
            self.log.debug("chip.fine_step", mean_ppm=cal.last_mean_ppm, step=int(adj), setting=self.chip.setting)

    # --- driver ---
    def run(self) -> list[TraceRecord]:
        cfg = self.cfg
        self.log.info("scenario.start", scenario=cfg.name, seed=cfg.seed, duration_s=cfg.duration_s)
        self._stop = self.env.event()
        self._resample(0.0)
        if self.phase == TRACKING:
            self._emit("LOCK_ACQUIRED")
            self._write_row(0.0)
        self.env.process(self._clock())
        if self.phase == SWEEPING:
            self.env.process(self._sweeper())
        self.env.process(self._beacons())
        self.env.process(self._deadline())
        self.env.run(until=self._stop)
        if self._failure is not None:
            failure = self._failure
            raise SweepFailureError(str(failure), setting=failure.setting, trace=list(self.trace)) from failure
        self.log.info(
            "scenario.done",
            rows=len(self.trace),
            beacons_rx=self.rx_total,
            beacons_lost=self.lost_total,
            rf_setting=self.rf.setting,
            chip_setting=self.chip.setting,
        )
        return self.trace


def run_scenario(cfg: ScenarioConfig, log: Optional[Any] = None) -> tuple[list[TraceRecord], RunSummary]:
    trace = Simulation(cfg, log=log).run()
    summary = summarize(records_to_frame(trace), window_ppm=cfg.calibrator.window_ppm)
    return trace, summary
