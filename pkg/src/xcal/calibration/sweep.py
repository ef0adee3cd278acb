"""Cold-start beacon-channel acquisition.

The RF clock starts at its lowest setting and climbs one ``delta_f`` per dwell
of ``t_L`` seconds, counting CRC-OK beacons at each setting. Once beacons have
been heard, the sweep ends after more than ``silence_hz`` of radio silence
above the last setting that heard one, and the RF clock is parked on the
centre of the best-performing run of settings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import groupby
from typing import Dict, Optional

from xcal.calibration.base import SweepAction
from xcal.errors import SweepFailureError

SILENCE_HZ = 1_000_000.0


class SweepPhase(str, Enum):
    BELOW_CHANNEL = "below_channel"
    IN_CHANNEL = "in_channel"
    DONE = "done"


@dataclass
class SweepState:
    current_setting: int = 0
    max_setting: int = 0
    listen_duration_s: float = 1.0
    per_setting_count: Dict[int, int] = field(default_factory=dict)
    last_rx_setting: Optional[int] = None
    phase: SweepPhase = SweepPhase.BELOW_CHANNEL
    silence_hz: float = SILENCE_HZ
    dwells: int = 0

    @property
    def best_setting(self) -> Optional[int]:
        return select_best_setting(self.per_setting_count)

    def silence_span_hz(self, delta_f_hz: float) -> float:
        if self.last_rx_setting is None:
            return 0.0
        return (self.current_setting - self.last_rx_setting) * delta_f_hz

    @property
    def elapsed_s(self) -> float:
        return self.dwells * self.listen_duration_s


def select_best_setting(per_setting_count: Dict[int, int]) -> Optional[int]:
    """Midpoint of the longest contiguous run of max-count settings.

    Runs are compared by length; the earliest wins a tie. Returns None when
    nothing was received.
    """
    if not per_setting_count:
        return None
    best = max(per_setting_count.values())
    if best <= 0:
        return None
    winners = sorted(s for s, c in per_setting_count.items() if c == best)
    runs = []
    for _, grp in groupby(enumerate(winners), key=lambda p: p[1] - p[0]):
        members = [s for _, s in grp]
        runs.append((members[0], members[-1]))
    lo, hi = max(runs, key=lambda r: (r[1] - r[0], -r[0]))
    return lo + (hi - lo) // 2


def sweep_step(state: SweepState, count_this_setting: int, delta_f_hz: float) -> SweepAction:
    """Record one dwell and decide whether to climb or stop.

    Mutates ``state``; the caller tunes the RF clock to ``state.current_setting``
    on ADVANCE or to ``action.setting`` on FINISH.
    """
    if state.phase is SweepPhase.DONE:
        raise RuntimeError("sweep already finished")
    state.per_setting_count[state.current_setting] = int(count_this_setting)
    state.dwells += 1
    if count_this_setting > 0:
        state.last_rx_setting = state.current_setting
        state.phase = SweepPhase.IN_CHANNEL

    if state.phase is SweepPhase.IN_CHANNEL and state.silence_span_hz(delta_f_hz) > state.silence_hz:
        return _finish(state)

    if state.current_setting >= state.max_setting:
        if state.phase is SweepPhase.BELOW_CHANNEL:
            raise SweepFailureError(
                f"reached max setting {state.max_setting} without receiving a beacon",
                setting=state.current_setting,
            )
        # top of the range while still in the channel: settle for what was heard
        return _finish(state)

    state.current_setting += 1
    return SweepAction.advance()


def _finish(state: SweepState) -> SweepAction:
    final = state.best_setting
    assert final is not None
    state.phase = SweepPhase.DONE
    state.current_setting = final
    return SweepAction.finish(final)


def required_listen_duration(t_b_s: float, timekeeping_ppm: float, margin_periods: int = 0) -> float:
    """Shortest whole-period dwell that still spans two beacon periods of true time.

    A local timekeeping clock that runs fast by ``timekeeping_ppm`` ends a
    nominal dwell of ``t`` after only ``t * (1 - e)`` of true time.
    """
    if not t_b_s > 0:
        raise ValueError("t_b_s must be positive.")
    e = abs(timekeeping_ppm) * 1e-6
    if e >= 1.0:
        raise ValueError("timekeeping error must be below 1e6 ppm.")
    periods = math.ceil(2.0 / (1.0 - e) - 1e-9) + int(margin_periods)
    return periods * t_b_s
