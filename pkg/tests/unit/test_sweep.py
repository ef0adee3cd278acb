import numpy as np
import pytest

from xcal.calibration.base import SweepVerdict
from xcal.calibration.sweep import (
    SweepPhase,
    SweepState,
    required_listen_duration,
    select_best_setting,
    sweep_step,
)
from xcal.errors import SweepFailureError


def _drive(counts, delta_f_hz=90_000.0, silence_hz=1_000_000.0):
    state = SweepState(max_setting=len(counts) - 1, silence_hz=silence_hz)
    while True:
        action = sweep_step(state, counts[state.current_setting], delta_f_hz)
        if action.verdict is SweepVerdict.FINISH:
            return action.setting, state


def _brute_force_best(counts):
    best = max(counts)
    best_len, best_lo = -1, None
    for lo in range(len(counts)):
        for hi in range(lo, len(counts)):
            if all(c == best for c in counts[lo : hi + 1]) and hi - lo > best_len:
                best_len, best_lo = hi - lo, lo
    return best_lo + best_len // 2


def test_midpoint_of_longest_run():
    assert select_best_setting({0: 0, 1: 3, 2: 3, 3: 3, 4: 0}) == 2
    assert select_best_setting({3: 8, 4: 8, 5: 8, 6: 8}) == 4
    assert select_best_setting({0: 1, 1: 8, 2: 2, 3: 8, 4: 8, 5: 8, 6: 1}) == 4


def test_tied_runs_pick_earliest():
    assert select_best_setting({1: 5, 2: 5, 3: 0, 4: 5, 5: 5}) == 1


def test_nothing_heard_has_no_best():
    assert select_best_setting({}) is None
    assert select_best_setting({0: 0, 1: 0}) is None


def test_radio_silence_rule_ends_sweep():
    counts = [0] * 5 + [8] * 5 + [0] * 30
    final, state = _drive(counts)
    # last reception at 9; 12 * 90 kHz is the first span above 1 MHz
    assert state.dwells == 22
    assert max(state.per_setting_count) == 21
    assert final == 7
    assert state.phase is SweepPhase.DONE
    assert state.current_setting == 7


def test_sweep_fails_at_top_without_reception():
    state = SweepState(max_setting=3)
    for _ in range(3):
        assert sweep_step(state, 0, 90_000.0).verdict is SweepVerdict.ADVANCE
    with pytest.raises(SweepFailureError) as exc:
        sweep_step(state, 0, 90_000.0)
    assert exc.value.setting == 3


def test_saturation_after_reception_settles_on_best():
    final, state = _drive([0, 0, 4, 6, 6])
    assert final == 3
    assert state.dwells == 5


def test_finished_sweep_refuses_more_dwells():
    _, state = _drive([0, 8, 0] + [0] * 20)
    with pytest.raises(RuntimeError):
        sweep_step(state, 0, 90_000.0)


def test_sweep_finish_matches_brute_force_oracle():
    rng = np.random.default_rng(2024)
    for _ in range(60):
        n = int(rng.integers(5, 41))
        delta_f = float(rng.choice([90_000.0, 200_000.0, 350_000.0]))
        counts = [0] * n
        lo = int(rng.integers(0, n))
        width = int(rng.integers(1, 12))
        for s in range(lo, min(n, lo + width)):
            counts[s] = int(rng.integers(0, 9))
        counts[lo] = max(counts[lo], 1)
        if rng.random() < 0.5:
            # flat top with ties
            for s in range(lo, min(n, lo + width)):
                counts[s] = 8 if counts[s] > 3 else counts[s]

        final, state = _drive(counts, delta_f_hz=delta_f)
        seen = [state.per_setting_count[s] for s in sorted(state.per_setting_count)]
        assert sorted(state.per_setting_count) == list(range(len(seen)))
        assert final == _brute_force_best(seen)


def test_required_listen_duration_spans_two_periods():
    assert required_listen_duration(0.125, 0.0) == pytest.approx(0.25)
    assert required_listen_duration(0.125, 100.0) == pytest.approx(0.375)
    assert required_listen_duration(0.125, 0.0, margin_periods=6) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        required_listen_duration(0.0, 0.0)


def test_required_listen_duration_at_one_percent_clock_error():
    slow = required_listen_duration(0.5, 10_000.0)
    assert slow >= 1.02
    assert slow * (1 - 0.01) >= 2 * 0.5
    assert (slow / 0.5) == int(slow / 0.5)

    fast = required_listen_duration(0.125, 10_000.0)
    assert fast <= 1.0
    assert fast * (1 - 0.01) >= 2 * 0.125
    assert required_listen_duration(0.125, -10_000.0) == fast


def test_elapsed_time_is_dwells_times_listen_duration():
    counts = [0] * 5 + [8] * 3 + [0] * 20
    state = SweepState(max_setting=len(counts) - 1, listen_duration_s=0.75)
    assert state.elapsed_s == 0.0
    while True:
        action = sweep_step(state, counts[state.current_setting], 90_000.0)
        if action.verdict is SweepVerdict.FINISH:
            break
    # settings 0..19: the silence span exceeds 1 MHz at setting 19
    assert state.dwells == 20
    assert state.elapsed_s == pytest.approx(20 * 0.75)
