from __future__ import annotations

from typing import Sequence

import numpy as np

from xcal.errors import DomainError


def integrate_ticks(samples: Sequence[tuple[float, float]], from_s: float, to_s: float) -> float:
    """Integral of a piecewise-constant frequency series over [from_s, to_s].

    ``samples`` are ``(time_s, freq_hz)`` pairs sorted by time; each frequency
    holds until the next sample. The first sample also covers any part of the
    interval before it.
    """
    if not to_s > from_s:
        raise DomainError(f"empty interval [{from_s}, {to_s}]")
    if len(samples) == 0:
        raise DomainError("no frequency samples")
    times = np.asarray([t for t, _ in samples], dtype=float)
    freqs = np.asarray([f for _, f in samples], dtype=float)
    edges = np.append(times, np.inf)
    edges[0] = -np.inf
    lo = np.clip(edges[:-1], from_s, to_s)
    hi = np.clip(edges[1:], from_s, to_s)
    return float(np.sum(freqs * (hi - lo)))


def count_ticks(samples: Sequence[tuple[float, float]], from_s: float, to_s: float) -> int:
    return int(round(integrate_ticks(samples, from_s, to_s)))


class TickCounter:
    """Running tick accumulator between two beacon receptions.

    Accumulates frequency * dt without rounding; ``close`` rounds once and
    restarts the count.
    """

    def __init__(self) -> None:
        self._acc = 0.0

    def accumulate(self, freq_hz: float, dt_s: float) -> None:
        if dt_s > 0:
            self._acc += freq_hz * dt_s

    def close(self) -> int:
        n = int(round(self._acc))
        self._acc = 0.0
        return n

    def reset(self) -> None:
        self._acc = 0.0
