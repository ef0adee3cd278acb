"""Frequency-noise sources feeding ``synthesize_frequency``.

Both sources yield one ppm sample per engine sub-step. ``WhiteNoise`` draws
independent samples; ``BoundedRandomWalk`` is a mean-reverting walk whose
stationary spread equals ``sigma_ppm``, so a long run of either reproduces the
same 2-sigma band while the walk wanders slowly enough for a feedback loop to
follow it.
"""

from __future__ import annotations

import math
from typing import Literal, Protocol

import numpy as np


NoiseModel = Literal["white", "random_walk"]


class NoiseSource(Protocol):
    def sample(self, dt_s: float) -> float:  # ppm
        ...


class WhiteNoise:
    def __init__(self, sigma_ppm: float, rng: np.random.Generator) -> None:
        self._sigma = float(sigma_ppm)
        self._rng = rng

    def sample(self, dt_s: float) -> float:
        return float(self._rng.normal(0.0, self._sigma)) if self._sigma > 0 else 0.0


class BoundedRandomWalk:
    """First-order autoregressive walk with correlation time ``tau_s``."""

    def __init__(self, sigma_ppm: float, tau_s: float, rng: np.random.Generator) -> None:
        if tau_s <= 0:
            raise ValueError("tau_s must be positive.")
        self._sigma = float(sigma_ppm)
        self._tau = float(tau_s)
        self._rng = rng
        self._x = float(rng.normal(0.0, self._sigma)) if self._sigma > 0 else 0.0

    def sample(self, dt_s: float) -> float:
        if self._sigma <= 0:
            return 0.0
        a = math.exp(-float(dt_s) / self._tau)
        self._x = a * self._x + math.sqrt(1.0 - a * a) * float(self._rng.normal(0.0, self._sigma))
        return self._x


def make_noise(model: NoiseModel, sigma_ppm: float, rng: np.random.Generator, tau_s: float = 10.0) -> NoiseSource:
    if model == "white":
        return WhiteNoise(sigma_ppm, rng)
    if model == "random_walk":
        return BoundedRandomWalk(sigma_ppm, tau_s, rng)
    raise ValueError(f"unknown noise model: {model}")
