"""Seeded random streams for reproducible runs.

One scenario seed fans out into independent named streams, so switching one
source of randomness off (say, beacon loss) leaves the others' draws unchanged.
"""

from __future__ import annotations

import zlib
from typing import Dict

import numpy as np


STREAMS = ("noise-rf", "noise-chip", "loss", "jitter")


class RandomStreams:
    def __init__(self, seed: int) -> None:
        self.seed = int(seed)
        self._streams: Dict[str, np.random.Generator] = {}

    def __getitem__(self, name: str) -> np.random.Generator:
        gen = self._streams.get(name)
        if gen is None:
            ss = np.random.SeedSequence([self.seed, zlib.crc32(name.encode())])
            gen = np.random.default_rng(ss)
            self._streams[name] = gen
        return gen
