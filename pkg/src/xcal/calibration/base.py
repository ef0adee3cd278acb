from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Optional


class Adjust(IntEnum):
    """One-step setting action; the value is the signed setting delta."""

    DOWN = -1
    HOLD = 0
    UP = 1


class SweepVerdict(str, Enum):
    ADVANCE = "advance"
    FINISH = "finish"


@dataclass(frozen=True)
class SweepAction:
    verdict: SweepVerdict
    setting: Optional[int] = None  # final setting on FINISH

    @classmethod
    def advance(cls) -> "SweepAction":
        return cls(SweepVerdict.ADVANCE)

    @classmethod
    def finish(cls, setting: int) -> "SweepAction":
        return cls(SweepVerdict.FINISH, setting)
