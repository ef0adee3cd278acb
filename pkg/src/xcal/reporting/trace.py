from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import pandas as pd


TRACE_COLUMNS = [
    "time_s",
    "temp_c",
    "rf_setting",
    "rf_freq_hz",
    "rf_ppm",
    "chip_setting",
    "chip_freq_hz",
    "chip_ppm",
    "beacons_rx_total",
    "beacons_lost_total",
    "event",
]

# printf formats per float column; values are quantized through this text form
FLOAT_FORMATS = {
    "time_s": "{:.9f}",
    "temp_c": "{:.6f}",
    "rf_freq_hz": "{:.3f}",
    "rf_ppm": "{:.3f}",
    "chip_freq_hz": "{:.3f}",
    "chip_ppm": "{:.3f}",
}
INT_COLUMNS = ("rf_setting", "chip_setting", "beacons_rx_total", "beacons_lost_total")


@dataclass(frozen=True)
class TraceRecord:
    time_s: float
    temp_c: float
    rf_setting: int
    rf_freq_hz: float
    rf_ppm: float
    chip_setting: int
    chip_freq_hz: float
    chip_ppm: float
    beacons_rx_total: int
    beacons_lost_total: int
    event: str = ""


def _quantize(col: str, value: float) -> float:
    fmt = FLOAT_FORMATS.get(col)
    if fmt is None:
        return value
    text = fmt.format(value)
    # + 0.0 folds -0.0 into 0.0
    return float(text) + 0.0


def records_to_frame(records: Sequence[TraceRecord]) -> pd.DataFrame:
    rows = []
    for r in records:
        row = {c: getattr(r, c) for c in TRACE_COLUMNS}
        for c in FLOAT_FORMATS:
            row[c] = _quantize(c, float(row[c]))
        rows.append(row)
    df = pd.DataFrame(rows, columns=TRACE_COLUMNS)
    for c in INT_COLUMNS:
        df[c] = df[c].astype("int64")
    df["event"] = df["event"].astype(str)
    return df


def _format_frame(df: pd.DataFrame) -> pd.DataFrame:
    out = pd.DataFrame(index=df.index)
    for c in TRACE_COLUMNS:
        fmt = FLOAT_FORMATS.get(c)
        if fmt is not None:
            out[c] = [fmt.format(v + 0.0) for v in df[c]]
        elif c in INT_COLUMNS:
            out[c] = [str(int(v)) for v in df[c]]
        else:
            out[c] = df[c].astype(str)
    return out


def write_trace_csv(trace: pd.DataFrame | Iterable[TraceRecord], path: Path) -> None:
    df = trace if isinstance(trace, pd.DataFrame) else records_to_frame(list(trace))
    path.parent.mkdir(parents=True, exist_ok=True)
    _format_frame(df).to_csv(path, index=False, lineterminator="\n")


def read_trace_csv(path: Path) -> pd.DataFrame:
    df = pd.read_csv(
        path,
        float_precision="round_trip",
        keep_default_na=False,
        dtype={"event": str},
    )
    missing = [c for c in TRACE_COLUMNS if c not in df.columns]
    if missing:
        raise ValueError(f"trace CSV missing columns: {missing}")
    for c in INT_COLUMNS:
        df[c] = df[c].astype("int64")
    for c in FLOAT_FORMATS:
        df[c] = df[c].astype(float)
    return df[TRACE_COLUMNS]


def parse_events(cell: str) -> list[tuple[str, str | None]]:
    """Split an event cell like ``FINE_CHECK=+612.300;FINE_STEP=-1``."""
    out: list[tuple[str, str | None]] = []
    for item in (cell or "").split(";"):
        item = item.strip()
        if not item:
            continue
        name, sep, value = item.partition("=")
        out.append((name, value if sep else None))
    return out
