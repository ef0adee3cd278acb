from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import orjson
import pandas as pd
from pydantic import BaseModel, Field

from xcal.errors import DomainError
from xcal.reporting.trace import TraceRecord, parse_events, records_to_frame


LOCK_EVENT = "LOCK_ACQUIRED"
COMPLIANCE_PPM = 40.0
CORRECTION_EVENTS = ("FAST_CAL", "FINE_STEP", "IF_STEP")


class RunSummary(BaseModel):
    locked: bool
    time_to_lock_s: Optional[float] = None
    post_lock_rf_ppm_max: Optional[float] = None
    post_lock_rf_ppm_2sigma: Optional[float] = None
    post_lock_rf_ppm_mean: Optional[float] = None
    post_lock_chip_ppm_max: Optional[float] = None
    post_lock_chip_ppm_2sigma: Optional[float] = None
    post_lock_chip_ppm_mean: Optional[float] = None
    fraction_samples_within_40ppm: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    fraction_within_window: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    fine_decisions: int = 0
    corrections_after_lock: int = 0
    beacons_rx: int = 0
    beacons_lost: int = 0


def _two_sigma(x: pd.Series) -> float:
    return float(2.0 * x.std(ddof=1)) if len(x) > 1 else 0.0


def _beacon_rows(df: pd.DataFrame) -> pd.Series:
    """True on rows written at a beacon instant (received or lost).

    Event-only rows such as SWEEP_START or SWEEP_FINISH leave the beacon
    totals unchanged.
    """
    heard = df["beacons_rx_total"] + df["beacons_lost_total"]
    return heard.diff().fillna(heard) > 0


def summarize(
    trace: pd.DataFrame | Sequence[TraceRecord],
    lock_event: str = LOCK_EVENT,
    window_ppm: float = 400.0,
) -> RunSummary:
    """Post-lock statistics of a trace.

    Statistics cover rows from the first ``lock_event`` on. A trace without
    that event yields ``locked=False`` and no statistics.
    """
    df = trace if isinstance(trace, pd.DataFrame) else records_to_frame(list(trace))
    if df.empty:
        raise DomainError("cannot summarize an empty trace")

    last = df.iloc[-1]
    totals = dict(beacons_rx=int(last["beacons_rx_total"]), beacons_lost=int(last["beacons_lost_total"]))

    events = [parse_events(cell) for cell in df["event"]]
    lock_rows = [i for i, evs in enumerate(events) if any(name == lock_event for name, _ in evs)]
    if not lock_rows:
        return RunSummary(locked=False, **totals)

    first = lock_rows[0]
    post = df.iloc[first:]
    rf = post["rf_ppm"]
    chip = post["chip_ppm"]
    beacon_rf = rf[_beacon_rows(df).iloc[first:]]

    checks: List[float] = []
    corrections = 0
    for evs in events[first:]:
        for name, value in evs:
            if name == "FINE_CHECK" and value is not None:
                checks.append(float(value))
            elif name in CORRECTION_EVENTS and value is not None and int(value) != 0:
                corrections += 1

    return RunSummary(
        locked=True,
        time_to_lock_s=float(df["time_s"].iat[first]),
        post_lock_rf_ppm_max=float(rf.abs().max()),
        post_lock_rf_ppm_2sigma=_two_sigma(rf),
        post_lock_rf_ppm_mean=float(rf.mean()),
        post_lock_chip_ppm_max=float(chip.abs().max()),
        post_lock_chip_ppm_2sigma=_two_sigma(chip),
        post_lock_chip_ppm_mean=float(chip.mean()),
        fraction_samples_within_40ppm=(
            float(np.mean(beacon_rf.abs() <= COMPLIANCE_PPM)) if len(beacon_rf) else None
        ),
        fraction_within_window=(
            float(np.mean(np.abs(checks) <= window_ppm)) if checks else None
        ),
        fine_decisions=len(checks),
        corrections_after_lock=corrections,
        **totals,
    )


def dumps(data: Any) -> str:
    return orjson.dumps(data, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS).decode()


def write_json(path: Path, data: Dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(data) + "\n")


def write_markdown(path: Path, title: str, summary: Dict[str, Any], params: Optional[Dict[str, Any]] = None) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {title}", ""]
    lines += ["## Summary", ""]
    core_keys = [
        "locked",
        "time_to_lock_s",
        "post_lock_rf_ppm_max",
        "post_lock_rf_ppm_2sigma",
        "post_lock_chip_ppm_max",
        "post_lock_chip_ppm_2sigma",
        "fraction_samples_within_40ppm",
        "fraction_within_window",
        "beacons_rx",
        "beacons_lost",
    ]
    for k in core_keys:
        if k in summary:
            lines.append(f"- {k}: {summary[k]}")
    if params:
        lines += ["", "## Scenario", ""]
        for k, v in params.items():
            lines.append(f"- {k}: {v}")
    path.write_text("\n".join(lines) + "\n")


SATURATION_EVENTS = ("rf.saturated", "chip.saturated")


def _empty_log_summary() -> Dict[str, Any]:
    return {"run_id": None, "events": {}, "errors": [], "saturations": [], "sweep": None, "lock_losses": []}


def summarize_log(path: Path) -> Dict[str, Any]:
    """Digest a run's ``log.jsonl``.

    Counts events by name and collects error events, saturation warnings
    (``setting``/``t_s``), lock losses and the sweep outcome. Lines that are
    not JSON objects are skipped.
    """
    out = _empty_log_summary()
    if not path.exists():
        return out
    counts: Dict[str, int] = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        try:
            obj = orjson.loads(line)
        except orjson.JSONDecodeError:
            continue
        if not isinstance(obj, dict):
            continue
        evt = obj.get("event")
        if not evt:
            continue
        counts[evt] = counts.get(evt, 0) + 1
        out["run_id"] = out["run_id"] or obj.get("run_id")
        if obj.get("level") == "error":
            out["errors"].append(str(obj.get("error") or evt))
        if evt in SATURATION_EVENTS:
            out["saturations"].append({"oscillator": evt.split(".")[0], "setting": obj.get("setting"), "t_s": obj.get("t_s")})
        elif evt == "lock.lost":
            out["lock_losses"].append(obj.get("t_s"))
        elif evt == "sweep.finish":
            out["sweep"] = {"ok": True, "setting": obj.get("setting"), "t_s": obj.get("t_s"), "dwells": obj.get("dwells")}
        elif evt == "sweep.failure":
            out["sweep"] = {"ok": False, "setting": obj.get("setting"), "t_s": obj.get("t_s")}
    out["events"] = counts
    return out
