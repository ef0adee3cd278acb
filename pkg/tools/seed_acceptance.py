from __future__ import annotations

import argparse
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, Dict, List, Optional

from xcal.clock.oscillator import ppm_error
from xcal.config import ScenarioConfig, load_scenario
from xcal.engine.simulator import run_scenario
from xcal.errors import SweepFailureError
from xcal.logging import init_logging, parse_level
from xcal.reporting.summary import RunSummary, dumps, write_json
from xcal.reporting.trace import TraceRecord, parse_events


Check = Callable[[ScenarioConfig, List[TraceRecord], RunSummary], Dict[str, bool]]


def _values(trace: List[TraceRecord], name: str):
    return [(r, v) for r in trace for n, v in parse_events(r.event) if n == name]


def check_cold_start(cfg, trace, summary):
    finish = _values(trace, "SWEEP_FINISH")
    if not finish:
        return {"locked": False}
    row, _ = finish[0]
    osc = cfg.rf_oscillator.oscillator()
    offset = ppm_error(osc.base_frequency(row.rf_setting), osc.f_nominal_hz)
    return {"sweep_time_le_45s": row.time_s <= 45.0, "finish_within_40ppm": abs(offset) <= 40.0}


def check_chipping_cal(cfg, trace, summary):
    fast = _values(trace, "FAST_CAL")
    checks = [float(v) for _, v in _values(trace, "FINE_CHECK")]
    window = cfg.calibrator.window_ppm
    return {
        "fast_within_1000ppm": bool(fast) and abs(fast[0][0].chip_ppm) <= 1000.0,
        "fine_stays_in_window": len(checks) > 2 and all(abs(c) <= window for c in checks[2:]),
    }


def check_rf_ramp(cfg, trace, summary):
    out = {"within_40ppm_99pct": (summary.fraction_samples_within_40ppm or 0.0) >= 0.99}
    for _, end in cfg.receiver.loss_bursts:
        rx = []
        prev = None
        for r in trace:
            if r.time_s >= end and prev is not None and r.beacons_rx_total > prev:
                rx.append(r)
            prev = r.beacons_rx_total
        out[f"recovered_after_{end:g}s"] = len(rx) >= 2 and abs(rx[1].rf_ppm) <= 40.0
    return out


def check_chipping_ramp(cfg, trace, summary):
    return {"window_95pct": (summary.fraction_within_window or 0.0) >= 0.95}


def check_stability(cfg, trace, summary):
    rf, chip = summary.post_lock_rf_ppm_2sigma or 0.0, summary.post_lock_chip_ppm_2sigma or 0.0
    return {"rf_2sigma": 27.3 <= rf <= 40.9, "chip_2sigma": 222.8 <= chip <= 334.2}


def check_open_loop(cfg, trace, summary):
    last = trace[-1]
    return {
        "rf_drift": abs(last.rf_ppm + 486.4) <= 4.864,
        "chip_drift": abs(last.chip_ppm - 3550.0) <= 35.5,
    }


CHECKS: Dict[str, Check] = {
    "cold_start": check_cold_start,
    "chipping_cal": check_chipping_cal,
    "rf_ramp": check_rf_ramp,
    "chipping_ramp": check_chipping_ramp,
    "stability": check_stability,
    "open_loop_ramp": check_open_loop,
}


def run_seed(path: str, seed: int) -> Dict[str, bool]:
    cfg = load_scenario(Path(path)).with_overrides({"seed": seed})
    try:
        trace, summary = run_scenario(cfg)
    except SweepFailureError:
        return {"sweep_failure": False}
    check = CHECKS.get(cfg.name, lambda c, t, s: {"locked": s.locked})
    return check(cfg, trace, summary)


def main(argv: Optional[List[str]] = None) -> None:
    ap = argparse.ArgumentParser(description="Run a scenario over many seeds and report acceptance pass rates")
    ap.add_argument("scenario", type=Path, help="Scenario TOML (file stem selects the checks)")
    ap.add_argument("--seeds", type=int, default=100, help="Number of seeds, starting at --first-seed")
    ap.add_argument("--first-seed", type=int, default=1)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--required", type=float, default=0.95, help="Pass rate each check must reach")
    ap.add_argument("--out", type=Path, default=None, help="Optional JSON output path")
    ap.add_argument("--log-level", default="warning", help="Engine log level on stderr (debug, info, warning, error)")
    args = ap.parse_args(argv)
    level = parse_level(args.log_level)
    init_logging(json=True, level=level)

    seeds = list(range(args.first_seed, args.first_seed + args.seeds))
    paths = [str(args.scenario)] * len(seeds)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs, initializer=init_logging, initargs=(True, level)) as pool:
            results = list(pool.map(run_seed, paths, seeds))
    else:
        results = [run_seed(p, s) for p, s in zip(paths, seeds)]

    names = sorted({k for r in results for k in r})
    rates = {k: sum(bool(r.get(k)) for r in results) / len(results) for k in names}
    failing = {k: [s for s, r in zip(seeds, results) if not r.get(k)] for k in names}
    report = {
        "scenario": str(args.scenario),
        "seeds": len(seeds),
        "pass_rate": rates,
        "failing_seeds": {k: v for k, v in failing.items() if v},
        "passed": all(v >= args.required for v in rates.values()),
    }
    if args.out:
        write_json(args.out, report)
    print(dumps(report))
    raise SystemExit(0 if report["passed"] else 1)


if __name__ == "__main__":
    main()
