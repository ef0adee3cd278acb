from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from datetime import datetime
from pathlib import Path
from typing import Any, Optional

import orjson
import structlog
import typer

from xcal.config import ScenarioConfig, load_scenario, validate_scenario
from xcal.engine.simulator import run_scenario
from xcal.errors import ConfigError, SweepFailureError
from xcal.logging import current_settings, init_logging, parse_level, run_log
from xcal.params import parse_kv_params, split_values
from xcal.reporting.summary import (
    LOCK_EVENT,
    RunSummary,
    summarize,
    summarize_log,
    write_json,
    write_markdown,
)
from xcal.reporting.trace import read_trace_csv, write_trace_csv


app = typer.Typer(help="크리스털 없는 클럭 보정 시뮬레이터 CLI")

EXIT_CONFIG = 2
EXIT_NOT_LOCKED = 3


@app.callback()
def main(
    json: bool = typer.Option(True, "--json/--no-json", help="구조화 로그(JSON) 사용 여부"),
    log_level: str = typer.Option("info", "--log-level", help="로그 레벨(debug, info, warning, error)"),
):
    init_logging(json=json, level=parse_level(log_level))


def _print(data: Any) -> None:
    print(orjson.dumps(data).decode())


def _scenario_params(cfg: ScenarioConfig) -> dict[str, Any]:
    cal = cfg.calibrator
    return {
        "scenario": cfg.name,
        "seed": cfg.seed,
        "duration_s": cfg.duration_s,
        "sub_step_s": cfg.sub_step_s,
        "temperature": cfg.temperature.kind,
        "rf_noise": cfg.rf_oscillator.noise_model,
        "sweep_enabled": cal.sweep_enabled,
        "fine_mode": cal.fine_mode,
        "n": cal.n,
        "window_ppm": cal.window_ppm,
        "deadband_hz": cfg.deadband_hz,
    }


def _write_outputs(run_dir: Path, trace_path: Path, trace, summary: RunSummary, cfg: ScenarioConfig) -> dict:
    write_trace_csv(trace, trace_path)
    params = _scenario_params(cfg)
    data = {**summary.model_dump(), "params": params}
    write_json(run_dir / "summary.json", data)
    write_markdown(run_dir / "report.md", f"Calibration run - {cfg.name}", summary.model_dump(), params)
    return data


def _sweep_one(cfg_data: dict, trace_path: str) -> dict:
    """One parameter-sweep point; top-level so a process pool can pickle it."""
    cfg = validate_scenario(cfg_data)
    path = Path(trace_path)
    try:
        trace, summary = run_scenario(cfg)
    except SweepFailureError as e:
        write_trace_csv(e.trace, path)
        return {"locked": False, "error": "sweep_failure", "setting": e.setting}
    return _write_outputs(path.parent, path, trace, summary, cfg)


@app.command()
def run(
    scenario: Path = typer.Argument(..., help="시나리오 TOML 경로"),
    seed: Optional[int] = typer.Option(None, help="난수 시드(결정성)", min=0),
    out: Optional[Path] = typer.Option(None, "--out", help="trace CSV 경로(같은 폴더에 summary.json, report.md 저장)"),
    duration: Optional[float] = typer.Option(None, "--duration", help="시뮬레이션 길이(초)"),
    param: list[str] = typer.Option(None, "--set", help="설정 덮어쓰기 key=value (예: calibrator.n=20, 여러 번 지정 가능)"),
):
    """시나리오 한 개를 실행하고 trace.csv / summary.json / report.md 를 저장."""
    log = structlog.get_logger()
    try:
        cfg = load_scenario(scenario)
        overrides: dict[str, Any] = parse_kv_params(param) if param else {}
        if seed is not None:
            overrides["seed"] = seed
        if duration is not None:
            overrides["duration_s"] = duration
        if overrides:
            cfg = cfg.with_overrides(overrides)
    except (ConfigError, ValueError) as e:
        log.error("run.config_error", error=str(e))
        raise typer.Exit(code=EXIT_CONFIG)

    if out is None and cfg.output:
        out = Path(cfg.output)
    if out is None:
        ts = datetime.now().strftime("%Y%m%d_%H%M%S")
        out = Path("runs") / f"run_{cfg.name}_seed{cfg.seed}_{ts}" / "trace.csv"
    run_dir = out.parent
    run_dir.mkdir(parents=True, exist_ok=True)
    with run_log(run_dir / "log.jsonl", run_id=run_dir.name, scenario=cfg.name, seed=cfg.seed):
        log.info("run.start", path=str(scenario), out=str(out))
        try:
            trace, summary = run_scenario(cfg)
        except SweepFailureError as e:
            write_trace_csv(e.trace, out)
            log.error("run.sweep_failure", setting=e.setting, rows=len(e.trace), out=str(out))
            _print({"locked": False, "error": "sweep_failure", "setting": e.setting})
            raise typer.Exit(code=EXIT_NOT_LOCKED)
        data = _write_outputs(run_dir, out, trace, summary, cfg)
        _print(data)
        log.info("run.done", locked=summary.locked, rows=len(trace), out=str(out))
        if not summary.locked:
            raise typer.Exit(code=EXIT_NOT_LOCKED)


@app.command()
def sweep(
    scenario: Path = typer.Argument(..., help="기준 시나리오 TOML 경로"),
    param: str = typer.Option(..., "--param", help="바꿀 설정 경로 (예: calibrator.window_ppm)"),
    values: list[str] = typer.Option(..., "--values", help="값 목록(여러 번 지정 또는 콤마 구분)"),
    seed: Optional[int] = typer.Option(None, help="난수 시드(모든 값에 동일 적용)", min=0),
    jobs: int = typer.Option(1, "--jobs", help="병렬 프로세스 수", min=1),
    outdir: Path = typer.Option(Path("runs"), help="결과 저장 디렉터리"),
):
    """한 설정 값을 바꿔가며 같은 시나리오를 반복 실행하고 요약을 비교."""
    log = structlog.get_logger()
    try:
        base = load_scenario(scenario)
        if seed is not None:
            base = base.with_overrides({"seed": seed})
        points = split_values(values)
        if not points:
            raise ConfigError("--values 가 비어 있습니다.")
        configs = [base.with_overrides({param: v}) for v in points]
    except (ConfigError, ValueError) as e:
        log.error("sweep.config_error", error=str(e))
        raise typer.Exit(code=EXIT_CONFIG)

    ts = datetime.now().strftime("%Y%m%d_%H%M%S")
    sweep_dir = outdir / f"sweep_{base.name}_{param}_{ts}"
    sweep_dir.mkdir(parents=True, exist_ok=True)
    log.info("sweep.run", param=param, values=points, jobs=jobs, out=str(sweep_dir))

    tasks = [
        (cfg.model_dump(), str(sweep_dir / f"{param}={v}" / "trace.csv"))
        for cfg, v in zip(configs, points)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=init_logging, initargs=current_settings()) as pool:
            results = list(pool.map(_sweep_one, *zip(*tasks)))
    else:
        results = [_sweep_one(*t) for t in tasks]

    rows = [{"param": param, "value": v, **res} for v, res in zip(points, results)]
    write_json(sweep_dir / "sweep.json", {"rows": rows})
    _print(rows)
    log.info("sweep.run_done", runs=len(rows), out=str(sweep_dir))
    if not all(r.get("locked") for r in rows):
        raise typer.Exit(code=EXIT_NOT_LOCKED)


@app.command("summarize")
def summarize_cmd(
    trace: Path = typer.Argument(..., help="trace CSV 경로"),
    lock_event: str = typer.Option(LOCK_EVENT, "--lock-event", help="통계 시작 이벤트 이름"),
    window_ppm: float = typer.Option(400.0, "--window-ppm", help="미세 보정 윈도우(ppm)", min=0.0),
):
    """저장된 trace CSV 로부터 요약 통계를 다시 계산."""
    log = structlog.get_logger()
    if not trace.exists():
        log.error("summarize.missing", path=str(trace))
        raise typer.Exit(code=EXIT_CONFIG)
    try:
        df = read_trace_csv(trace)
        summary = summarize(df, lock_event=lock_event, window_ppm=window_ppm)
    except ValueError as e:
        log.error("summarize.invalid", path=str(trace), error=str(e))
        raise typer.Exit(code=EXIT_CONFIG)
    data: dict[str, Any] = summary.model_dump()
    log_path = trace.with_name("log.jsonl")
    if log_path.exists():
        data["log_summary"] = summarize_log(log_path)
    _print(data)
    if not summary.locked:
        raise typer.Exit(code=EXIT_NOT_LOCKED)


if __name__ == "__main__":
    app()
