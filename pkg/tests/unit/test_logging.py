import logging

import orjson
import structlog

from xcal.logging import init_logging, parse_level, round_sim_fields, run_log


def test_parse_level_names_and_fallback():
    assert parse_level("DEBUG") == logging.DEBUG
    assert parse_level("warning") == logging.WARNING
    assert parse_level("verbose") == logging.INFO
    assert parse_level(None) == logging.INFO


def test_round_sim_fields_uses_trace_precision():
    ev = {
        "t_s": 12.299999999999999,
        "rf_ppm": -26.66666666,
        "if_offset_hz": 44999.99999,
        "temp_c": 25.0000001,
        "setting": 22,
        "count": 1.23456789,
    }
    out = round_sim_fields(None, "info", ev)
    assert out["t_s"] == 12.3
    assert out["rf_ppm"] == -26.667
    assert out["if_offset_hz"] == 45000.0
    assert out["temp_c"] == 25.0
    assert out["setting"] == 22
    # no recognised suffix: untouched
    assert out["count"] == 1.23456789


def test_run_log_writes_context_and_detaches(tmp_path):
    init_logging(json=True, level=logging.INFO)
    path = tmp_path / "run" / "log.jsonl"
    root = logging.getLogger()
    before = list(root.handlers)

    with run_log(path, run_id="r1", scenario="cold_start", seed=3) as handler:
        assert handler in root.handlers
        structlog.get_logger().info("sweep.finish", setting=22, t_s=42.050000000001)

    assert root.handlers == before
    assert structlog.contextvars.get_contextvars() == {}

    structlog.get_logger().info("after.run")
    lines = [orjson.loads(x) for x in path.read_text(encoding="utf-8").splitlines() if x.strip()]
    assert [x["event"] for x in lines] == ["sweep.finish"]
    rec = lines[0]
    assert rec["run_id"] == "r1" and rec["scenario"] == "cold_start" and rec["seed"] == 3
    assert rec["t_s"] == 42.05
