import runpy
from pathlib import Path

import orjson
import pytest


ROOT = Path(__file__).resolve().parents[2]


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for key in ("XCAL_SEED", "XCAL_DURATION_S", "XCAL_OUTPUT"):
        monkeypatch.delenv(key, raising=False)


def _load_tool():
    return runpy.run_path(str(ROOT / "tools" / "seed_acceptance.py"))


def test_report_is_the_only_thing_on_stdout(capsys, tmp_path):
    tool = _load_tool()
    out = tmp_path / "acceptance.json"
    with pytest.raises(SystemExit) as exc:
        tool["main"]([str(ROOT / "config" / "scenarios" / "cold_start.toml"), "--seeds", "2", "--log-level", "debug", "--out", str(out)])
    assert exc.value.code == 0

    captured = capsys.readouterr()
    report = orjson.loads(captured.out)
    assert report["seeds"] == 2
    assert report["passed"] is True
    assert report["pass_rate"] == {"finish_within_40ppm": 1.0, "sweep_time_le_45s": 1.0}
    # engine events went to stderr instead
    assert "sweep.finish" in captured.err
    assert orjson.loads(out.read_bytes()) == report
