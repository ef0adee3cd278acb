from pathlib import Path

import pytest

from xcal.config import ScenarioConfig, load_scenario
from xcal.errors import ConfigError


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for key in ("XCAL_SEED", "XCAL_DURATION_S", "XCAL_OUTPUT"):
        monkeypatch.delenv(key, raising=False)


def test_env_overrides_toml(tmp_path: Path, monkeypatch):
    toml = tmp_path / "local.toml"
    toml.write_text("""
seed = 5
duration_s = 30.0

[calibrator]
sweep_enabled = false
window_ppm = 300.0
"""
    )

    monkeypatch.setenv("XCAL_SEED", "99")
    monkeypatch.setenv("XCAL_DURATION_S", "12.5")
    monkeypatch.setenv("XCAL_OUTPUT", "runs/x/trace.csv")

    cfg = load_scenario(toml)
    assert cfg.name == "local"
    assert cfg.seed == 99
    assert abs(cfg.duration_s - 12.5) < 1e-9
    assert cfg.output == "runs/x/trace.csv"
    assert cfg.calibrator.window_ppm == 300.0
    assert cfg.calibrator.sweep_enabled is False


def test_toml_overrides_defaults(tmp_path: Path):
    toml = tmp_path / "s.toml"
    toml.write_text('name = "custom"\nseed = 5\n')
    cfg = load_scenario(toml)
    assert cfg.name == "custom"
    assert cfg.seed == 5
    assert cfg.duration_s == ScenarioConfig().duration_s


def test_bad_env_value_is_config_error(tmp_path: Path, monkeypatch):
    toml = tmp_path / "s.toml"
    toml.write_text("seed = 1\n")
    monkeypatch.setenv("XCAL_SEED", "abc")
    with pytest.raises(ConfigError):
        load_scenario(toml)


@pytest.mark.parametrize(
    "body",
    [
        "bogus = 1\n",
        "[calibrator]\nwindw_ppm = 1.0\n",
        "sub_step_s = 0.05\n",
        "duration_s = 0.0\n",
        "[calibrator]\ndeadband_hz = 90000.0\n",
        "[beacon]\ntx_ppm_error = 55.0\n",
        "seed = -1\n",
    ],
)
def test_invalid_scenarios_rejected(tmp_path: Path, body: str):
    toml = tmp_path / "bad.toml"
    toml.write_text(body)
    with pytest.raises(ConfigError):
        load_scenario(toml)


def test_missing_and_malformed_files(tmp_path: Path):
    with pytest.raises(ConfigError):
        load_scenario(tmp_path / "nope.toml")
    broken = tmp_path / "broken.toml"
    broken.write_text("seed = [\n")
    with pytest.raises(ConfigError):
        load_scenario(broken)


def test_dotted_overrides_revalidate():
    cfg = ScenarioConfig()
    assert cfg.deadband_hz == 45_000.0
    tuned = cfg.with_overrides({"calibrator.window_ppm": 200.0, "calibrator.deadband_hz": 0.0})
    assert tuned.calibrator.window_ppm == 200.0
    assert tuned.deadband_hz == 0.0
    assert cfg.calibrator.window_ppm == 400.0
    with pytest.raises(ConfigError):
        cfg.with_overrides({"calibrator.nope": 1})
    with pytest.raises(ConfigError):
        cfg.with_overrides({"calibrator.n": 0})


def test_bundled_scenarios_load():
    root = Path(__file__).resolve().parents[2] / "config"
    paths = sorted((root / "scenarios").glob("*.toml")) + [root / "example.toml"]
    assert len(paths) == 7
    for path in paths:
        cfg = load_scenario(path)
        assert cfg.duration_s > 0
