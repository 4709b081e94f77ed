import pytest

from config import RUN_CONFIG_DIR
from driftburst.detection.detector import DetectorConfig
from driftburst.errors import ConfigError
from driftburst.pipeline.run_config import RunConfig, load_run_config


def test_defaults():
    config = load_run_config()
    assert config == RunConfig()
    assert config.threshold == 4.5
    assert config.level is None
    assert config.dedup == "window"


def test_bundled_chicago_config():
    config = load_run_config(RUN_CONFIG_DIR / "chicago_session.yaml")
    assert (config.session_start, config.session_end) == ("01:00", "15:15")
    assert config.timezone == "America/Chicago"
    assert config.detector.preavg.k_n == 3
    assert config.detector.drift_bandwidth == 300.0


def test_yaml_with_overrides(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("threshold: 5.0\nlevel: 0.95\ndetector:\n  drift_bandwidth: 60\n", encoding="utf-8")
    config = load_run_config(path, {"threshold": 6.0, "level": None, "seed": 9})
    assert config.threshold == 6.0
    assert config.level == 0.95
    assert config.seed == 9
    assert config.detector.variance_bandwidth == 300.0


def test_unknown_keys():
    with pytest.raises(ConfigError) as excinfo:
        RunConfig.from_dict({"treshold": 4.0})
    assert excinfo.value.key == "treshold"
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"detector": {"bandwidth": 300}})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"detector": 5})


@pytest.mark.parametrize("values", [
    {"threshold": 0.0},
    {"level": 1.5},
    {"dedup": "hourly"},
    {"n_jobs": 0},
    {"horizon": -1.0},
])
def test_validation(values):
    with pytest.raises(ConfigError):
        RunConfig(**values)


def test_detector_overrides_recompute_derived_values():
    config = RunConfig().with_overrides({"detector.drift_bandwidth": 120.0, "detector.grid_spacing": 10.0})
    assert config.detector.variance_bandwidth == 600.0
    assert config.detector.burn_in == 600.0
    assert config.detector.revision_lookback == 10.0


def test_explicit_detector_values_survive_overrides():
    base = RunConfig(detector=DetectorConfig(drift_bandwidth=300.0, variance_bandwidth=900.0))
    config = base.with_overrides({"detector.grid_spacing": 30.0})
    assert config.detector.variance_bandwidth == 900.0
    assert config.detector.burn_in == 900.0
    assert config.detector.grid_spacing == 30.0


def test_overrides_keep_runtime_fields():
    base = RunConfig(output_dir="/tmp/out", n_jobs=3, table_path="t.json")
    config = base.with_overrides({"threshold": 5.5})
    assert (config.output_dir, config.n_jobs, config.table_path) == ("/tmp/out", 3, "t.json")
    assert base.with_overrides({"threshold": None}) is base


def test_snapshot_excludes_runtime_fields():
    snapshot = RunConfig(output_dir="/tmp/out").to_dict()
    assert "output_dir" not in snapshot
    assert "n_jobs" not in snapshot
    assert "table_path" not in snapshot
    assert RunConfig.from_dict(snapshot) == RunConfig(output_dir=RunConfig().output_dir)
