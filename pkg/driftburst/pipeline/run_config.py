#!/usr/bin/env python3
"""
実行設定

YAML の例 (data/configs/chicago_session.yaml):

    detector:
      drift_bandwidth: 300
      preavg_window: 3
      grid_spacing: 5
    session_start: "01:00"
    session_end: "15:15"
    timezone: America/Chicago
    threshold: 4.5

優先順位: CLI フラグ > YAML ファイル > config/settings.py の既定値
"""

import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Optional

from config import (
    CRIT_N_SIMS,
    CRIT_SEED,
    DEDUP_POLICIES,
    DEFAULT_DEDUP,
    DEFAULT_THRESHOLD,
    DEFAULT_TIMEZONE,
    EVENT_HORIZON,
    MIN_EVENT_SEPARATION,
    N_JOBS,
    OUTPUT_DIR,
)
from driftburst.detection.detector import DetectorConfig
from driftburst.errors import ConfigError
from driftburst.utils.data_loader import load_yaml_file

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    """
    検出パイプラインの設定

    Attributes:
        detector: 検出器設定
        session_start, session_end: 取引所現地時刻のセッション窓 'HH:MM'
        timezone: IANA タイムゾーン名
        threshold: 固定閾値 (level を指定しない場合に使用)
        level: 指定するとシミュレーション臨界値 (当てはめた ρ̂) を閾値に使う
        table_path: 臨界値テーブル JSON。なければその場でシミュレーション
        critval_sims: その場でシミュレーションする場合の複製数
        seed: 乱数シード
        output_dir: 出力ディレクトリ
        dedup: イベントの重複除去方針 ("window" / "daily")
        min_separation: イベント間の最小間隔 (秒)
        horizon: イベントリターンの窓 (秒)
        n_jobs: 並列数
    """
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    session_start: Optional[str] = None
    session_end: Optional[str] = None
    timezone: str = DEFAULT_TIMEZONE
    threshold: float = DEFAULT_THRESHOLD
    level: Optional[float] = None
    table_path: Optional[str] = None
    critval_sims: int = CRIT_N_SIMS
    seed: int = CRIT_SEED
    output_dir: str = str(OUTPUT_DIR)
    dedup: str = DEFAULT_DEDUP
    min_separation: float = MIN_EVENT_SEPARATION
    horizon: float = EVENT_HORIZON
    n_jobs: int = N_JOBS

    def __post_init__(self):
        if not self.threshold > 0:
            raise ConfigError(f"threshold は正である必要があります: {self.threshold}", key="threshold")
        if self.level is not None and not 0.0 < self.level < 1.0:
            raise ConfigError(f"level は (0, 1) の範囲である必要があります: {self.level}", key="level")
        if self.dedup not in DEDUP_POLICIES:
            raise ConfigError(f"Unknown dedup policy: {self.dedup}", key="dedup")
        if self.n_jobs < 1:
            raise ConfigError(f"n_jobs は1以上である必要があります: {self.n_jobs}", key="n_jobs")
        if not self.horizon > 0:
            raise ConfigError(f"horizon は正である必要があります: {self.horizon}", key="horizon")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        """
        辞書から設定を作る

        Raises:
            ConfigError: 未知のキーがある場合
        """
        allowed = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ConfigError(f"Unknown config key: {unknown[0]}", key=unknown[0])

        values = dict(data)
        detector = values.pop("detector", None) or {}
        if not isinstance(detector, (dict, DetectorConfig)):
            raise ConfigError("detector は辞書である必要があります", key="detector")
        if isinstance(detector, dict):
            detector = DetectorConfig.from_dict(detector)
        for name in ("threshold", "min_separation", "horizon"):
            if values.get(name) is not None:
                values[name] = float(values[name])
        if values.get("level") is not None:
            values["level"] = float(values["level"])
        for name in ("critval_sims", "seed", "n_jobs"):
            if values.get(name) is not None:
                values[name] = int(values[name])
        if values.get("output_dir") is not None:
            values["output_dir"] = str(values["output_dir"])
        return cls(detector=detector, **values)

    def to_dict(self) -> Dict[str, Any]:
        """レポートに埋め込む設定スナップショット (出力先と並列数は含めない)"""
        return {
            "detector": self.detector.to_dict(),
            "session_start": self.session_start,
            "session_end": self.session_end,
            "timezone": self.timezone,
            "threshold": self.threshold,
            "level": self.level,
            "critval_sims": self.critval_sims,
            "seed": self.seed,
            "dedup": self.dedup,
            "min_separation": self.min_separation,
            "horizon": self.horizon,
        }

    def with_overrides(self, overrides: Dict[str, Any]) -> "RunConfig":
        """None でない上書き値を反映した設定 (detector.* は検出器設定へ)"""
        overrides = {k: v for k, v in overrides.items() if v is not None}
        if not overrides:
            return self
        detector_overrides = {k.split(".", 1)[1]: v for k, v in overrides.items()
                              if k.startswith("detector.")}
        top = {k: v for k, v in overrides.items() if not k.startswith("detector.")}
        data = self.to_dict()
        data["table_path"] = self.table_path
        data["output_dir"] = self.output_dir
        data["n_jobs"] = self.n_jobs
        if detector_overrides:
            data["detector"] = _merge_detector(self.detector, detector_overrides)
        data.update(top)
        return RunConfig.from_dict(data)


def _merge_detector(detector: DetectorConfig, overrides: Dict[str, Any]) -> Dict[str, Any]:
    merged = detector.to_dict()
    # 派生値は上書き後に再計算させる
    if "drift_bandwidth" in overrides and "variance_bandwidth" not in overrides:
        merged.pop("variance_bandwidth")
        if "burn_in" not in overrides:
            merged.pop("burn_in")
    if "grid_spacing" in overrides and "revision_lookback" not in overrides:
        merged.pop("revision_lookback")
    merged.update(overrides)
    return merged


def load_run_config(path: Optional[Path] = None,
                    overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    YAML ファイルと上書き値から実行設定を作る

    Args:
        path: YAML ファイル (省略時は既定値)
        overrides: CLI フラグなどの上書き値 ('detector.drift_bandwidth' 形式も可)

    Returns:
        RunConfig
    """
    config = RunConfig()
    if path is not None:
        config = RunConfig.from_dict(load_yaml_file(Path(path)))
        logger.info("実行設定を読み込みました: %s", path)
    return config.with_overrides(overrides or {})

