#!/usr/bin/env python3
"""
ドリフトバースト検出器

規則的なグリッド上で t 統計量を計算し, 最大統計量 (Gumbel 正規化) と
バーストイベント (閾値を超える |t| の局所極値) を求めます。

ノイズ頑健版 (既定):  T = sqrt(h) · μ̄ / sqrt(lrv)   (事前平均化増分 + HAC)
ノイズなし版:         T = sqrt(h/K_2) · μ̂ / σ̂        (生の増分)
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config import (
    CSV_FLOAT_FORMAT,
    DEFAULT_DEDUP,
    DRIFT_BANDWIDTH,
    GRID_SPACING,
    LRV_FLOOR,
    MIN_EVENT_SEPARATION,
    SECONDS_PER_DAY,
    STATISTIC_MODE,
    VARIANCE_BANDWIDTH_RATIO,
)
from driftburst.detection.series import TickSeries
from driftburst.errors import ConfigError, EmptyWindowError, InputDataError
from driftburst.estimation.estimator import (
    LagMode,
    LagPolicy,
    auto_lag,
    resolve_lags,
    spot_drift,
    spot_lrv_estimates,
    spot_variance_raw,
    window_slice,
)
from driftburst.estimation.kernel import KernelFamily, KernelSpec, kernel_K2
from driftburst.estimation.preavg import PreAvgConfig, preaverage_series
from driftburst.utils.data_loader import load_data_file, save_data_file

logger = logging.getLogger(__name__)


class StatisticMode(str, Enum):
    NOISE_ROBUST = "noise_robust"
    NOISE_FREE = "noise_free"


@dataclass(frozen=True)
class DetectorConfig:
    """
    検出器の設定

    Attributes:
        kernel: カーネル設定
        drift_bandwidth: ドリフトのバンド幅 h (秒)
        variance_bandwidth: 分散のバンド幅 h' (秒, 既定 5h)
        preavg: 事前平均化設定
        lag_policy: HAC ラグ方針
        mode: ノイズ頑健版 / ノイズなし版
        grid_spacing: 評価グリッド間隔 (秒)
        burn_in: 系列開始からの除外期間 (秒, 既定 h')
        revision_lookback: 評価点の直前にこの秒数以内の価格更新がなければ欠損 (既定 grid_spacing)
        lrv_floor: これ未満の長期分散では t 統計量を欠損とする
    """
    kernel: KernelSpec = field(default_factory=KernelSpec)
    drift_bandwidth: float = DRIFT_BANDWIDTH
    variance_bandwidth: Optional[float] = None
    preavg: PreAvgConfig = field(default_factory=PreAvgConfig)
    lag_policy: LagPolicy = field(default_factory=LagPolicy)
    mode: StatisticMode = StatisticMode(STATISTIC_MODE)
    grid_spacing: float = GRID_SPACING
    burn_in: Optional[float] = None
    revision_lookback: Optional[float] = None
    lrv_floor: float = LRV_FLOOR

    def __post_init__(self):
        try:
            object.__setattr__(self, "mode", StatisticMode(self.mode))
        except ValueError as e:
            raise ConfigError(f"Unknown statistic mode: {self.mode}", key="mode") from e
        if self.variance_bandwidth is None:
            object.__setattr__(self, "variance_bandwidth",
                               VARIANCE_BANDWIDTH_RATIO * self.drift_bandwidth)
        if self.burn_in is None:
            object.__setattr__(self, "burn_in", self.variance_bandwidth)
        if self.revision_lookback is None:
            object.__setattr__(self, "revision_lookback", self.grid_spacing)

        for name in ("drift_bandwidth", "variance_bandwidth", "grid_spacing", "revision_lookback"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ConfigError(f"{name} は正の有限値である必要があります: {value}", key=name)
        if self.burn_in < 0:
            raise ConfigError(f"burn_in は非負である必要があります: {self.burn_in}", key="burn_in")

    def to_dict(self) -> Dict[str, Any]:
        """フラットな辞書表現 (レポートの設定スナップショット)"""
        return {
            "kernel_family": self.kernel.family.value,
            "truncation_radius": self.kernel.truncation_radius,
            "drift_bandwidth": self.drift_bandwidth,
            "variance_bandwidth": self.variance_bandwidth,
            "preavg_window": self.preavg.k_n,
            "lag_mode": self.lag_policy.mode.value,
            "fixed_lag": self.lag_policy.fixed_lag,
            "lag_base_add": self.lag_policy.base_add,
            "per_point_lags": self.lag_policy.per_point,
            "mode": self.mode.value,
            "grid_spacing": self.grid_spacing,
            "burn_in": self.burn_in,
            "revision_lookback": self.revision_lookback,
            "lrv_floor": self.lrv_floor,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DetectorConfig":
        """
        フラットな辞書から設定を作る

        Raises:
            ConfigError: 未知のキーがある場合
        """
        known = set(cls().to_dict())
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"Unknown detector key: {unknown[0]}", key=unknown[0])

        kernel = KernelSpec(
            family=KernelFamily(data.get("kernel_family", KernelFamily.LEFT_EXPONENTIAL)),
            **({"truncation_radius": float(data["truncation_radius"])}
               if "truncation_radius" in data else {}),
        )
        lag_defaults = LagPolicy()
        lag_policy = LagPolicy(
            mode=LagMode(data.get("lag_mode", lag_defaults.mode)),
            fixed_lag=int(data.get("fixed_lag", lag_defaults.fixed_lag)),
            base_add=int(data.get("lag_base_add", lag_defaults.base_add)),
            per_point=bool(data.get("per_point_lags", lag_defaults.per_point)),
        )
        kwargs = {
            name: data[name]
            for name in ("drift_bandwidth", "variance_bandwidth", "mode", "grid_spacing",
                         "burn_in", "revision_lookback", "lrv_floor")
            if name in data
        }
        for name in list(kwargs):
            if name != "mode" and kwargs[name] is not None:
                kwargs[name] = float(kwargs[name])
        preavg = PreAvgConfig(k_n=int(data.get("preavg_window", PreAvgConfig().k_n)))
        return cls(kernel=kernel, preavg=preavg, lag_policy=lag_policy, **kwargs)


@dataclass(frozen=True)
class PreparedSeries:
    """評価点に依存しない前処理結果 (読み取り専用で並列評価に共有)"""
    raw_times: np.ndarray
    raw_increments: np.ndarray
    anchor_times: np.ndarray
    pa_increments: np.ndarray
    lags: int


def prepare_series(series: TickSeries, cfg: DetectorConfig) -> PreparedSeries:
    """増分, 事前平均化増分, L_n を1度だけ計算する"""
    raw_times = series.times[:-1]
    raw_increments = series.increments

    anchor_times = np.empty(0)
    pa_increments = np.empty(0)
    lags = 0
    if cfg.mode is StatisticMode.NOISE_ROBUST:
        try:
            anchor_times, pa_increments = preaverage_series(series.times, series.levels, cfg.preavg)
        except InputDataError as e:
            logger.warning("⚠️ 事前平均化できません (全評価点が欠損になります): %s", e)
        lags = resolve_lags(cfg.lag_policy, cfg.preavg.k_n, raw_increments)
        logger.debug("L_n = %d (k_n=%d, mode=%s)", lags, cfg.preavg.k_n, cfg.lag_policy.mode.value)

    return PreparedSeries(raw_times, raw_increments, anchor_times, pa_increments, lags)


def _point_lags(prepared: PreparedSeries, t: float, cfg: DetectorConfig) -> int:
    if not (cfg.lag_policy.per_point and cfg.lag_policy.mode is LagMode.AUTO):
        return prepared.lags
    lo, hi = window_slice(prepared.raw_times, t, cfg.variance_bandwidth, cfg.kernel)
    try:
        q_star = auto_lag(prepared.raw_increments[lo:hi])
    except InputDataError:
        return prepared.lags
    return cfg.lag_policy.resolve(cfg.preavg.k_n, q_star)


def evaluate_point(prepared: PreparedSeries, t: float,
                   cfg: DetectorConfig) -> Tuple[float, float, float, int]:
    """
    1時点の (t 値, ドリフト推定, 長期分散推定, 有効観測数)

    窓が空の場合と長期分散が下限未満の場合は t 値を NaN で返します。
    """
    h, h_prime = cfg.drift_bandwidth, cfg.variance_bandwidth
    try:
        if cfg.mode is StatisticMode.NOISE_ROBUST:
            mu = spot_drift(prepared.anchor_times, prepared.pa_increments, t, h, cfg.kernel)
            lrv, n_eff = spot_lrv_estimates(prepared.anchor_times, prepared.pa_increments, t,
                                            h_prime, cfg.kernel, _point_lags(prepared, t, cfg))
            if lrv < cfg.lrv_floor:
                return math.nan, mu, lrv, n_eff
            return math.sqrt(h) * mu / math.sqrt(lrv), mu, lrv, n_eff

        mu = spot_drift(prepared.raw_times, prepared.raw_increments, t, h, cfg.kernel)
        sigma = spot_variance_raw(prepared.raw_times, prepared.raw_increments, t, h_prime, cfg.kernel)
        lo, hi = window_slice(prepared.raw_times, t, h_prime, cfg.kernel)
        lrv = sigma * sigma
        if lrv < cfg.lrv_floor:
            return math.nan, mu, lrv, hi - lo
        return math.sqrt(h / kernel_K2(cfg.kernel)) * mu / sigma, mu, lrv, hi - lo
    except EmptyWindowError as e:
        logger.debug("欠損: %s", e)
        return math.nan, math.nan, math.nan, 0


def tstat_at(series: TickSeries, t: float, cfg: DetectorConfig) -> float:
    """
    時刻 t のドリフトバースト t 統計量

    Args:
        series: ティック系列
        t: 評価時刻 (秒)
        cfg: 検出器設定

    Returns:
        t 値。窓が空, または長期分散が下限未満なら NaN
    """
    return evaluate_point(prepare_series(series, cfg), t, cfg)[0]


@dataclass(frozen=True)
class TStatSeries:
    """グリッド上の t 統計量 (構築後は変更不可)"""
    grid_times: np.ndarray
    t_values: np.ndarray
    mu_hats: np.ndarray
    lrv_hats: np.ndarray
    n_effective: Optional[np.ndarray] = None
    config_snapshot: Optional[DetectorConfig] = None

    def __post_init__(self):
        arrays = {}
        for name in ("grid_times", "t_values", "mu_hats", "lrv_hats"):
            arrays[name] = np.array(getattr(self, name), dtype=float)
        n_eff = self.n_effective
        arrays["n_effective"] = (np.zeros(arrays["grid_times"].size, dtype=np.int64)
                                 if n_eff is None else np.array(n_eff, dtype=np.int64))

        size = arrays["grid_times"].size
        if any(a.shape != (size,) for a in arrays.values()):
            raise InputDataError("TStatSeries の配列長が一致しません")
        if size > 1 and not np.all(np.diff(arrays["grid_times"]) > 0):
            raise InputDataError("grid_times は狭義単調増加である必要があります")
        if np.any(np.isinf(arrays["t_values"])):
            raise InputDataError("t_values に無限大が含まれています")

        for name, a in arrays.items():
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    def __len__(self) -> int:
        return int(self.grid_times.size)

    @property
    def present(self) -> np.ndarray:
        return np.isfinite(self.t_values)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "time": self.grid_times,
            "t": self.t_values,
            "mu_hat": self.mu_hats,
            "lrv_hat": self.lrv_hats,
        })

    def to_csv(self, path: Path) -> Path:
        """CSV (time, t, mu_hat, lrv_hat) に17桁で書き出す。欠損は空欄"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
        return path

    @classmethod
    def from_csv(cls, path: Path) -> "TStatSeries":
        frame = pd.read_csv(path, float_precision="round_trip")
        missing = {"time", "t", "mu_hat", "lrv_hat"} - set(frame.columns)
        if missing:
            raise InputDataError(f"t 統計量CSVに列がありません: {sorted(missing)}")
        return cls(frame["time"].to_numpy(), frame["t"].to_numpy(),
                   frame["mu_hat"].to_numpy(), frame["lrv_hat"].to_numpy())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "time": self.grid_times.tolist(),
            "t": self.t_values.tolist(),
            "mu_hat": self.mu_hats.tolist(),
            "lrv_hat": self.lrv_hats.tolist(),
            "n_effective": self.n_effective.tolist(),
            "config": self.config_snapshot.to_dict() if self.config_snapshot else None,
        }

    def to_json(self, path: Path) -> Path:
        return save_data_file(self.to_dict(), path)

    @classmethod
    def from_json(cls, path: Path) -> "TStatSeries":
        data = load_data_file(Path(path))

        def column(name):
            return np.array([np.nan if v is None else v for v in data[name]], dtype=float)

        config = DetectorConfig.from_dict(data["config"]) if data.get("config") else None
        return cls(column("time"), column("t"), column("mu_hat"), column("lrv_hat"),
                   np.array(data.get("n_effective") or np.zeros(len(data["time"])), dtype=np.int64),
                   config)


def evaluation_grid(series: TickSeries, spacing: float) -> np.ndarray:
    """系列開始から spacing 秒ごとの評価時刻 (開始時刻そのものは含まない)"""
    t0, t_last = float(series.times[0]), float(series.times[-1])
    count = int(math.floor((t_last - t0) / spacing + 1e-9))
    return t0 + spacing * np.arange(1, count + 1, dtype=float)


def _evaluate_chunk(prepared: PreparedSeries, times: np.ndarray, cfg: DetectorConfig) -> List[tuple]:
    return [evaluate_point(prepared, float(t), cfg) for t in times]


def tstat_grid(series: TickSeries, cfg: DetectorConfig, grid_spacing: Optional[float] = None,
               n_jobs: int = 1) -> TStatSeries:
    """
    規則グリッド上で t 統計量を計算する

    系列開始から burn_in 秒未満の点と, 直前 revision_lookback 秒以内に
    価格更新がない点は欠損 (NaN) になります。

    Args:
        series: ティック系列
        cfg: 検出器設定
        grid_spacing: グリッド間隔 (秒, 既定 cfg.grid_spacing)
        n_jobs: 評価に使うスレッド数 (結果は n_jobs に依存しない)

    Returns:
        TStatSeries
    """
    spacing = float(grid_spacing or cfg.grid_spacing)
    if not spacing > 0:
        raise ConfigError(f"grid_spacing は正である必要があります: {spacing}", key="grid_spacing")

    grid = evaluation_grid(series, spacing)
    size = grid.size
    t_values = np.full(size, np.nan)
    mu_hats = np.full(size, np.nan)
    lrv_hats = np.full(size, np.nan)
    n_effective = np.zeros(size, dtype=np.int64)

    t0 = float(series.times[0])
    after_burn_in = grid - t0 >= cfg.burn_in - 1e-9
    updates = (np.searchsorted(series.times, grid, side="right")
               - np.searchsorted(series.times, grid - cfg.revision_lookback, side="right"))
    valid = np.flatnonzero(after_burn_in & (updates > 0))

    if valid.size:
        prepared = prepare_series(series, cfg)
        chunks = [c for c in np.array_split(valid, max(1, n_jobs)) if c.size]
        if n_jobs > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=n_jobs) as pool:
                results = list(pool.map(lambda c: _evaluate_chunk(prepared, grid[c], cfg), chunks))
        else:
            results = [_evaluate_chunk(prepared, grid[c], cfg) for c in chunks]

        for chunk, values in zip(chunks, results):
            for idx, (tv, mu, lrv, n_eff) in zip(chunk, values):
                t_values[idx], mu_hats[idx], lrv_hats[idx], n_effective[idx] = tv, mu, lrv, n_eff

    logger.info("t 統計量: グリッド %d 点中 %d 点を評価 (%s)",
                size, int(np.isfinite(t_values).sum()), series.label or "series")
    return TStatSeries(grid, t_values, mu_hats, lrv_hats, n_effective, cfg)


def gumbel_constants(m: int) -> Tuple[float, float]:
    """a_m = sqrt(2 ln m), b_m = a_m - ln(π ln m) / (2 a_m)"""
    if m < 2:
        raise InputDataError(f"Gumbel 正規化には m >= 2 が必要です: {m}")
    a_m = math.sqrt(2.0 * math.log(m))
    b_m = a_m - math.log(math.pi * math.log(m)) / (2.0 * a_m)
    return a_m, b_m


def gumbel_critical_value(m: int, level: float) -> float:
    """Gumbel 近似による最大統計量の臨界値 b_m - ln(-ln level) / a_m"""
    if not 0.0 < level < 1.0:
        raise InputDataError(f"level は (0, 1) の範囲である必要があります: {level}")
    a_m, b_m = gumbel_constants(m)
    return b_m - math.log(-math.log(level)) / a_m


@dataclass(frozen=True)
class MaxStat:
    """最大統計量 T* = max |t| と Gumbel 正規化"""
    m: int
    T_star: float
    a_m: float
    b_m: float
    normalized: float
    p_value: float
    peak_time: float

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def max_stat(ts: TStatSeries) -> MaxStat:
    """
    最大統計量

    Raises:
        EmptyWindowError: 欠損でない値が1つもない場合
        InputDataError: 欠損でない値が1つしかない場合
    """
    present = np.flatnonzero(ts.present)
    if present.size == 0:
        raise EmptyWindowError("t 統計量がすべて欠損しています")
    abs_t = np.abs(ts.t_values[present])
    peak = int(np.argmax(abs_t))
    m = int(present.size)
    a_m, b_m = gumbel_constants(m)
    t_star = float(abs_t[peak])
    normalized = (t_star - b_m) * a_m
    return MaxStat(
        m=m,
        T_star=t_star,
        a_m=a_m,
        b_m=b_m,
        normalized=normalized,
        p_value=float(-np.expm1(-math.exp(-normalized))),
        peak_time=float(ts.grid_times[present[peak]]),
    )


@dataclass(frozen=True)
class BurstEvent:
    """検出されたバーストイベント"""
    peak_time: float
    peak_t: float
    sign: int
    threshold_used: float

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def local_maxima(abs_values: np.ndarray, threshold: float) -> np.ndarray:
    """
    閾値を超える |t| の局所極大の添字

    両隣が欠損でなく, 両側より真に大きい点。平坦部は最初の点を採ります。
    """
    values = np.asarray(abs_values, dtype=float)
    n = values.size
    if n < 3:
        return np.empty(0, dtype=np.int64)

    prev_ok = np.zeros(n, dtype=bool)
    prev_ok[1:] = np.isfinite(values[:-1]) & (values[:-1] < values[1:])
    candidates = np.flatnonzero(prev_ok & (values > threshold))

    peaks = []
    for i in candidates:
        j = i
        while j + 1 < n and values[j + 1] == values[i]:
            j += 1
        if j + 1 < n and np.isfinite(values[j + 1]) and values[j + 1] < values[i]:
            peaks.append(i)
    return np.array(peaks, dtype=np.int64)


def select_peaks(abs_values: np.ndarray, times: np.ndarray, threshold: float,
                 min_separation: float = MIN_EVENT_SEPARATION,
                 dedup: str = DEFAULT_DEDUP) -> List[int]:
    """
    局所極大から大きい順に貪欲に選ぶ

    dedup="window" は採用済みの点から min_separation 秒未満の点を捨て,
    dedup="daily" は1暦日 (UTC) に1点だけ残します。結果は時刻順。
    """
    if dedup not in ("window", "daily"):
        raise ConfigError(f"Unknown dedup policy: {dedup}", key="dedup")

    peaks = local_maxima(abs_values, threshold)
    order = sorted(peaks.tolist(), key=lambda i: (-abs_values[i], i))
    kept: List[int] = []
    days = set()
    for i in order:
        if dedup == "daily":
            day = math.floor(times[i] / SECONDS_PER_DAY)
            if day in days:
                continue
            days.add(day)
        elif any(abs(times[i] - times[k]) < min_separation for k in kept):
            continue
        kept.append(i)
    return sorted(kept)


def extract_events(ts: TStatSeries, threshold: float,
                   min_separation: float = MIN_EVENT_SEPARATION,
                   dedup: str = DEFAULT_DEDUP) -> List[BurstEvent]:
    """
    バーストイベントの抽出

    Args:
        ts: t 統計量系列
        threshold: 臨界値 (> 0)
        min_separation: イベント間の最小間隔 (秒)
        dedup: "window" または "daily"

    Returns:
        時刻順の BurstEvent リスト
    """
    if not threshold > 0:
        raise InputDataError(f"threshold は正である必要があります: {threshold}")
    abs_t = np.abs(ts.t_values)
    events = []
    for i in select_peaks(abs_t, ts.grid_times, threshold, min_separation, dedup):
        value = float(ts.t_values[i])
        events.append(BurstEvent(
            peak_time=float(ts.grid_times[i]),
            peak_t=value,
            sign=1 if value > 0 else -1,
            threshold_used=float(threshold),
        ))
    return events


def events_to_frame(events: Sequence[BurstEvent]) -> pd.DataFrame:
    columns = ["peak_time", "peak_t", "sign", "threshold_used"]
    return pd.DataFrame([e.to_dict() for e in events], columns=columns)
