#!/usr/bin/env python3
"""
検出パイプライン

読み込み → 仲値 → 事前平均化 → グリッド t 統計量 → 閾値 (固定 / ρ̂ に基づく
シミュレーション臨界値) → イベント抽出 → レポート出力を日ごとに実行します。

同じ設定・データ・シードからは同じバイト列のレポートが得られます。
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import stats

from config import (
    AR1_RHO_CLAMP,
    CSV_FLOAT_FORMAT,
    EVENTS_FILE_NAME,
    FIT_SAMPLING_SECONDS,
    FIT_WINDOW_SECONDS,
    MIN_CGW_OBS,
    MIN_DOUBLE_SORT_OBS,
    MIN_PROFILE_DAYS,
    MIN_REVERSION_OBS,
    REPORT_FILE_NAME,
    TSTAT_FILE_NAME,
)
from driftburst.analysis.regression import RegressionResult, cgw_regression, reversion_regression
from driftburst.analysis.returns import EventReturns, event_returns, monthly_event_counts, returns_to_frame
from driftburst.analysis.sorting import double_sort
from driftburst.analysis.volume import normalized_volume, trades_from_frame
from driftburst.detection.critval import (
    CriticalValueTable,
    critical_value,
    fit_ar1,
    load_table,
    simulate_max_quantiles,
)
from driftburst.detection.detector import (
    BurstEvent,
    TStatSeries,
    events_to_frame,
    extract_events,
    max_stat,
    tstat_grid,
)
from driftburst.detection.series import TickSeries
from driftburst.errors import DriftBurstError, InputDataError
from driftburst.parametric.mle import ParamFit, fit_mle
from driftburst.pipeline.ingest import build_midquote, load_ticks, sample_on_grid, split_sessions
from driftburst.pipeline.run_config import RunConfig
from driftburst.utils.data_loader import save_data_file

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DayReport:
    """1日分の検出結果"""
    label: str
    series: TickSeries
    tstats: TStatSeries
    events: List[BurstEvent]
    summary: Dict[str, Any]


@dataclass(frozen=True)
class RunReport:
    """検出パイプライン全体の結果"""
    config: RunConfig
    days: List[DayReport] = field(default_factory=list)

    @property
    def events(self) -> List[BurstEvent]:
        return [e for day in self.days for e in day.events]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "days": [day.summary for day in self.days],
            "events": [{"day": day.label, **e.to_dict()} for day in self.days for e in day.events],
            "monthly_counts": monthly_event_counts(self.events),
        }


def resolve_threshold(ts: TStatSeries, config: RunConfig,
                      table: Optional[CriticalValueTable] = None) -> Tuple[float, float]:
    """
    閾値と ρ̂ を決める

    level を指定しない場合は固定閾値。指定した場合は t 統計量列に当てはめた
    AR(1) の ρ̂ (0 未満は 0 に丸める) と有効点数 m で臨界値を求めます。
    テーブルがあれば補間, なければその場でシミュレーションします。

    Returns:
        (threshold, rho_hat)
    """
    rho_hat = float("nan")
    try:
        rho_hat = fit_ar1(ts).rho_hat
    except InputDataError as e:
        logger.warning("⚠️ ρ̂ を推定できません: %s", e)

    if config.level is None:
        return float(config.threshold), rho_hat
    if not math.isfinite(rho_hat):
        raise InputDataError("ρ̂ を推定できないため臨界値を決められません")

    m = int(ts.present.sum())
    rho = min(max(rho_hat, 0.0), AR1_RHO_CLAMP)
    if table is not None:
        return critical_value(table, m, rho, config.level), rho_hat

    row = simulate_max_quantiles(m, rho, [config.level], n_sims=config.critval_sims,
                                 seed=config.seed, n_jobs=config.n_jobs)
    return float(row.raw[0]), rho_hat


def summarize_day(label: str, ts: TStatSeries, events: Sequence[BurstEvent],
                  threshold: float, rho_hat: float) -> Dict[str, Any]:
    """日次サマリー (m, T*, a_m, b_m, 正規化値, p 値, ρ̂, 閾値, 標準偏差, 超過尖度)"""
    values = ts.t_values[ts.present]
    summary: Dict[str, Any] = {
        "day": label,
        "m": int(values.size),
        "T_star": float("nan"),
        "a_m": float("nan"),
        "b_m": float("nan"),
        "normalized": float("nan"),
        "p_value": float("nan"),
        "peak_time": float("nan"),
        "rho_hat": float(rho_hat),
        "threshold": float(threshold),
        "std": float(np.std(values, ddof=1)) if values.size > 1 else float("nan"),
        "excess_kurtosis": float(stats.kurtosis(values, fisher=True)) if values.size > 3 else float("nan"),
        "n_events": len(events),
    }
    if values.size >= 2:
        summary.update(max_stat(ts).to_dict())
    return summary


def detect_series(series: TickSeries, config: RunConfig,
                  table: Optional[CriticalValueTable] = None,
                  n_jobs: Optional[int] = None) -> DayReport:
    """
    1つの系列 (1日分) に検出器を適用する

    Args:
        series: 対数仲値の系列
        config: 実行設定
        table: 臨界値テーブル (level 指定時のみ使用)
        n_jobs: グリッド評価のスレッド数 (既定 config.n_jobs)

    Returns:
        DayReport
    """
    label = series.label
    ts = tstat_grid(series, config.detector, n_jobs=n_jobs or config.n_jobs)
    if int(ts.present.sum()) < 2:
        logger.warning("⚠️ %s: 有効な t 統計量が2点未満のためイベント抽出を省略します", label)
        return DayReport(label, series, ts, [],
                         summarize_day(label, ts, [], config.threshold, float("nan")))

    threshold, rho_hat = resolve_threshold(ts, config, table)
    events = extract_events(ts, threshold, config.min_separation, config.dedup)
    logger.info("%s: イベント %d 件 (閾値 %.3f)", label, len(events), threshold)
    return DayReport(label, series, ts, events, summarize_day(label, ts, events, threshold, rho_hat))


def detect_frame(frame: pd.DataFrame, config: RunConfig,
                 table: Optional[CriticalValueTable] = None) -> RunReport:
    """
    ティック表をセッション日ごとに分けて検出する

    n_jobs > 1 で複数日ある場合は日単位で並列化し, 結果は日付順に並べます。
    """
    sessions = split_sessions(frame, config.session_start, config.session_end, config.timezone)
    if not sessions:
        logger.warning("⚠️ セッション内のティックがありません")
        return RunReport(config, [])

    parallel_days = config.n_jobs > 1 and len(sessions) > 1
    inner_jobs = 1 if parallel_days else config.n_jobs

    def run(item):
        label, day = item
        try:
            return detect_series(build_midquote(day, label=label), config, table, n_jobs=inner_jobs)
        except DriftBurstError as e:
            logger.error("✗ %s の処理に失敗しました: %s", label, e)
            raise

    if parallel_days:
        with ThreadPoolExecutor(max_workers=config.n_jobs) as pool:
            days = list(pool.map(run, sessions))
    else:
        days = [run(item) for item in sessions]
    return RunReport(config, days)


def load_threshold_table(config: RunConfig) -> Optional[CriticalValueTable]:
    """level 指定時に使う臨界値テーブル (パスがなければ None)"""
    if config.level is None or not config.table_path:
        return None
    path = Path(config.table_path)
    if not path.exists():
        logger.warning("⚠️ 臨界値テーブルが見つかりません。その場でシミュレーションします: %s", path)
        return None
    return load_table(path)


def run_detect(config: RunConfig, data_path: Path) -> RunReport:
    """
    ティックCSVに対して検出パイプライン全体を実行する

    Args:
        config: 実行設定
        data_path: ティックCSVのパス

    Returns:
        RunReport
    """
    data_path = Path(data_path)
    frame = load_ticks(data_path)
    try:
        return detect_frame(frame, config, load_threshold_table(config))
    except DriftBurstError:
        logger.error("✗ 検出に失敗しました: %s", data_path)
        raise


def tstats_frame(report: RunReport) -> pd.DataFrame:
    frames = []
    for day in report.days:
        frame = day.tstats.to_frame()
        frame.insert(0, "day", day.label)
        frames.append(frame)
    if not frames:
        return pd.DataFrame(columns=["day", "time", "t", "mu_hat", "lrv_hat"])
    return pd.concat(frames, ignore_index=True)


def events_frame(report: RunReport) -> pd.DataFrame:
    frames = []
    for day in report.days:
        frame = events_to_frame(day.events)
        frame.insert(0, "day", day.label)
        frames.append(frame)
    if not frames:
        frame = events_to_frame([])
        frame.insert(0, "day", pd.Series(dtype=str))
        return frame
    return pd.concat(frames, ignore_index=True)


def write_report(report: RunReport, output_dir: Optional[Path] = None) -> Dict[str, Path]:
    """
    report.json, tstats.csv, events.csv を書き出す

    Returns:
        {'report': パス, 'tstats': パス, 'events': パス}
    """
    output_dir = Path(output_dir or report.config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "report": save_data_file(report.to_dict(), output_dir / REPORT_FILE_NAME),
        "tstats": output_dir / TSTAT_FILE_NAME,
        "events": output_dir / EVENTS_FILE_NAME,
    }
    tstats_frame(report).to_csv(paths["tstats"], index=False, float_format=CSV_FLOAT_FORMAT)
    events_frame(report).to_csv(paths["events"], index=False, float_format=CSV_FLOAT_FORMAT)
    logger.info("レポートを書き出しました: %s", output_dir)
    return paths


@dataclass(frozen=True)
class EventAnalysis:
    """イベント分析の結果"""
    samples: List[EventReturns]
    reversion: Optional[RegressionResult]
    cgw: Optional[RegressionResult]
    double_sort: Optional[Dict[str, pd.DataFrame]]
    monthly_counts: Dict[str, int]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_events": len(self.samples),
            "reversion": self.reversion.to_dict() if self.reversion else None,
            "cgw": self.cgw.to_dict() if self.cgw else None,
            "double_sort": ({sign: table.to_dict() for sign, table in self.double_sort.items()}
                            if self.double_sort else None),
            "monthly_counts": self.monthly_counts,
        }


def analyze_events(report: RunReport, frame: Optional[pd.DataFrame] = None,
                   endogenous: bool = False,
                   min_profile_days: int = MIN_PROFILE_DAYS) -> EventAnalysis:
    """
    検出イベントの事前/事後リターン, 反転回帰, 出来高相互作用回帰, 二重ソート

    約定を含むティック表を渡すと V⁻ を計算します。サンプルが足りない分析は
    警告して None にします。
    """
    samples: List[EventReturns] = []
    for day in report.days:
        samples.extend(event_returns(day.series, day.events, report.config.horizon,
                                     endogenous=endogenous, ts=day.tstats))
    samples.sort(key=lambda s: s.peak_time)

    if frame is not None and samples:
        trade_times, notional = trades_from_frame(frame)
        try:
            volumes = normalized_volume(trade_times, notional,
                                        [(s.start_time, s.peak_time) for s in samples],
                                        min_days=min_profile_days)
            samples = [replace(s, V_minus=v) for s, v in zip(samples, volumes)]
        except InputDataError as e:
            logger.warning("⚠️ V⁻ を計算できません: %s", e)

    reversion = cgw = sorted_tables = None
    if len(samples) >= MIN_REVERSION_OBS:
        reversion = reversion_regression(samples)
    else:
        logger.warning("⚠️ 反転回帰にはイベントが %d 件以上必要です (%d 件)", MIN_REVERSION_OBS, len(samples))
    has_volume = bool(samples) and all(s.V_minus is not None for s in samples)
    if has_volume and len(samples) >= MIN_CGW_OBS:
        cgw = cgw_regression(samples)
    if has_volume and len(samples) >= MIN_DOUBLE_SORT_OBS:
        sorted_tables = double_sort(samples)

    return EventAnalysis(samples, reversion, cgw, sorted_tables, monthly_event_counts(report.events))


def fit_event_window(series: TickSeries, peak_time: float,
                     window: float = FIT_WINDOW_SECONDS,
                     sampling: float = FIT_SAMPLING_SECONDS) -> ParamFit:
    """
    イベント直前の窓で局所パラメトリックモデルを推定する

    [peak - window, peak - sampling] を sampling 秒刻みで直前観測値サンプリングし,
    爆発時刻 T = peak_time として最尤推定と尤度比検定を行います。

    Raises:
        InputDataError: 窓の開始より前に観測がない場合
        FitError: 最尤推定が収束しない場合
    """
    grid = sample_on_grid(series, sampling, peak_time - window, peak_time - sampling)
    return fit_mle(grid.times, grid.increments, T=peak_time)
