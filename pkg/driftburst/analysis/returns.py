#!/usr/bin/env python3
"""
イベントの事前/事後リターン

ピーク時刻 t_j の前後 horizon 秒の対数価格差
    R⁻ = X(t_j) - X(t_j - horizon),  R⁺ = X(t_j + horizon) - X(t_j)
を, 境界時刻では直前の観測値 (LOCF) で求めます。
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from config import ENDOGENOUS_T_LEVEL, EVENT_HORIZON
from driftburst.detection.detector import BurstEvent, TStatSeries
from driftburst.detection.series import TickSeries
from driftburst.errors import InputDataError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EventReturns:
    """1イベントの事前/事後リターン"""
    peak_time: float
    peak_t: float
    sign: int
    R_minus: float
    R_plus: float
    start_time: float
    end_time: float
    V_minus: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def level_at(times: np.ndarray, levels: np.ndarray, t: float) -> float:
    """時刻 t 時点で最後に観測された水準 (観測前なら NaN)"""
    idx = int(np.searchsorted(times, t, side="right")) - 1
    return float(levels[idx]) if idx >= 0 else float("nan")


def _endogenous_start(ts: TStatSeries, peak_time: float) -> Optional[float]:
    """ピーク前で |t| < 1 となる最後のグリッド時刻"""
    before = (ts.grid_times < peak_time) & np.isfinite(ts.t_values) & (np.abs(ts.t_values) < ENDOGENOUS_T_LEVEL)
    idx = np.flatnonzero(before)
    return float(ts.grid_times[idx[-1]]) if idx.size else None


def event_returns(series: TickSeries, events: Sequence[BurstEvent],
                  horizon: float = EVENT_HORIZON, endogenous: bool = False,
                  ts: Optional[TStatSeries] = None) -> List[EventReturns]:
    """
    イベントごとの事前/事後リターン

    Args:
        series: 対数価格系列
        events: 検出イベント
        horizon: 固定窓の長さ (秒)
        endogenous: True なら事前窓の開始をピーク前で |t| < 1 となる最後の時刻とし,
            事後窓を同じ長さにする (ts が必要)
        ts: t 統計量系列

    Returns:
        EventReturns のリスト (期間が系列に収まらないイベントは警告して除外)
    """
    if endogenous and ts is None:
        raise InputDataError("endogenous=True には ts が必要です")

    times, levels = series.times, series.levels
    out = []
    for event in events:
        peak = event.peak_time
        length = horizon
        if endogenous:
            start = _endogenous_start(ts, peak)
            if start is None:
                logger.warning("⚠️ t=%.0f: |t| < 1 となる開始点がないため除外します", peak)
                continue
            length = peak - start

        start, end = peak - length, peak + length
        if start < times[0] or end > times[-1]:
            logger.warning("⚠️ t=%.0f: リターン窓 [%.0f, %.0f] が系列の範囲外のため除外します",
                           peak, start, end)
            continue

        at_peak = level_at(times, levels, peak)
        out.append(EventReturns(
            peak_time=peak,
            peak_t=event.peak_t,
            sign=event.sign,
            R_minus=at_peak - level_at(times, levels, start),
            R_plus=level_at(times, levels, end) - at_peak,
            start_time=start,
            end_time=end,
        ))
    return out


def classify_event(returns: EventReturns) -> str:
    """事後リターンが反対符号なら 'flash_crash', それ以外 (同符号・ゼロ) は 'gradual_jump'"""
    return "flash_crash" if returns.R_minus * returns.R_plus < 0 else "gradual_jump"


def monthly_event_counts(events: Sequence[BurstEvent]) -> Dict[str, int]:
    """月ごと (UTC, 'YYYY-MM') のイベント数"""
    if not events:
        return {}
    months = pd.to_datetime([e.peak_time for e in events], unit="s", utc=True).strftime("%Y-%m")
    counts = pd.Series(1, index=months).groupby(level=0).sum()
    return {str(k): int(v) for k, v in counts.items()}


def returns_to_frame(samples: Sequence[EventReturns]) -> pd.DataFrame:
    columns = ["peak_time", "peak_t", "sign", "R_minus", "R_plus", "start_time", "end_time", "V_minus"]
    frame = pd.DataFrame([s.to_dict() for s in samples], columns=columns)
    if len(frame):
        frame["type"] = [classify_event(s) for s in samples]
    else:
        frame["type"] = pd.Series(dtype=str)
    return frame


def returns_from_frame(frame: pd.DataFrame) -> List[EventReturns]:
    """CSV から読み込んだ表を EventReturns のリストに戻す"""
    samples = []
    for row in frame.itertuples(index=False):
        v_minus = getattr(row, "V_minus", None)
        samples.append(EventReturns(
            peak_time=float(row.peak_time),
            peak_t=float(getattr(row, "peak_t", np.nan)),
            sign=int(row.sign),
            R_minus=float(row.R_minus),
            R_plus=float(row.R_plus),
            start_time=float(getattr(row, "start_time", np.nan)),
            end_time=float(getattr(row, "end_time", np.nan)),
            V_minus=None if v_minus is None or pd.isna(v_minus) else float(v_minus),
        ))
    return samples
