#!/usr/bin/env python3
"""
出来高の正規化

イベント前の窓 (start, end] の総約定代金を, 同じ時計時刻の窓の
全営業日平均で割った V⁻ を求めます。日付は UTC の暦日です。
"""

import logging
from typing import List, Sequence, Tuple

import numpy as np
import pandas as pd

from config import MIN_PROFILE_DAYS, SECONDS_PER_DAY
from driftburst.errors import InputDataError

logger = logging.getLogger(__name__)


def trades_from_frame(frame: pd.DataFrame) -> Tuple[np.ndarray, np.ndarray]:
    """ティック表から (約定時刻 [秒], 約定代金) を取り出す"""
    trades = frame.dropna(subset=["trade_px", "trade_sz"])
    times = trades["ts_ms"].to_numpy(dtype=float) / 1000.0
    notional = trades["trade_px"].to_numpy(dtype=float) * trades["trade_sz"].to_numpy(dtype=float)
    return times, notional


class VolumeProfile:
    """約定系列と, 時計時刻の窓ごとの日次平均"""

    def __init__(self, trade_times: np.ndarray, notional: np.ndarray,
                 min_days: int = MIN_PROFILE_DAYS):
        times = np.asarray(trade_times, dtype=float)
        notional = np.asarray(notional, dtype=float)
        if times.shape != notional.shape:
            raise InputDataError("約定時刻と約定代金の長さが一致しません")
        order = np.argsort(times, kind="stable")
        self.times = times[order]
        self.cumulative = np.concatenate([[0.0], np.cumsum(notional[order])])
        self.days = np.unique(np.floor(self.times / SECONDS_PER_DAY))
        if self.days.size < min_days:
            raise InputDataError(
                f"出来高プロファイルには {min_days} 日以上の約定が必要です (入力: {self.days.size} 日)"
            )

    def window_sum(self, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
        """各窓 (start, end] の総約定代金"""
        hi = np.searchsorted(self.times, ends, side="right")
        lo = np.searchsorted(self.times, starts, side="right")
        return self.cumulative[hi] - self.cumulative[lo]

    def daily_sums(self, clock_start: float, length: float) -> np.ndarray:
        """全営業日について, 時計時刻 clock_start から length 秒の窓の総約定代金"""
        starts = self.days * SECONDS_PER_DAY + clock_start
        return self.window_sum(starts, starts + length)

    def average(self, clock_start: float, length: float) -> float:
        return float(self.daily_sums(clock_start, length).mean())


def normalized_volume(trade_times: np.ndarray, notional: np.ndarray,
                      windows: Sequence[Tuple[float, float]],
                      min_days: int = MIN_PROFILE_DAYS) -> List[float]:
    """
    イベント窓ごとの正規化出来高 V⁻

    Args:
        trade_times: 約定時刻 (エポック秒)
        notional: 約定代金 (価格 × 数量)
        windows: (start, end) のリスト (エポック秒)
        min_days: プロファイル推定に必要な最小日数

    Returns:
        V⁻ のリスト

    Raises:
        InputDataError: 日数が足りない, またはその時間帯の平均出来高が 0 の場合
    """
    profile = VolumeProfile(trade_times, notional, min_days)
    values = []
    for start, end in windows:
        clock_start = start - np.floor(start / SECONDS_PER_DAY) * SECONDS_PER_DAY
        average = profile.average(clock_start, end - start)
        if average <= 0:
            raise InputDataError(f"時間帯 {clock_start:.0f}s からの平均出来高が 0 です")
        own = float(profile.window_sum(np.array([start]), np.array([end]))[0])
        values.append(own / average)
    return values


def normalized_volume_profile(trade_times: np.ndarray, notional: np.ndarray,
                              clock_start: float, length: float,
                              min_days: int = MIN_PROFILE_DAYS) -> np.ndarray:
    """
    固定の時計時刻窓について全営業日の V⁻ (無条件サンプル, 平均は 1)
    """
    profile = VolumeProfile(trade_times, notional, min_days)
    sums = profile.daily_sums(clock_start, length)
    average = sums.mean()
    if average <= 0:
        raise InputDataError(f"時間帯 {clock_start:.0f}s からの平均出来高が 0 です")
    return sums / average
