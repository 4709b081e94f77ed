#!/usr/bin/env python3
"""
ティック系列

検出器の共通入力である TickSeries (狭義単調増加の時刻と対数価格) を定義します。
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from driftburst.errors import InputDataError


@dataclass(frozen=True)
class TickSeries:
    """
    対数価格の観測系列

    Attributes:
        times: 観測時刻 (エポック秒, 狭義単調増加)
        levels: 対数価格
        volume: 各観測に対応する出来高 (任意)
        label: 表示用ラベル (日付など)
    """
    times: np.ndarray
    levels: np.ndarray
    volume: Optional[np.ndarray] = None
    label: str = field(default="")

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        levels = np.array(self.levels, dtype=float)
        if times.ndim != 1 or times.shape != levels.shape:
            raise InputDataError(
                f"times と levels は同じ長さの1次元配列である必要があります: {times.shape} vs {levels.shape}"
            )
        if times.size == 0:
            raise InputDataError("空の系列は扱えません")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(levels))):
            raise InputDataError("times と levels に有限でない値が含まれています")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise InputDataError("times は狭義単調増加である必要があります")

        times.setflags(write=False)
        levels.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "levels", levels)

        if self.volume is not None:
            volume = np.array(self.volume, dtype=float)
            if volume.shape != times.shape:
                raise InputDataError("volume の長さが times と一致しません")
            volume.setflags(write=False)
            object.__setattr__(self, "volume", volume)

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.levels)

    def shifted(self, offset: float) -> "TickSeries":
        """対数価格に定数を加えた系列"""
        return TickSeries(self.times, self.levels + offset, self.volume, self.label)
