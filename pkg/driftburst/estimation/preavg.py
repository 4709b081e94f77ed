#!/usr/bin/env python3
"""
事前平均化 (pre-averaging)

ノイズを含む増分を k_n 個ずつ重み g(j/k_n) で局所平均し,
マイクロストラクチャーノイズを約 sqrt(k_n) 分の1に減衰させます。

添字の規約 (0 始まり):
    inc[m] = level[m+1] - level[m]
    out[i] = Σ_{j=1}^{k_n-1} g(j/k_n) · inc[i+j],  i = 0, ..., n-k_n
出力長は n - k_n + 1 で, out[i] の最初の寄与は inc[i+1] (開始時刻 times[i+1])。
"""

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from config import PREAVG_WINDOW
from driftburst.errors import ConfigError, DomainError, InputDataError


class WeightFunction(str, Enum):
    MIN_TRIANGLE = "min_triangle"


@dataclass(frozen=True)
class PreAvgConfig:
    """事前平均化の窓幅 k_n と重み関数"""
    k_n: int = PREAVG_WINDOW
    weight: WeightFunction = WeightFunction.MIN_TRIANGLE

    def __post_init__(self):
        object.__setattr__(self, "weight", WeightFunction(self.weight))
        if int(self.k_n) != self.k_n or self.k_n < 1:
            raise ConfigError(f"k_n は1以上の整数である必要があります: {self.k_n}", key="k_n")
        object.__setattr__(self, "k_n", int(self.k_n))


def weight_g(x: float) -> float:
    """
    重み関数 g(x) = min(x, 1-x)

    Raises:
        DomainError: x が [0, 1] の外にある場合
    """
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"重み関数の引数は [0, 1] の範囲である必要があります: {x}")
    return min(x, 1.0 - x)


def preaverage_weights(k_n: int) -> np.ndarray:
    """g(j/k_n), j = 0, ..., k_n-1 (先頭は常に 0)"""
    j = np.arange(k_n, dtype=float) / k_n
    return np.minimum(j, 1.0 - j)


def level_weights(k_n: int) -> np.ndarray:
    """H_j = g((j+1)/k_n) - g(j/k_n), j = 0, ..., k_n-1"""
    g = np.append(preaverage_weights(k_n), 0.0)
    return np.diff(g)


def preaverage(increments: np.ndarray, cfg: PreAvgConfig) -> np.ndarray:
    """
    増分形式の事前平均化

    Args:
        increments: 対数価格の増分 (長さ n)
        cfg: 事前平均化設定

    Returns:
        事前平均化された増分 (長さ n - k_n + 1)。k_n = 1 なら入力のコピー

    Raises:
        InputDataError: 入力長が k_n 未満の場合
    """
    increments = np.asarray(increments, dtype=float)
    if cfg.k_n == 1:
        return increments.copy()
    if increments.size < cfg.k_n:
        raise InputDataError(
            f"事前平均化には少なくとも k_n={cfg.k_n} 個の増分が必要です (入力: {increments.size})"
        )
    return np.correlate(increments, preaverage_weights(cfg.k_n), mode="valid")


def preaverage_levels(levels: np.ndarray, cfg: PreAvgConfig) -> np.ndarray:
    """
    水準形式の事前平均化 out[i] = -Σ_{j=0}^{k_n-1} H_j · level[i+1+j]

    増分形式と機械精度で一致します。

    Args:
        levels: 対数価格の水準 (長さ n + 1)
        cfg: 事前平均化設定
    """
    levels = np.asarray(levels, dtype=float)
    if cfg.k_n == 1:
        return np.diff(levels)
    if levels.size - 1 < cfg.k_n:
        raise InputDataError(
            f"事前平均化には少なくとも k_n={cfg.k_n} 個の増分が必要です (入力: {levels.size - 1})"
        )
    return -np.correlate(levels[1:], level_weights(cfg.k_n), mode="valid")


def preaverage_series(times: np.ndarray, levels: np.ndarray,
                      cfg: PreAvgConfig) -> Tuple[np.ndarray, np.ndarray]:
    """
    観測時刻と水準から (アンカー時刻, 事前平均化増分) を作る

    アンカー時刻は各事前平均化増分に寄与する最初の増分の開始時刻で,
    左側カーネルの重み K((t_{i-1} - t)/h) の t_{i-1} に対応します。

    Args:
        times: 観測時刻 (秒, 長さ n + 1)
        levels: 対数価格 (長さ n + 1)
        cfg: 事前平均化設定

    Returns:
        (anchor_times, pa_increments)
    """
    times = np.asarray(times, dtype=float)
    pa = preaverage(np.diff(levels), cfg)
    if cfg.k_n == 1:
        return times[:-1], pa
    return times[1:1 + pa.size], pa
