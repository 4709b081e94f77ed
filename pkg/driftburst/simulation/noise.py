#!/usr/bin/env python3
"""
マイクロストラクチャーノイズと事前告知ジャンプ

観測価格 Y = X + ε, ε_i ~ N(0, ω_i²), ω_i = γ σ_i / sqrt(n)。
σ_i は1日単位のボラティリティ sqrt(σ²_i · day_fraction_of_year) で,
γ は1ティックの効率的リターンの標準偏差に対するノイズの比になります。
"""

import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from config import DAY_FRACTION_OF_YEAR, NOISE_GAMMA
from driftburst.errors import DomainError, InputDataError


@dataclass(frozen=True)
class NoiseParams:
    """ノイズ対ボラティリティ比 γ"""
    gamma: float = NOISE_GAMMA

    def __post_init__(self):
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise DomainError(f"gamma は非負の有限値である必要があります: {self.gamma}")


def daily_sigma(variance: np.ndarray,
                day_fraction_of_year: float = DAY_FRACTION_OF_YEAR) -> np.ndarray:
    """年率分散パスを1日単位のボラティリティに変換する"""
    return np.sqrt(np.maximum(np.asarray(variance, dtype=float), 0.0) * day_fraction_of_year)


def add_noise(levels: np.ndarray, sigma: np.ndarray, noise: NoiseParams,
              seed: Optional[Any] = None) -> np.ndarray:
    """
    対数価格にノイズを加える

    Args:
        levels: 効率的価格の対数 (長さ n + 1)
        sigma: 1日単位のボラティリティ (levels と同じ長さ)
        noise: ノイズパラメータ
        seed: 乱数シード

    Returns:
        ノイズを加えた対数価格

    Raises:
        InputDataError: levels と sigma の長さが一致しない場合
    """
    levels = np.asarray(levels, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if levels.shape != sigma.shape:
        raise InputDataError(f"levels と sigma の長さが一致しません: {levels.shape} vs {sigma.shape}")
    if noise.gamma == 0.0:
        return levels.copy()

    n = levels.size - 1
    omega = noise.gamma * sigma / math.sqrt(max(n, 1))
    return levels + omega * np.random.default_rng(seed).standard_normal(levels.size)


def inject_fixed_jump(levels: np.ndarray, times: np.ndarray, jump_size: float,
                      jump_time: float) -> np.ndarray:
    """
    時刻 jump_time 以降の全水準に jump_size を加える

    Raises:
        DomainError: jump_time が観測期間の外にある場合
    """
    levels = np.asarray(levels, dtype=float)
    times = np.asarray(times, dtype=float)
    if not times[0] < jump_time <= times[-1]:
        raise DomainError(f"jump_time={jump_time} は観測期間 ({times[0]}, {times[-1]}] の外です")
    out = levels.copy()
    out[times >= jump_time] += jump_size
    return out
