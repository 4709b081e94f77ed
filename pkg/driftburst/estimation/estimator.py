#!/usr/bin/env python3
"""
スポットドリフト・長期分散推定

不等間隔の観測時刻上で, 左側カーネルによる局所ドリフト推定量,
Parzen ラグ窓による HAC 型の長期分散推定量, ノイズなし版のスポット
ボラティリティ, および Newey-West (1994) の自動ラグ選択を提供します。

バンド幅は暦時間 (秒) です。窓は [t - R·h, t] (R = truncation_radius) で,
時刻 t_{i-1} <= t の観測だけを使います。
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from config import (
    AUTO_LAG_GAMMA_COEF,
    AUTO_LAG_MIN_OBS,
    AUTO_LAG_PILOT_COEF,
    AUTO_LAG_PILOT_EXPONENT,
    FIXED_LAG,
    LAG_MODE,
    MAX_LAG_SHARE,
)
from driftburst.errors import ConfigError, DomainError, EmptyWindowError, InputDataError
from driftburst.estimation.kernel import KernelSpec, kernel_weights, parzen_weights

logger = logging.getLogger(__name__)


class LagMode(str, Enum):
    FIXED = "fixed"
    AUTO = "auto"


@dataclass(frozen=True)
class LagPolicy:
    """
    HAC ラグ数 L_n の決め方

    Attributes:
        mode: FIXED なら fixed_lag をそのまま, AUTO なら Q* + base_add (+ 2(k_n - 1))
        fixed_lag: 固定ラグ数
        base_add: AUTO モードで Q* に加える追加ラグ (既定 0)
        per_point: AUTO モードで Q* を評価点ごとに窓内データから再計算する
    """
    mode: LagMode = LagMode(LAG_MODE)
    fixed_lag: int = FIXED_LAG
    base_add: int = 0
    per_point: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mode", LagMode(self.mode))
        if self.fixed_lag < 0 or self.base_add < 0:
            raise ConfigError("ラグ数は非負である必要があります", key="fixed_lag")

    def resolve(self, k_n: int, q_star: int = 0) -> int:
        """L_n を返す"""
        if self.mode is LagMode.FIXED:
            return int(self.fixed_lag)
        return int(q_star) + int(self.base_add) + 2 * (int(k_n) - 1)


@dataclass(frozen=True)
class SpotEstimates:
    """1時点のスポット推定値"""
    t: float
    mu_hat: float
    lrv_hat: float
    n_effective: int


def _check_bandwidth(h: float, name: str) -> None:
    if not (h > 0 and math.isfinite(h)):
        raise DomainError(f"{name} は正の有限値である必要があります: {h}")


def window_slice(times: np.ndarray, t: float, h: float, spec: KernelSpec) -> Tuple[int, int]:
    """
    時刻 t の窓 [t - R·h, t] に入る観測の添字範囲 [lo, hi)

    times は昇順であることを前提にします。
    """
    hi = int(np.searchsorted(times, t, side="right"))
    lo = int(np.searchsorted(times, t - spec.truncation_radius * h, side="left"))
    return lo, hi


def _weighted_window(times: np.ndarray, values: np.ndarray, t: float, h: float,
                     spec: KernelSpec) -> Tuple[np.ndarray, np.ndarray]:
    lo, hi = window_slice(times, t, h, spec)
    if hi <= lo:
        raise EmptyWindowError(f"t={t:.3f} の窓内に観測がありません (h={h})")
    weights = kernel_weights(spec, (times[lo:hi] - t) / h)
    if not np.any(weights > 0):
        raise EmptyWindowError(f"t={t:.3f} の窓内にカーネル重みが正の観測がありません")
    return weights, values[lo:hi]


def spot_drift(times: np.ndarray, pa_increments: np.ndarray, t: float, h: float,
               kernel: KernelSpec) -> float:
    """
    局所ドリフト推定量 (1/h) Σ K((t_{i-1} - t)/h) · ΔY_i

    ノイズなし版では生の増分, ノイズ頑健版では事前平均化増分を渡します。

    Args:
        times: 各増分のアンカー時刻 (昇順, 秒)
        pa_increments: 増分
        t: 評価時刻
        h: ドリフトのバンド幅 (秒)
        kernel: カーネル設定

    Returns:
        ドリフト推定値

    Raises:
        DomainError: h <= 0 の場合
        EmptyWindowError: 窓内に観測がない場合
    """
    _check_bandwidth(h, "h")
    weights, values = _weighted_window(times, pa_increments, t, h, kernel)
    return float(np.dot(weights, values) / h)


def hac_sum(weighted: np.ndarray, lags: int) -> float:
    """Σ y_i² + 2 Σ_{L=1}^{lags} w(L/lags) Σ_i y_i y_{i+L} (Parzen 重み)"""
    total = float(np.dot(weighted, weighted))
    if lags > 0:
        lag_weights = parzen_weights(np.arange(1, lags + 1) / lags)
        for lag, w in enumerate(lag_weights, start=1):
            if lag >= weighted.size or w == 0.0:
                break
            total += 2.0 * w * float(np.dot(weighted[:-lag], weighted[lag:]))
    return total


def spot_lrv_estimates(times: np.ndarray, pa_increments: np.ndarray, t: float, h_prime: float,
                       kernel: KernelSpec, lags: int) -> Tuple[float, int]:
    """
    HAC 型の局所長期分散と有効観測数

    Returns:
        (lrv, n_effective)。lrv は非負に丸めます
    """
    _check_bandwidth(h_prime, "h_prime")
    if lags < 0:
        raise DomainError(f"ラグ数は非負である必要があります: {lags}")
    weights, values = _weighted_window(times, pa_increments, t, h_prime, kernel)
    n_effective = int(np.count_nonzero(weights))
    lags = min(int(lags), int(n_effective * MAX_LAG_SHARE))
    lrv = hac_sum(weights * values, lags) / h_prime
    return max(lrv, 0.0), n_effective


def spot_lrv(times: np.ndarray, pa_increments: np.ndarray, t: float, h_prime: float,
             kernel: KernelSpec, lags: int) -> float:
    """
    局所長期分散推定量

    (1/h') [ Σ (K_i ΔY_i)² + 2 Σ_{L=1}^{L_n} w(L/L_n) Σ_i K_i K_{i+L} ΔY_i ΔY_{i+L} ],
    K_i = K((t_{i-1} - t)/h'), w は Parzen 窓。L_n は有効観測数の 1/4 で頭打ちにします。

    Args:
        times: 各増分のアンカー時刻 (昇順, 秒)
        pa_increments: 事前平均化増分
        t: 評価時刻
        h_prime: 分散のバンド幅 (秒)
        kernel: カーネル設定
        lags: L_n

    Returns:
        非負の長期分散推定値
    """
    return spot_lrv_estimates(times, pa_increments, t, h_prime, kernel, lags)[0]


def spot_variance_raw(times: np.ndarray, increments: np.ndarray, t: float, h_prime: float,
                      kernel: KernelSpec) -> float:
    """
    ノイズなし版のスポットボラティリティ ((1/h') Σ K((t_{i-1} - t)/h') (ΔX_i)²)^{1/2}

    spot_lrv と異なり重みは K (二乗しない) です。
    """
    _check_bandwidth(h_prime, "h_prime")
    weights, values = _weighted_window(times, increments, t, h_prime, kernel)
    return math.sqrt(float(np.dot(weights, values * values)) / h_prime)


def auto_lag(raw_increments: np.ndarray,
             pilot_coef: float = AUTO_LAG_PILOT_COEF,
             pilot_exponent: float = AUTO_LAG_PILOT_EXPONENT,
             gamma_coef: float = AUTO_LAG_GAMMA_COEF,
             min_obs: int = AUTO_LAG_MIN_OBS) -> int:
    """
    Newey-West (1994) 型の自動ラグ選択 Q*

    パイロット打ち切り ℓ = max(1, floor(pilot_coef · (n/100)^{pilot_exponent})) で
    ŝ0 = γ0 + 2 Σ_{j=1}^{ℓ} γ_j, ŝ1 = 2 Σ_{j=1}^{ℓ} j γ_j を求め,
    Q* = ceil(gamma_coef · |ŝ1/ŝ0|^{2/3} · n^{1/3}) を [0, n/4] に収めます。
    既定値は1ラグのパイロット (ノイズ由来の1次自己共分散) で,
    定数は config/settings.py で Newey-West の値 (4, 2/9, 1.1447) に戻せます。

    Args:
        raw_increments: 事前平均化前の増分
        pilot_coef, pilot_exponent, gamma_coef: プラグイン定数
        min_obs: 必要な最小観測数

    Returns:
        非負の整数 Q*

    Raises:
        InputDataError: 増分が min_obs 個未満の場合
    """
    x = np.asarray(raw_increments, dtype=float)
    n = x.size
    if n < min_obs:
        raise InputDataError(f"自動ラグ選択には少なくとも {min_obs} 個の増分が必要です (入力: {n})")

    x = x - x.mean()
    gamma0 = float(np.dot(x, x)) / n
    if gamma0 <= 0.0:
        return 0

    pilot = int(math.floor(pilot_coef * (n / 100.0) ** pilot_exponent))
    pilot = max(1, min(pilot, n - 1))
    gammas = np.array([np.dot(x[:-j], x[j:]) / n for j in range(1, pilot + 1)])
    s0 = gamma0 + 2.0 * gammas.sum()
    s1 = 2.0 * float(np.dot(np.arange(1, pilot + 1), gammas))
    if s0 <= 0.0:
        return 0

    q_star = math.ceil(gamma_coef * abs(s1 / s0) ** (2.0 / 3.0) * n ** (1.0 / 3.0))
    return int(min(max(q_star, 0), n // 4))


def resolve_lags(policy: LagPolicy, k_n: int, raw_increments: Optional[np.ndarray] = None) -> int:
    """
    ラグ方針と生の増分から L_n を決める

    AUTO モードで増分が少なすぎる場合は Q* = 0 として警告します。
    """
    if policy.mode is LagMode.FIXED:
        return policy.resolve(k_n)
    q_star = 0
    if raw_increments is not None:
        try:
            q_star = auto_lag(raw_increments)
        except InputDataError as e:
            logger.warning("⚠️ Q* を 0 とします: %s", e)
    return policy.resolve(k_n, q_star)
