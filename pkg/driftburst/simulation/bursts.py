#!/usr/bin/env python3
"""
ドリフトバースト・ボラティリティバーストの注入

窓 [lo, hi] (1日に占める割合) の中で
    μ_t  = a · sign(t - τ) / |τ - t|^α
    σ_t  = b · sqrt(θ) / |τ - t|^β
を加えます。係数は年率で, 日内時刻 u ∈ [0, 1] は u · day_fraction_of_year 年に対応します。
ドリフトは各区間で原始関数による厳密積分,
ボラティリティバーストは区間分散 ∫σ_t² dt を持つ正規ショックです。
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from config import BURST_TAU, BURST_WINDOW, DAY_FRACTION_OF_YEAR, HESTON_THETA
from driftburst.errors import DomainError

logger = logging.getLogger(__name__)


class BurstProfile(str, Enum):
    FLASH_CRASH = "flash_crash"    # τ の前後で符号が反転し元に戻る
    GRADUAL_JUMP = "gradual_jump"  # τ 以降はドリフトなし


@dataclass(frozen=True)
class BurstParams:
    """
    バースト注入のパラメータ

    a = 0 でドリフトバーストなし, b = 0 でボラティリティバーストなし。
    same_brownian を True にするとボラティリティバーストは価格と同じブラウン運動に乗ります。
    """
    a: float = 0.0
    alpha: float = 0.65
    b: float = 0.0
    beta: float = 0.2
    tau_db: float = BURST_TAU
    window: Tuple[float, float] = BURST_WINDOW
    recenter_vb: bool = True
    same_brownian: bool = False
    profile: BurstProfile = BurstProfile.FLASH_CRASH

    def __post_init__(self):
        object.__setattr__(self, "window", tuple(float(w) for w in self.window))
        object.__setattr__(self, "profile", BurstProfile(self.profile))
        lo, hi = self.window
        if not (0.0 <= lo < hi <= 1.0):
            raise DomainError(f"バースト窓は [0, 1] の中にある必要があります: {self.window}")
        if not lo < self.tau_db < hi:
            raise DomainError(f"tau_db は窓の内側にある必要があります: {self.tau_db}")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha は (0, 1) の範囲である必要があります: {self.alpha}")
        if not 0.0 <= self.beta < 0.5:
            raise DomainError(f"beta は [0, 0.5) の範囲である必要があります: {self.beta}")
        if self.b < 0:
            raise DomainError(f"b は非負である必要があります: {self.b}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "a": self.a, "alpha": self.alpha, "b": self.b, "beta": self.beta,
            "tau_db": self.tau_db, "window": list(self.window),
            "recenter_vb": self.recenter_vb, "same_brownian": self.same_brownian,
            "profile": self.profile.value,
        }


def _power_integral(tau: float, exponent: float, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """∫_{x1}^{x2} |τ - u|^{-exponent} du (区間は τ の片側にあること)"""
    power = 1.0 - exponent
    return np.abs(np.abs(x2 - tau) ** power - np.abs(x1 - tau) ** power) / power


def _side_integrals(grid: np.ndarray, bp: BurstParams, exponent: float) -> Tuple[np.ndarray, np.ndarray]:
    """各区間 [u_i, u_{i+1}] ∩ 窓 の τ 前後それぞれの ∫ |τ - u|^{-exponent} du"""
    lo, hi = bp.window
    tau = bp.tau_db
    u1, u2 = grid[:-1], grid[1:]

    a1, a2 = np.clip(u1, lo, tau), np.clip(u2, lo, tau)
    pre = np.where(a2 > a1, _power_integral(tau, exponent, a1, a2), 0.0)

    b1, b2 = np.clip(u1, tau, hi), np.clip(u2, tau, hi)
    post = np.where(b2 > b1, _power_integral(tau, exponent, b1, b2), 0.0)
    return pre, post


def drift_burst_increments(grid: np.ndarray, bp: BurstParams,
                           day_fraction_of_year: float = DAY_FRACTION_OF_YEAR) -> np.ndarray:
    """
    各区間のドリフト寄与 ∫ μ_t dt (厳密)

    Args:
        grid: 日内時刻 (0..1, 長さ n + 1)
        bp: バーストパラメータ
        day_fraction_of_year: 1日の長さ (年)
    """
    if bp.a == 0.0:
        return np.zeros(len(grid) - 1)
    pre, post = _side_integrals(np.asarray(grid, float), bp, bp.alpha)
    post_factor = 1.0 if bp.profile is BurstProfile.FLASH_CRASH else 0.0
    return bp.a * day_fraction_of_year * (post_factor * post - pre)


def volatility_burst_variances(grid: np.ndarray, bp: BurstParams, theta: float = HESTON_THETA,
                               day_fraction_of_year: float = DAY_FRACTION_OF_YEAR) -> np.ndarray:
    """各区間のボラティリティバーストの分散 b²θ ∫ |τ - t|^{-2β} dt"""
    if bp.b == 0.0:
        return np.zeros(len(grid) - 1)
    pre, post = _side_integrals(np.asarray(grid, float), bp, 2.0 * bp.beta)
    return bp.b ** 2 * theta * day_fraction_of_year * (pre + post)


def cumulative_burst_return(bp: BurstParams,
                            day_fraction_of_year: float = DAY_FRACTION_OF_YEAR) -> float:
    """窓の開始から τ までのドリフト寄与の大きさ a · dfy · (τ - lo)^{1-α} / (1-α)"""
    lo = bp.window[0]
    return abs(bp.a) * day_fraction_of_year * (bp.tau_db - lo) ** (1.0 - bp.alpha) / (1.0 - bp.alpha)


def burst_volatility_ratio(variance: np.ndarray, bp: BurstParams, theta: float = HESTON_THETA,
                           day_fraction_of_year: float = DAY_FRACTION_OF_YEAR) -> float:
    """窓内でボラティリティバーストが標準偏差を何倍にするか (Heston 分散との比)"""
    n = len(variance) - 1
    grid = np.linspace(0.0, 1.0, n + 1)
    vb = volatility_burst_variances(grid, bp, theta, day_fraction_of_year)
    lo, hi = bp.window
    inside = (grid[:-1] >= lo) & (grid[1:] <= hi)
    base = float(np.sum(np.maximum(variance[:-1][inside], 0.0))) * day_fraction_of_year / n
    if base <= 0.0:
        return math.nan
    return math.sqrt((base + float(vb[inside].sum())) / base)


def inject_bursts(increments: np.ndarray, variance: np.ndarray, bp: BurstParams,
                  day_fraction_of_year: float = DAY_FRACTION_OF_YEAR, seed: Optional[Any] = None,
                  theta: float = HESTON_THETA,
                  price_shocks: Optional[np.ndarray] = None) -> np.ndarray:
    """
    増分にドリフトバーストとボラティリティバーストを加える

    Args:
        increments: 元の対数価格増分 (長さ n)
        variance: 元の分散パス (長さ n + 1)
        bp: バーストパラメータ
        day_fraction_of_year: 1日の長さ (年)
        seed: ボラティリティバーストの独立ショック用シード
        theta: σ^vb の基準となる長期分散 θ
        price_shocks: same_brownian のときに使う価格側の標準正規ショック

    Returns:
        バーストを加えた増分
    """
    increments = np.asarray(increments, dtype=float)
    n = increments.size
    if len(variance) != n + 1:
        raise DomainError(f"分散パスの長さは n + 1 である必要があります: {len(variance)} vs {n + 1}")

    grid = np.linspace(0.0, 1.0, n + 1)
    out = increments + drift_burst_increments(grid, bp, day_fraction_of_year)

    vb_var = volatility_burst_variances(grid, bp, theta, day_fraction_of_year)
    if np.any(vb_var > 0):
        if bp.same_brownian:
            if price_shocks is None:
                raise DomainError("same_brownian には price_shocks が必要です")
            shocks = np.asarray(price_shocks, dtype=float)
        else:
            shocks = np.random.default_rng(seed).standard_normal(n)
        vb = np.sqrt(vb_var) * shocks
        inside = vb_var > 0
        if bp.recenter_vb:
            vb[inside] -= vb[inside].mean()
        out = out + vb
        logger.debug("ボラティリティバースト: 窓内の標準偏差 %.2f 倍",
                     burst_volatility_ratio(variance, bp, theta, day_fraction_of_year))
    return out
