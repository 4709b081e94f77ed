#!/usr/bin/env python3
"""
Heston 確率的ボラティリティモデル

    dX = σ dW,  dσ² = κ(θ - σ²) dt + ξ σ dB,  corr(W, B) = ρ

係数は年率で, 1日を day_fraction_of_year 年として n ステップの Euler 法で離散化します。
分散は各ステップ後に 0 で打ち切り (full truncation), 初期値は定常分布
Gamma(shape = 2κθ/ξ², rate = 2κ/ξ²) から引きます。
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from config import DAY_FRACTION_OF_YEAR, HESTON_KAPPA, HESTON_RHO, HESTON_THETA, HESTON_XI
from driftburst.errors import DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HestonParams:
    """Heston モデルのパラメータ (年率)"""
    kappa: float = HESTON_KAPPA
    theta: float = HESTON_THETA
    xi: float = HESTON_XI
    rho: float = HESTON_RHO

    def __post_init__(self):
        for name in ("kappa", "theta", "xi"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"{name} は正の有限値である必要があります: {value}")
        if not -1.0 <= self.rho <= 1.0:
            raise DomainError(f"rho は [-1, 1] の範囲である必要があります: {self.rho}")

    @property
    def stationary_shape(self) -> float:
        return 2.0 * self.kappa * self.theta / self.xi ** 2

    @property
    def stationary_rate(self) -> float:
        return 2.0 * self.kappa / self.xi ** 2

    def to_dict(self) -> Dict[str, Any]:
        return {"kappa": self.kappa, "theta": self.theta, "xi": self.xi, "rho": self.rho}


def feller_condition(p: HestonParams) -> Dict[str, Any]:
    """
    Feller 条件 2κθ >= ξ² の確認 (報告のみで強制はしない)

    Returns:
        {'lhs': 2κθ, 'rhs': ξ², 'satisfied': bool}
    """
    lhs, rhs = 2.0 * p.kappa * p.theta, p.xi ** 2
    result = {"lhs": lhs, "rhs": rhs, "satisfied": lhs >= rhs}
    if not result["satisfied"]:
        logger.warning("⚠️ Feller 条件を満たしていません: 2κθ=%.4f < ξ²=%.4f", lhs, rhs)
    return result


@dataclass(frozen=True)
class HestonPath:
    """
    シミュレーション結果

    Attributes:
        variance: 各グリッド点の σ² (長さ n + 1)
        increments: 対数価格の増分 (長さ n)
        price_shocks: 価格側の標準正規ショック ΔW/sqrt(dt) (長さ n)
        dt: 1ステップの長さ (年)
    """
    variance: np.ndarray
    increments: np.ndarray
    price_shocks: np.ndarray
    dt: float


def simulate_heston(p: HestonParams, n: int, day_fraction_of_year: float = DAY_FRACTION_OF_YEAR,
                    seed: Optional[Any] = None, v0: Optional[float] = None) -> HestonPath:
    """
    Heston モデルの1日分のパス

    Args:
        p: Heston パラメータ
        n: ステップ数 (>= 2)
        day_fraction_of_year: 1日の長さ (年)
        seed: 乱数シード (int, SeedSequence, Generator)
        v0: 初期分散 (指定しなければ定常 Gamma 分布から抽出)

    Returns:
        HestonPath

    Raises:
        DomainError: n < 2 または day_fraction_of_year <= 0 の場合
    """
    if n < 2:
        raise DomainError(f"n は2以上である必要があります: {n}")
    if not day_fraction_of_year > 0:
        raise DomainError(f"day_fraction_of_year は正である必要があります: {day_fraction_of_year}")

    rng = np.random.default_rng(seed)
    dt = day_fraction_of_year / n
    sqrt_dt = math.sqrt(dt)

    if v0 is None:
        v0 = rng.gamma(p.stationary_shape, 1.0 / p.stationary_rate)
    z_price = rng.standard_normal(n)
    z_vol = p.rho * z_price + math.sqrt(1.0 - p.rho ** 2) * rng.standard_normal(n)

    variance = np.empty(n + 1)
    variance[0] = v = max(float(v0), 0.0)
    drift_step = p.kappa * dt
    vol_step = p.xi * sqrt_dt
    for i in range(n):
        v = v + drift_step * (p.theta - v) + vol_step * math.sqrt(v) * z_vol[i]
        v = v if v > 0.0 else 0.0
        variance[i + 1] = v

    increments = np.sqrt(variance[:-1] * dt) * z_price
    return HestonPath(variance=variance, increments=increments, price_shocks=z_price, dt=dt)
