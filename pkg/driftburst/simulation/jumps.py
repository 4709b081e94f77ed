#!/usr/bin/env python3
"""
焼き戻し安定ジャンプ

レヴィ密度 ν(dx) = ψ e^{-λx} / x^{1+υ} (x > 0) を持つ片側の従属過程を2本生成し,
その差をジャンプ過程とします。υ = 0.5 では各ステップの増分を厳密に抽出できます:
提案分布は尺度 c = 2π ψ² dt² の Lévy 分布 (c / Z², Z ~ N(0,1)) で,
確率 exp(-λx) で受容します。
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
from scipy import special

from config import DAY_FRACTION_OF_YEAR, JUMP_LAMBDA, JUMP_UPSILON
from driftburst.errors import DomainError
from driftburst.simulation.heston import HestonParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class JumpParams:
    """焼き戻し安定ジャンプのパラメータ"""
    psi: float
    lam: float = JUMP_LAMBDA
    upsilon: float = JUMP_UPSILON

    def __post_init__(self):
        if self.psi < 0 or not math.isfinite(self.psi):
            raise DomainError(f"psi は非負の有限値である必要があります: {self.psi}")
        if not self.lam > 0:
            raise DomainError(f"lambda は正である必要があります: {self.lam}")

    def to_dict(self) -> Dict[str, Any]:
        return {"psi": self.psi, "lam": self.lam, "upsilon": self.upsilon}


def _second_moment_per_side(psi: float, lam: float, upsilon: float) -> float:
    """∫ x² ν(dx) = ψ Γ(2-υ) λ^{υ-2}"""
    return psi * special.gamma(2.0 - upsilon) * lam ** (upsilon - 2.0)


def jump_quadratic_variation(jp: JumpParams,
                             day_fraction_of_year: float = DAY_FRACTION_OF_YEAR) -> float:
    """1日あたりのジャンプ二次変動の期待値 (両側)"""
    return day_fraction_of_year * 2.0 * _second_moment_per_side(jp.psi, jp.lam, jp.upsilon)


def calibrate_jump_intensity(target_share: float, hp: HestonParams, lam: float = JUMP_LAMBDA,
                             upsilon: float = JUMP_UPSILON,
                             day_fraction_of_year: float = DAY_FRACTION_OF_YEAR) -> float:
    """
    ジャンプが二次変動の target_share を占めるように ψ を決める

    連続部分の二次変動を θ·day_fraction_of_year とすると
    ψ = (s / (1 - s)) · θ / (2 Γ(2-υ) λ^{υ-2})。日の長さは両辺で相殺します。

    Args:
        target_share: ジャンプの二次変動シェア (0 < s < 1)
        hp: Heston パラメータ (θ を使用)
        lam: 焼き戻しパラメータ λ
        upsilon: 活動指数 υ
        day_fraction_of_year: 1日の長さ (年)

    Returns:
        ψ
    """
    if not 0.0 < target_share < 1.0:
        raise DomainError(f"target_share は (0, 1) の範囲である必要があります: {target_share}")
    continuous_qv = hp.theta * day_fraction_of_year
    jump_qv = target_share / (1.0 - target_share) * continuous_qv
    return jump_qv / (day_fraction_of_year * 2.0 * special.gamma(2.0 - upsilon) * lam ** (upsilon - 2.0))


def _one_sided_increments(rng: np.random.Generator, psi: float, lam: float, dt: float,
                          n: int) -> np.ndarray:
    """片側の焼き戻し安定従属過程の n 個の増分 (受容棄却法)"""
    scale = 2.0 * math.pi * psi ** 2 * dt ** 2
    out = np.empty(n)
    pending = np.arange(n)
    rounds = 0
    while pending.size:
        z = rng.standard_normal(pending.size)
        with np.errstate(divide="ignore"):
            proposal = scale / (z * z)
        accept = rng.random(pending.size) < np.exp(-lam * proposal)
        out[pending[accept]] = proposal[accept]
        pending = pending[~accept]
        rounds += 1
    logger.debug("受容棄却法: %d ラウンド", rounds)
    return out


def simulate_tempered_stable(jp: JumpParams, n: int,
                             day_fraction_of_year: float = DAY_FRACTION_OF_YEAR,
                             seed: Optional[Any] = None) -> np.ndarray:
    """
    1日分 (n ステップ) のジャンプ増分

    Args:
        jp: ジャンプパラメータ (υ = 0.5 のみ対応)
        n: ステップ数
        day_fraction_of_year: 1日の長さ (年)
        seed: 乱数シード

    Returns:
        正側の増分 - 負側の増分 (長さ n)

    Raises:
        DomainError: υ ≠ 0.5 の場合
    """
    if not math.isclose(jp.upsilon, 0.5):
        raise DomainError(f"υ = 0.5 以外の焼き戻し安定過程には対応していません: {jp.upsilon}")
    if jp.psi == 0.0:
        return np.zeros(n)

    rng = np.random.default_rng(seed)
    dt = day_fraction_of_year / n
    up = _one_sided_increments(rng, jp.psi, jp.lam, dt, n)
    down = _one_sided_increments(rng, jp.psi, jp.lam, dt, n)
    return up - down
