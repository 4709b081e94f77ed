#!/usr/bin/env python3
"""
カーネル関数と定数

左側指数カーネル K(x) = exp(-|x|) (x <= 0), Parzen ラグ窓, および
検定統計量の漸近挙動に現れるカーネル定数 (K_2, m_K, m'_K, c_{K,β}) を提供します。

定数の数値積分は切断前の (無限台の) カーネルに対して行います。
truncation_radius による切断は推定時の窓の打ち切りにだけ使います。
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy import integrate, special

from config import KERNEL_FAMILY, KERNEL_QUAD_EPSREL, KERNEL_TRUNCATION_RADIUS
from driftburst.errors import ConfigError, DomainError, InputDataError


class KernelFamily(str, Enum):
    LEFT_EXPONENTIAL = "left_exponential"


@dataclass(frozen=True)
class KernelSpec:
    """カーネルの種類と切断半径 (バンド幅単位)"""
    family: KernelFamily = KernelFamily(KERNEL_FAMILY)
    truncation_radius: float = field(default=KERNEL_TRUNCATION_RADIUS)

    def __post_init__(self):
        object.__setattr__(self, "family", KernelFamily(self.family))
        if not (self.truncation_radius > 0 and math.isfinite(self.truncation_radius)):
            raise ConfigError(
                f"truncation_radius は正の有限値である必要があります: {self.truncation_radius}",
                key="truncation_radius",
            )


def _raw_kernel(spec: KernelSpec) -> Callable[[np.ndarray], np.ndarray]:
    """切断なしのカーネル (ベクトル化)"""
    if spec.family is KernelFamily.LEFT_EXPONENTIAL:
        return lambda x: np.where(x <= 0, np.exp(-np.abs(x)), 0.0)
    raise ConfigError(f"Unknown kernel family: {spec.family}")


def kernel_weights(spec: KernelSpec, x: np.ndarray) -> np.ndarray:
    """
    カーネルをベクトルで評価する (切断あり)

    Args:
        spec: カーネル設定
        x: 評価点 (バンド幅単位)

    Returns:
        各点のカーネル値。|x| > truncation_radius では正確に 0
    """
    x = np.asarray(x, dtype=float)
    values = _raw_kernel(spec)(x)
    return np.where(np.abs(x) > spec.truncation_radius, 0.0, values)


def eval_kernel(spec: KernelSpec, x: float) -> float:
    """
    カーネルを1点で評価する

    Args:
        spec: カーネル設定
        x: 評価点 (バンド幅単位)

    Returns:
        非負のカーネル値

    Raises:
        InputDataError: x が有限でない場合
    """
    if not math.isfinite(x):
        raise InputDataError(f"カーネルの評価点が有限ではありません: {x}")
    return float(kernel_weights(spec, np.array([x]))[0])


def kernel_K2(spec: KernelSpec, method: str = "analytic") -> float:
    """
    K_2 = ∫ K(x)^2 dx

    Args:
        spec: カーネル設定
        method: "analytic" (閉形式があれば使用) または "quad" (適応数値積分)

    Returns:
        K_2 の値
    """
    if method == "analytic" and spec.family is KernelFamily.LEFT_EXPONENTIAL:
        return 0.5

    raw = _raw_kernel(spec)
    value, _ = integrate.quad(
        lambda x: float(raw(np.array(x))) ** 2, -np.inf, 0.0,
        epsabs=0.0, epsrel=KERNEL_QUAD_EPSREL, limit=200,
    )
    return value


def kernel_moment(spec: KernelSpec, power: float, squared: bool = False,
                  method: str = "analytic") -> float:
    """
    カーネルモーメント m_K(α) = ∫ K(x)|x|^α dx, m'_K(α) = ∫ K(x)^2 |x|^α dx

    Args:
        spec: カーネル設定
        power: 指数 α (> -1)
        squared: True なら m'_K を返す
        method: "analytic" (ガンマ関数の閉形式) または "quad"

    Returns:
        モーメントの値

    Raises:
        DomainError: power <= -1 の場合 (積分が発散)
    """
    if not power > -1:
        raise DomainError(f"カーネルモーメントの指数は -1 より大きい必要があります: {power}")

    if method == "analytic" and spec.family is KernelFamily.LEFT_EXPONENTIAL:
        value = special.gamma(1.0 + power)
        if squared:
            value *= 2.0 ** (-(1.0 + power))
        return float(value)

    raw = _raw_kernel(spec)

    def integrand(u: float) -> float:
        k = float(raw(np.array(-u)))
        return k * k if squared else k

    # |x|^α の原点特異性は alg 重みで処理し, 裾は別に積分する
    head, _ = integrate.quad(integrand, 0.0, 1.0, weight="alg", wvar=(power, 0.0),
                             epsabs=0.0, epsrel=KERNEL_QUAD_EPSREL, limit=200)
    tail, _ = integrate.quad(lambda u: integrand(u) * u ** power, 1.0, np.inf,
                             epsabs=0.0, epsrel=KERNEL_QUAD_EPSREL, limit=200)
    return head + tail


def alternative_constant(spec: KernelSpec, beta: float, method: str = "analytic") -> float:
    """
    ボラティリティバースト下で σ̂ の収束先に掛かる定数 c_{K,β}

    c_{K,β} = sqrt(m'_K(-2β) / (K_2 · m_K(-2β)))。左側指数カーネルでは 2^β。

    Args:
        spec: カーネル設定
        beta: ボラティリティバースト指数 (0 <= β < 1/2)
        method: "analytic" または "quad"

    Returns:
        c_{K,β}
    """
    if not 0.0 <= beta < 0.5:
        raise DomainError(f"beta は [0, 0.5) の範囲である必要があります: {beta}")
    m_sq = kernel_moment(spec, -2.0 * beta, squared=True, method=method)
    m = kernel_moment(spec, -2.0 * beta, squared=False, method=method)
    return math.sqrt(m_sq / (kernel_K2(spec, method=method) * m))


def bias_constant(spec: KernelSpec, beta: float, c_ratio: float = 1.0,
                  method: str = "analytic") -> float:
    """
    α - β = 1/2 の境界ケースでの t 統計量の極限シフト d_{K,β,c1,c2}

    d = (c1/c2) · m'_K(-β-1/2) / sqrt(K_2 · m_K(-2β))。β → 1/2 で発散します。

    Args:
        spec: カーネル設定
        beta: ボラティリティバースト指数
        c_ratio: ドリフト係数とボラティリティ係数の比 c1/c2
        method: "analytic" または "quad"
    """
    if not 0.0 <= beta < 0.5:
        raise DomainError(f"beta は [0, 0.5) の範囲である必要があります: {beta}")
    num = kernel_moment(spec, -beta - 0.5, squared=True, method=method)
    den = math.sqrt(kernel_K2(spec, method=method) * kernel_moment(spec, -2.0 * beta, method=method))
    return c_ratio * num / den


def jump_limit(spec: KernelSpec) -> float:
    """事前告知ジャンプ時刻での |t| の極限 sqrt(K(0)/K_2)"""
    return math.sqrt(eval_kernel(spec, 0.0) / kernel_K2(spec))


def parzen_weights(x: np.ndarray) -> np.ndarray:
    """Parzen ラグ窓 (ベクトル化)"""
    a = np.abs(np.asarray(x, dtype=float))
    inner = 1.0 - 6.0 * a ** 2 + 6.0 * a ** 3
    outer = 2.0 * (1.0 - a) ** 3
    return np.where(a <= 0.5, inner, np.where(a < 1.0, outer, 0.0))


def parzen(x: float) -> float:
    """
    Parzen ラグ窓 w(x)

    Args:
        x: 評価点

    Returns:
        1 - 6x² + 6|x|³ (|x| <= 1/2), 2(1-|x|)³ (1/2 < |x| < 1), 0 (それ以外)
    """
    if not math.isfinite(x):
        raise InputDataError(f"Parzen 窓の評価点が有限ではありません: {x}")
    return float(parzen_weights(np.array([x]))[0])
