#!/usr/bin/env python3
"""
局所パラメトリックモデルの最尤推定

区間 [t_{i-1}, t_i] の増分は独立な正規分布に従うとします:
    ΔX_i ~ N(μ A_i, σ² S_i)
    A_i = ((T - t_{i-1})^{1-α} - (T - t_i)^{1-α}) / (1 - α)
    S_i = ((T - t_{i-1})^{1-2β} - (T - t_i)^{1-2β}) / (1 - 2β)

(α, β) を固定すると μ と σ² は重み付き最小二乗の閉形式で求まるので,
最適化はプロファイル尤度上の (α, β) だけで行います。
時刻は [0, 1] に基準化してから最適化し, 結果を元の単位に戻します。
"""

import logging
import math
from dataclasses import asdict, dataclass
from itertools import product
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize, stats

from config import (
    LR_TOLERANCE,
    MLE_ALPHA_BOUNDS,
    MLE_BETA_BOUNDS,
    MLE_MIN_OBS,
    MLE_START_ALPHAS,
    MLE_START_BETAS,
)
from driftburst.errors import DomainError, FitError, InputDataError, OptimizationError

logger = logging.getLogger(__name__)

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class BurstModel:
    """パラメータ Θ = (μ, σ, α, β)"""
    mu: float
    sigma: float
    alpha: float = 0.0
    beta: float = 0.0


@dataclass(frozen=True)
class ParamFit:
    """最尤推定と尤度比検定の結果"""
    mu: float
    sigma: float
    alpha: float
    beta: float
    loglik: float
    converged: bool
    lr_drift: float
    lr_vol: float
    pvalue_drift: float
    pvalue_vol: float
    loglik_no_drift: float
    loglik_no_vol: float
    n: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _interval_integrals(times: np.ndarray, T: float, exponent: float) -> np.ndarray:
    """∫_{t_{i-1}}^{t_i} (T - s)^{-exponent} ds"""
    power = 1.0 - exponent
    remaining = T - times
    return (remaining[:-1] ** power - remaining[1:] ** power) / power


def _validate_window(times: np.ndarray, increments: np.ndarray, T: float) -> None:
    if times.size != increments.size + 1:
        raise InputDataError(f"times の長さは増分 + 1 である必要があります: {times.size} vs {increments.size}")
    if not np.all(np.isfinite(increments)):
        raise InputDataError("増分に有限でない値が含まれています")
    if not np.all(np.diff(times) > 0):
        raise InputDataError("times は狭義単調増加である必要があります")
    if not times[-1] < T:
        raise DomainError(f"最後の観測時刻 {times[-1]} は爆発時刻 T={T} より前である必要があります")


def loglik(theta: BurstModel, times: np.ndarray, increments: np.ndarray, T: float) -> float:
    """
    ガウス対数尤度

    Args:
        theta: パラメータ
        times: 観測時刻 t_0, ..., t_n
        increments: 増分 ΔX_1, ..., ΔX_n
        T: 爆発時刻 (t_n < T)

    Returns:
        対数尤度。σ²S_i <= 0 となる区間があれば -inf
    """
    times = np.asarray(times, dtype=float)
    increments = np.asarray(increments, dtype=float)
    _validate_window(times, increments, T)

    mean = theta.mu * _interval_integrals(times, T, theta.alpha)
    var = theta.sigma ** 2 * _interval_integrals(times, T, 2.0 * theta.beta)
    if np.any(var <= 0):
        return -math.inf
    resid = increments - mean
    return float(-0.5 * np.sum(_LOG_2PI + np.log(var) + resid * resid / var))


def _profile(alpha: float, beta: float, u: np.ndarray,
             x: np.ndarray) -> Tuple[float, float, float]:
    """(α, β) を固定したときの (プロファイル対数尤度, μ̂, σ̂²)  (基準化時刻, T = 1)"""
    a = _interval_integrals(u, 1.0, alpha)
    s = _interval_integrals(u, 1.0, 2.0 * beta)
    if np.any(s <= 0):
        return -math.inf, math.nan, math.nan
    mu = float(np.sum(a * x / s) / np.sum(a * a / s))
    resid = x - mu * a
    sigma2 = float(np.mean(resid * resid / s))
    if not sigma2 > 0:
        return -math.inf, mu, sigma2
    n = x.size
    value = -0.5 * n * (_LOG_2PI + math.log(sigma2) + 1.0) - 0.5 * float(np.sum(np.log(s)))
    return value, mu, sigma2


@dataclass(frozen=True)
class _Optimum:
    alpha: float
    beta: float
    loglik: float
    success: bool
    message: str


def _maximize(u: np.ndarray, x: np.ndarray, starts: Sequence[Tuple[float, float]],
              free_alpha: bool, free_beta: bool) -> Tuple[_Optimum, List[_Optimum]]:
    """マルチスタート L-BFGS-B。固定したパラメータは開始値のまま"""
    bounds = []
    if free_alpha:
        bounds.append(MLE_ALPHA_BOUNDS)
    if free_beta:
        bounds.append(MLE_BETA_BOUNDS)

    def unpack(params, start):
        alpha, beta = start
        params = list(params)
        if free_alpha:
            alpha = params.pop(0)
        if free_beta:
            beta = params.pop(0)
        return alpha, beta

    results = []
    for start in starts:
        def objective(params, start=start):
            value = _profile(*unpack(params, start), u, x)[0]
            return -value if math.isfinite(value) else 1e300

        x0 = [v for v, free in zip(start, (free_alpha, free_beta)) if free]
        if not x0:
            value = _profile(start[0], start[1], u, x)[0]
            results.append(_Optimum(start[0], start[1], value, math.isfinite(value), "fixed"))
            continue
        res = optimize.minimize(objective, x0, method="L-BFGS-B", bounds=bounds)
        alpha, beta = unpack(res.x, start)
        value = _profile(alpha, beta, u, x)[0]
        results.append(_Optimum(float(alpha), float(beta), value,
                                bool(res.success) and math.isfinite(value), str(res.message)))

    best = max(results, key=lambda r: (r.loglik if math.isfinite(r.loglik) else -math.inf))
    return best, results


def lr_test(restricted_loglik: float, full_loglik: float,
            tolerance: float = LR_TOLERANCE) -> Tuple[float, float]:
    """
    尤度比検定 2(ℓ_full - ℓ_restricted) と χ²₁ の上側確率

    Raises:
        OptimizationError: ℓ_full が ℓ_restricted を tolerance 以上下回る場合
    """
    gain = full_loglik - restricted_loglik
    if gain < -tolerance:
        raise OptimizationError(
            f"入れ子モデルの対数尤度が逆転しています: full={full_loglik:.6f} < restricted={restricted_loglik:.6f}"
        )
    statistic = max(2.0 * gain, 0.0)
    return statistic, float(stats.chi2.sf(statistic, df=1))


def fit_mle(times: np.ndarray, increments: np.ndarray, T: float) -> ParamFit:
    """
    Θ = (μ, σ, α, β) の最尤推定と α = 0, β = 0 の尤度比検定

    (α, β) ∈ {0, 0.3, 0.6} × {0, 0.2, 0.4} と2つの制約付き最適解から開始します。

    Args:
        times: 観測時刻 t_0, ..., t_n (秒)
        increments: 増分 (長さ n >= 50)
        T: 爆発時刻 (t_n < T)

    Returns:
        ParamFit

    Raises:
        InputDataError: 増分が少なすぎる場合
        FitError: 全ての開始点で最適化が収束しなかった場合
    """
    times = np.asarray(times, dtype=float)
    x = np.asarray(increments, dtype=float)
    if x.size < MLE_MIN_OBS:
        raise InputDataError(f"最尤推定には {MLE_MIN_OBS} 個以上の増分が必要です (入力: {x.size})")
    _validate_window(times, x, T)

    scale = T - times[0]
    u = (times - times[0]) / scale

    no_drift, no_drift_all = _maximize(u, x, [(0.0, b) for b in MLE_START_BETAS],
                                       free_alpha=False, free_beta=True)
    no_vol, no_vol_all = _maximize(u, x, [(a, 0.0) for a in MLE_START_ALPHAS],
                                   free_alpha=True, free_beta=False)
    starts = list(product(MLE_START_ALPHAS, MLE_START_BETAS))
    starts += [(no_drift.alpha, no_drift.beta), (no_vol.alpha, no_vol.beta)]
    full, full_all = _maximize(u, x, starts, free_alpha=True, free_beta=True)

    candidates = [full, no_drift, no_vol]
    best = max(candidates, key=lambda r: r.loglik)
    converged = any(r.success for r in full_all)
    if not converged or not math.isfinite(best.loglik):
        raise FitError(
            "全ての開始点で最尤推定が収束しませんでした",
            diagnostics=[f"start {s}: {r.message}" for s, r in zip(starts, full_all)],
        )

    _, mu_r, sigma2_r = _profile(best.alpha, best.beta, u, x)
    lr_drift, p_drift = lr_test(no_drift.loglik, best.loglik)
    lr_vol, p_vol = lr_test(no_vol.loglik, best.loglik)
    logger.debug("MLE: alpha=%.4f beta=%.4f loglik=%.4f", best.alpha, best.beta, best.loglik)

    return ParamFit(
        mu=mu_r / scale ** (1.0 - best.alpha),
        sigma=math.sqrt(sigma2_r / scale ** (1.0 - 2.0 * best.beta)),
        alpha=best.alpha,
        beta=best.beta,
        loglik=best.loglik,
        converged=converged,
        lr_drift=lr_drift,
        lr_vol=lr_vol,
        pvalue_drift=p_drift,
        pvalue_vol=p_vol,
        loglik_no_drift=no_drift.loglik,
        loglik_no_vol=no_vol.loglik,
        n=int(x.size),
    )


def simulate_window(theta: BurstModel, times: np.ndarray, T: float,
                    seed: Optional[Any] = None) -> np.ndarray:
    """
    局所パラメトリックモデルから増分を生成する

    Args:
        theta: パラメータ
        times: 観測時刻 t_0, ..., t_n (t_n < T)
        T: 爆発時刻
        seed: 乱数シード

    Returns:
        増分 (長さ n)
    """
    times = np.asarray(times, dtype=float)
    if not times[-1] < T:
        raise DomainError(f"最後の観測時刻 {times[-1]} は爆発時刻 T={T} より前である必要があります")
    mean = theta.mu * _interval_integrals(times, T, theta.alpha)
    var = theta.sigma ** 2 * _interval_integrals(times, T, 2.0 * theta.beta)
    return mean + np.sqrt(var) * np.random.default_rng(seed).standard_normal(mean.size)
