#!/usr/bin/env python3
"""
反転回帰と出来高交差項回帰

    R⁺ = a + b R⁻ + ε               (反転回帰)
    R⁺ = a + b R⁻ + c R⁻ V⁻ + ε     (出来高交差項回帰)

標準誤差は Bartlett 重みの Newey-West (lags = 0 で White の HC0 と一致)。
サンプルはピーク時刻順に並べてから推定するため, 入力順序に依存しません。
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from config import MAX_CONDITION_NUMBER, MIN_CGW_OBS, MIN_REVERSION_OBS
from driftburst.analysis.returns import EventReturns
from driftburst.errors import CollinearityError, InputDataError, SingularDesignError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RegressionResult:
    """回帰結果 (係数名は a, b, c)"""
    coefficients: Dict[str, float]
    standard_errors: Dict[str, float]
    t_statistics: Dict[str, float]
    r_squared: float
    n: int
    lags: int
    reversal_fraction: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_row(self) -> Dict[str, Any]:
        """表形式 (係数, 括弧内の t 値, R², %R) の1行"""
        row: Dict[str, Any] = {"n": self.n}
        for name, value in self.coefficients.items():
            row[name] = value
            row[f"t_{name}"] = self.t_statistics[name]
        row["r_squared"] = self.r_squared
        row["reversal_fraction"] = self.reversal_fraction
        return row


def nw_lags(n: int) -> int:
    """イベント回帰のラグ数 floor(4 (n/100)^{2/9})"""
    return int(math.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))


def _xtx_inverse(X: np.ndarray) -> np.ndarray:
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise SingularDesignError(f"計画行列が特異です (rank < {X.shape[1]})")
    return np.linalg.inv(X.T @ X)


def nw_se(X: np.ndarray, residuals: np.ndarray, lags: int) -> np.ndarray:
    """
    Newey-West (Bartlett) の HAC 標準誤差

    Args:
        X: 計画行列 (n × k)
        residuals: OLS 残差 (長さ n)
        lags: ラグ数 (>= 0, 0 なら White)

    Returns:
        係数ごとの標準誤差

    Raises:
        SingularDesignError: 計画行列が特異な場合
    """
    if lags < 0:
        raise InputDataError(f"lags は非負である必要があります: {lags}")
    X = np.asarray(X, dtype=float)
    scores = X * np.asarray(residuals, dtype=float)[:, None]
    meat = scores.T @ scores
    for lag in range(1, min(lags, scores.shape[0] - 1) + 1):
        weight = 1.0 - lag / (lags + 1.0)
        cross = scores[lag:].T @ scores[:-lag]
        meat += weight * (cross + cross.T)
    bread = _xtx_inverse(X)
    return np.sqrt(np.diag(bread @ meat @ bread))


def _ols(X: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
    condition = float(np.linalg.cond(X))
    if not math.isfinite(condition) or condition > MAX_CONDITION_NUMBER:
        raise CollinearityError(f"計画行列の条件数が大きすぎます: {condition:.3g}",
                                condition_number=condition)
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    centered = y - y.mean()
    tss = float(centered @ centered)
    r_squared = 1.0 - float(resid @ resid) / tss if tss > 0 else 0.0
    return beta, resid, float(min(max(r_squared, 0.0), 1.0))


def reversal_fraction(r_minus: np.ndarray, r_plus: np.ndarray) -> float:
    """事前と事後のリターンが反対符号の割合 (ゼロは反転に数えない)"""
    r_minus, r_plus = np.asarray(r_minus, float), np.asarray(r_plus, float)
    return float(np.mean(r_minus * r_plus < 0)) if r_minus.size else float("nan")


def _ordered(samples: Sequence[EventReturns]) -> List[EventReturns]:
    return sorted(samples, key=lambda s: (s.peak_time, s.R_minus, s.R_plus))


def _fit(names: List[str], X: np.ndarray, y: np.ndarray, r_minus: np.ndarray) -> RegressionResult:
    beta, resid, r_squared = _ols(X, y)
    lags = nw_lags(y.size)
    se = nw_se(X, resid, lags)
    with np.errstate(divide="ignore", invalid="ignore"):
        t_stats = beta / se
    return RegressionResult(
        coefficients={k: float(v) for k, v in zip(names, beta)},
        standard_errors={k: float(v) for k, v in zip(names, se)},
        t_statistics={k: float(v) for k, v in zip(names, t_stats)},
        r_squared=r_squared,
        n=int(y.size),
        lags=lags,
        reversal_fraction=reversal_fraction(r_minus, y),
    )


def reversion_regression(samples: Sequence[EventReturns]) -> RegressionResult:
    """
    反転回帰 R⁺ = a + b R⁻ + ε

    Raises:
        InputDataError: サンプルが10未満の場合
        CollinearityError: R⁻ が退化している場合
    """
    if len(samples) < MIN_REVERSION_OBS:
        raise InputDataError(f"反転回帰には {MIN_REVERSION_OBS} 個以上のイベントが必要です (入力: {len(samples)})")
    ordered = _ordered(samples)
    r_minus = np.array([s.R_minus for s in ordered])
    r_plus = np.array([s.R_plus for s in ordered])
    X = np.column_stack([np.ones_like(r_minus), r_minus])
    return _fit(["a", "b"], X, r_plus, r_minus)


def cgw_regression(samples: Sequence[EventReturns]) -> RegressionResult:
    """
    出来高交差項回帰 R⁺ = a + b R⁻ + c R⁻V⁻ + ε

    交差項が恒等的に 0 (V⁻ ≡ 0) の場合は反転回帰に帰着し, c = 0 を報告します。

    Raises:
        InputDataError: サンプルが20未満, または V⁻ が欠けている場合
        CollinearityError: 条件数が上限を超えた場合
    """
    if len(samples) < MIN_CGW_OBS:
        raise InputDataError(f"出来高交差項回帰には {MIN_CGW_OBS} 個以上のイベントが必要です (入力: {len(samples)})")
    if any(s.V_minus is None for s in samples):
        raise InputDataError("出来高交差項回帰には全イベントの V⁻ が必要です")

    ordered = _ordered(samples)
    r_minus = np.array([s.R_minus for s in ordered])
    r_plus = np.array([s.R_plus for s in ordered])
    interaction = r_minus * np.array([s.V_minus for s in ordered])

    if not np.any(interaction):
        logger.warning("⚠️ 交差項が恒等的に 0 のため c = 0 として反転回帰に帰着します")
        X = np.column_stack([np.ones_like(r_minus), r_minus])
        nested = _fit(["a", "b"], X, r_plus, r_minus)
        return RegressionResult(
            coefficients={**nested.coefficients, "c": 0.0},
            standard_errors={**nested.standard_errors, "c": float("nan")},
            t_statistics={**nested.t_statistics, "c": float("nan")},
            r_squared=nested.r_squared,
            n=nested.n,
            lags=nested.lags,
            reversal_fraction=nested.reversal_fraction,
        )

    X = np.column_stack([np.ones_like(r_minus), r_minus, interaction])
    return _fit(["a", "b", "c"], X, r_plus, r_minus)
