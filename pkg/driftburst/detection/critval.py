#!/usr/bin/env python3
"""
シミュレーション臨界値

グリッド上の t 統計量列を AR(1) Z_i = ρ Z_{i-1} + ε_i (ε ~ N(0, 1-ρ²)) で近似し,
Z_m* = max_{i<=m} |Z_i| の分位点をモンテカルロで求めます。
分位点は (m, ρ, level) のテーブルとして JSON に保存し, 実データの解析では
(log m, ρ) の双線形補間で臨界値を引きます。

乱数はマスターシードから SeedSequence.spawn でブロックごとに派生させるため,
結果はスレッド数に依存せず, 同じシードとパラメータから同一のテーブルが得られます。
同じ ρ 軸の各値には共通乱数を使います。
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy import signal, stats

from config import (
    AR1_MIN_PAIRS,
    AR1_RHO_CLAMP,
    CRIT_BLOCK_ELEMENTS,
    CRIT_BLOCK_ROWS,
    CRIT_BURN_IN,
    CRIT_LEVELS,
    CRIT_M_AXIS,
    CRIT_MIN_SIMS,
    CRIT_N_SIMS,
    CRIT_RHO_AXIS,
    CRIT_SEED,
    CRIT_TABLE_VERSION,
    MIN_EVENT_SEPARATION,
)
from driftburst.detection.detector import TStatSeries, gumbel_constants, select_peaks
from driftburst.errors import ConfigError, DomainError, ExtrapolationError, InputDataError, TableVersionError
from driftburst.utils.data_loader import load_data_file, save_data_file

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Ar1Fit:
    """AR(1) 係数の推定結果"""
    rho_hat: float
    n_used: int


def fit_ar1(ts: TStatSeries) -> Ar1Fit:
    """
    t 統計量列への AR(1) の当てはめ (定数項付き OLS の傾き)

    連続して欠損でない (t_{i-1}, t_i) の組だけを使い, 結果は [-0.999, 0.999] に丸めます。

    Raises:
        InputDataError: 組が30未満, または説明変数の分散が0の場合
    """
    return fit_ar1_values(ts.t_values)


def fit_ar1_values(values: np.ndarray) -> Ar1Fit:
    values = np.asarray(values, dtype=float)
    ok = np.isfinite(values[:-1]) & np.isfinite(values[1:])
    x, y = values[:-1][ok], values[1:][ok]
    if x.size < AR1_MIN_PAIRS:
        raise InputDataError(f"AR(1) の推定には {AR1_MIN_PAIRS} 組以上が必要です (有効: {x.size})")

    xc = x - x.mean()
    sxx = float(np.dot(xc, xc))
    if sxx <= 0.0:
        raise InputDataError("AR(1) の説明変数の分散が0です")
    rho = float(np.dot(xc, y - y.mean())) / sxx
    return Ar1Fit(rho_hat=float(np.clip(rho, -AR1_RHO_CLAMP, AR1_RHO_CLAMP)), n_used=int(x.size))


def _check_rho(rho: float) -> None:
    if not 0.0 <= rho < 1.0:
        raise DomainError(f"rho は [0, 1) の範囲である必要があります: {rho}")


def _block_layout(n_sims: int, steps: int) -> List[int]:
    rows = max(1, min(CRIT_BLOCK_ROWS, CRIT_BLOCK_ELEMENTS // max(steps, 1)))
    sizes = [rows] * (n_sims // rows)
    if n_sims % rows:
        sizes.append(n_sims % rows)
    return sizes


def _simulate_block(rho: float, rows: int, steps: int, burn_in: int,
                    seed_seq: np.random.SeedSequence) -> np.ndarray:
    """定常 AR(1) パスを rows 本生成し, burn-in 後の steps 点を返す"""
    rng = np.random.default_rng(seed_seq)
    shocks = rng.standard_normal((rows, burn_in + steps))
    z0 = shocks[:, :1]
    if shocks.shape[1] == 1:
        paths = z0
    else:
        scale = math.sqrt(1.0 - rho * rho)
        rest, _ = signal.lfilter([scale], [1.0, -rho], shocks[:, 1:], axis=1, zi=rho * z0)
        paths = np.concatenate([z0, rest], axis=1)
    return paths[:, burn_in:]


def _block_maxima(rho: float, rows: int, m_values: Sequence[int], burn_in: int,
                  seed_seq: np.random.SeedSequence) -> np.ndarray:
    steps = max(m_values)
    running = np.abs(_simulate_block(rho, rows, steps, burn_in, seed_seq))
    np.maximum.accumulate(running, axis=1, out=running)
    return running[:, [m - 1 for m in m_values]]


def simulate_maxima(m_values: Sequence[int], rho: float, n_sims: int,
                    burn_in: int = CRIT_BURN_IN, seed: int = CRIT_SEED,
                    n_jobs: int = 1) -> np.ndarray:
    """
    Z_m* の標本 (n_sims × len(m_values))

    m の入れ子は同じパスの累積最大で求めるため, m について単調になります。
    """
    _check_rho(rho)
    m_values = [int(m) for m in m_values]
    if min(m_values) < 1:
        raise DomainError(f"m は1以上である必要があります: {m_values}")

    sizes = _block_layout(n_sims, max(m_values) + burn_in)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(sizes, seeds))

    def run(job):
        rows, seed_seq = job
        return _block_maxima(rho, rows, m_values, burn_in, seed_seq)

    if n_jobs > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            blocks = list(pool.map(run, jobs))
    else:
        blocks = [run(job) for job in jobs]
    return np.concatenate(blocks, axis=0)


@dataclass(frozen=True)
class QuantileRow:
    """1つの (m, ρ) に対する分位点"""
    m: int
    rho: float
    levels: tuple
    raw: np.ndarray
    normalized: np.ndarray
    std_errors: np.ndarray


def _quantile_std_errors(sample: np.ndarray, levels: Sequence[float]) -> np.ndarray:
    """順序統計量の二項区間から見た分位点のモンテカルロ標準誤差"""
    n = sample.size
    errors = []
    for p in levels:
        delta = math.sqrt(p * (1.0 - p) / n)
        lo, hi = np.quantile(sample, [max(p - delta, 0.0), min(p + delta, 1.0)])
        errors.append((hi - lo) / 2.0)
    return np.array(errors)


def _normalize(raw: np.ndarray, m: int) -> np.ndarray:
    if m < 2:
        return np.full_like(raw, np.nan)
    a_m, b_m = gumbel_constants(m)
    return (raw - b_m) * a_m


def simulate_max_quantiles(m: int, rho: float, levels: Sequence[float] = CRIT_LEVELS,
                           n_sims: int = CRIT_N_SIMS, burn_in: int = CRIT_BURN_IN,
                           seed: int = CRIT_SEED, n_jobs: int = 1) -> QuantileRow:
    """
    Z_m* の分位点をモンテカルロで求める

    Args:
        m: 検定点数
        rho: AR(1) 係数 (0 <= rho < 1)
        levels: 信頼水準
        n_sims: 複製数 (>= 1,000)
        burn_in: 捨てる初期点数 (初期値は定常分布から引くので既定 0)
        seed: マスターシード
        n_jobs: スレッド数

    Returns:
        QuantileRow (raw: 生の分位点, normalized: (q - b_m) a_m)

    Raises:
        DomainError: rho が範囲外, または n_sims が少なすぎる場合
    """
    _check_rho(rho)
    if n_sims < CRIT_MIN_SIMS:
        raise DomainError(f"n_sims は {CRIT_MIN_SIMS} 以上である必要があります: {n_sims}")
    sample = simulate_maxima([m], rho, n_sims, burn_in, seed, n_jobs)[:, 0]
    raw = np.quantile(sample, list(levels))
    return QuantileRow(
        m=int(m), rho=float(rho), levels=tuple(float(p) for p in levels),
        raw=raw, normalized=_normalize(raw, m),
        std_errors=_quantile_std_errors(sample, levels),
    )


def iid_max_quantile(m: int, level: float) -> float:
    """i.i.d. の場合の厳密値 Φ⁻¹((1 + level^{1/m}) / 2)"""
    return float(stats.norm.ppf((1.0 + level ** (1.0 / m)) / 2.0))


@dataclass(frozen=True)
class CriticalValueTable:
    """
    臨界値テーブル

    raw, normalized, std_errors の形状は (len(m_axis), len(rho_axis), len(levels))。
    """
    m_axis: tuple
    rho_axis: tuple
    levels: tuple
    raw: np.ndarray
    normalized: np.ndarray
    std_errors: np.ndarray
    n_sims: int
    seed: int
    burn_in: int
    version: str = CRIT_TABLE_VERSION

    def to_dict(self) -> Dict[str, Any]:
        return {
            "metadata": {
                "generator_version": self.version,
                "n_sims": self.n_sims,
                "seed": self.seed,
                "burn_in": self.burn_in,
                "axes": {
                    "m": list(self.m_axis),
                    "rho": list(self.rho_axis),
                    "level": list(self.levels),
                },
            },
            "data": {
                "raw": self.raw.tolist(),
                "normalized": self.normalized.tolist(),
                "std_errors": self.std_errors.tolist(),
            },
        }


def build_table(m_axis: Sequence[int] = CRIT_M_AXIS, rho_axis: Sequence[float] = CRIT_RHO_AXIS,
                levels: Sequence[float] = CRIT_LEVELS, n_sims: int = CRIT_N_SIMS,
                seed: int = CRIT_SEED, burn_in: int = CRIT_BURN_IN,
                n_jobs: int = 1) -> CriticalValueTable:
    """
    臨界値テーブルを生成する

    各 ρ で同じ乱数ブロックを使い, 全ての m を1組のパスの累積最大から求めます。
    """
    if n_sims < CRIT_MIN_SIMS:
        raise DomainError(f"n_sims は {CRIT_MIN_SIMS} 以上である必要があります: {n_sims}")
    m_axis = tuple(sorted(int(m) for m in m_axis))
    rho_axis = tuple(sorted(float(r) for r in rho_axis))
    levels = tuple(sorted(float(p) for p in levels))

    shape = (len(m_axis), len(rho_axis), len(levels))
    raw = np.empty(shape)
    normalized = np.empty(shape)
    std_errors = np.empty(shape)

    for j, rho in enumerate(rho_axis):
        logger.info("臨界値シミュレーション: rho=%.3f (%d/%d)", rho, j + 1, len(rho_axis))
        maxima = simulate_maxima(m_axis, rho, n_sims, burn_in, seed, n_jobs)
        for i, m in enumerate(m_axis):
            raw[i, j] = np.quantile(maxima[:, i], levels)
            normalized[i, j] = _normalize(raw[i, j], m)
            std_errors[i, j] = _quantile_std_errors(maxima[:, i], levels)

    return CriticalValueTable(m_axis, rho_axis, levels, raw, normalized, std_errors,
                              int(n_sims), int(seed), int(burn_in))


def save_table(table: CriticalValueTable, path: Path) -> Path:
    """臨界値テーブルを JSON に保存する"""
    path = save_data_file(table.to_dict(), path)
    logger.info("臨界値テーブルを保存しました: %s", path)
    return path


def load_table(path: Path) -> CriticalValueTable:
    """
    臨界値テーブルを読み込む

    Raises:
        FileNotFoundError: ファイルが存在しない場合
        TableVersionError: 生成バージョンが一致しない場合
    """
    data = load_data_file(Path(path))
    meta = data.get("metadata", {})
    found = str(meta.get("generator_version"))
    if found != CRIT_TABLE_VERSION:
        raise TableVersionError(
            f"臨界値テーブルのバージョンが一致しません: {found} (期待値: {CRIT_TABLE_VERSION})",
            found=found, expected=CRIT_TABLE_VERSION,
        )
    axes = meta["axes"]
    values = data["data"]
    return CriticalValueTable(
        m_axis=tuple(int(m) for m in axes["m"]),
        rho_axis=tuple(float(r) for r in axes["rho"]),
        levels=tuple(float(p) for p in axes["level"]),
        raw=np.array(values["raw"], dtype=float),
        normalized=np.array(values["normalized"], dtype=float),
        std_errors=np.array(values["std_errors"], dtype=float),
        n_sims=int(meta["n_sims"]),
        seed=int(meta["seed"]),
        burn_in=int(meta["burn_in"]),
        version=found,
    )


def _bracket(axis: np.ndarray, value: float, name: str) -> tuple:
    """補間に使う (下側添字, 上側添字, 重み)"""
    if value < axis[0] - 1e-12 or value > axis[-1] + 1e-12:
        raise ExtrapolationError(
            f"{name}={value} はテーブルの範囲 [{axis[0]}, {axis[-1]}] の外です"
        )
    if axis.size == 1:
        return 0, 0, 0.0
    hi = int(np.clip(np.searchsorted(axis, value, side="left"), 1, axis.size - 1))
    lo = hi - 1
    weight = (value - axis[lo]) / (axis[hi] - axis[lo])
    return lo, hi, float(np.clip(weight, 0.0, 1.0))


def critical_value(table: CriticalValueTable, m: int, rho: float, level: float,
                   kind: str = "raw") -> float:
    """
    (log m, ρ) の双線形補間による臨界値

    Args:
        table: 臨界値テーブル
        m: 検定点数
        rho: AR(1) 係数
        level: 信頼水準 (テーブルの節点であること)
        kind: "raw" (Z_m* の分位点) または "normalized"

    Raises:
        ExtrapolationError: (m, ρ) がテーブル範囲外, または level が節点にない場合
        ConfigError: kind が "raw" でも "normalized" でもない場合
    """
    matches = [k for k, p in enumerate(table.levels) if math.isclose(p, level, abs_tol=1e-12)]
    if not matches:
        raise ExtrapolationError(f"level={level} はテーブルの節点 {list(table.levels)} にありません")
    if kind not in ("raw", "normalized"):
        raise ConfigError(f"Unknown critical value kind: {kind}", key="kind")
    values = table.raw if kind == "raw" else table.normalized
    values = values[:, :, matches[0]]

    i0, i1, wm = _bracket(np.log(np.array(table.m_axis, dtype=float)), math.log(m), "m")
    j0, j1, wr = _bracket(np.array(table.rho_axis, dtype=float), float(rho), "rho")
    top = (1.0 - wr) * values[i0, j0] + wr * values[i0, j1]
    bottom = (1.0 - wr) * values[i1, j0] + wr * values[i1, j1]
    return float((1.0 - wm) * top + wm * bottom)


@dataclass(frozen=True)
class FalsePositiveEstimate:
    """帰無仮説下での誤検出数の期待値"""
    mean: float
    std_error: float
    share_with_event: float
    n_sims: int


def expected_false_positives(m: int, rho: float, threshold: float,
                             n_sims: int = 20_000, seed: int = CRIT_SEED,
                             min_separation_steps: Optional[int] = None,
                             grid_spacing: float = 5.0,
                             burn_in: int = CRIT_BURN_IN) -> FalsePositiveEstimate:
    """
    帰無 AR(1) モデル下で, 検出器と同じ分離規則で抽出されるイベント数の期待値

    Args:
        m: 評価窓あたりの検定点数
        rho: AR(1) 係数
        threshold: 臨界値 (> 0)
        n_sims: 複製数
        seed: マスターシード
        min_separation_steps: イベント間の最小間隔 (グリッド点数, 既定 300 秒相当)
        grid_spacing: グリッド間隔 (秒)
        burn_in: 捨てる初期点数

    Returns:
        FalsePositiveEstimate
    """
    if not threshold > 0:
        raise InputDataError(f"threshold は正である必要があります: {threshold}")
    _check_rho(rho)
    if min_separation_steps is None:
        min_separation_steps = int(math.ceil(MIN_EVENT_SEPARATION / grid_spacing))

    times = np.arange(m, dtype=float)
    sizes = _block_layout(n_sims, m + burn_in)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    counts = []
    for rows, seed_seq in zip(sizes, seeds):
        paths = np.abs(_simulate_block(rho, rows, m, burn_in, seed_seq))
        block_counts = np.zeros(rows)
        for r in np.flatnonzero(paths.max(axis=1) > threshold):
            block_counts[r] = len(select_peaks(paths[r], times, threshold,
                                               float(min_separation_steps)))
        counts.append(block_counts)
    counts = np.concatenate(counts)

    return FalsePositiveEstimate(
        mean=float(counts.mean()),
        std_error=float(counts.std(ddof=1) / math.sqrt(counts.size)) if counts.size > 1 else 0.0,
        share_with_event=float(np.mean(counts > 0)),
        n_sims=int(counts.size),
    )
