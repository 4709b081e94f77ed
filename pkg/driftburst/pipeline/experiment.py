#!/usr/bin/env python3
"""
サイズ/検出力の実験

(α, β, h) の各セルについて, シミュレーションした日ごとに最大統計量 T_m* を求め,
当てはめた AR(1) の ρ̂ に対応するシミュレーション臨界値を超えた割合を集計します。

全セルで同じ複製番号には同じシードを使います (共通乱数)。
α=None はドリフトバーストなし, β=None はボラティリティバーストなしのセルです。
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import product
from pathlib import Path
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config import (
    AR1_RHO_CLAMP,
    CRIT_SEED,
    CSV_FLOAT_FORMAT,
    EXPERIMENT_BURN_IN,
    EXPERIMENT_CRIT_SIMS,
    EXPERIMENT_DRIFT_BANDWIDTHS,
    EXPERIMENT_DRIFT_SCALE,
    EXPERIMENT_EVALUATION_STEP,
    EXPERIMENT_LEVELS,
    EXPERIMENT_MIN_REPLICATIONS,
    EXPERIMENT_RHO_AXIS,
    EXPERIMENT_VOL_SCALE,
    VARIANCE_BANDWIDTH_RATIO,
)
from driftburst.detection.critval import CriticalValueTable, build_table, critical_value, fit_ar1
from driftburst.detection.detector import DetectorConfig, max_stat, tstat_grid
from driftburst.errors import ConfigError, DriftBurstError
from driftburst.simulation.bursts import BurstParams
from driftburst.simulation.scenario import ScenarioSpec, simulate_scenario

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExperimentCell:
    """実験表の1セル"""
    alpha: Optional[float]
    beta: Optional[float]
    drift_bandwidth: float

    @property
    def design(self) -> Tuple[Optional[float], Optional[float]]:
        return self.alpha, self.beta

    def burst_params(self, base: Optional[BurstParams] = None) -> Optional[BurstParams]:
        """セルのバースト設定 (バーストなしなら None)"""
        if self.alpha is None and self.beta is None:
            return None
        base = base or BurstParams(a=EXPERIMENT_DRIFT_SCALE, b=EXPERIMENT_VOL_SCALE)
        return replace(
            base,
            a=base.a if self.alpha is not None else 0.0,
            alpha=self.alpha if self.alpha is not None else base.alpha,
            b=base.b if self.beta is not None else 0.0,
            beta=self.beta if self.beta is not None else base.beta,
        )


def default_cells(alphas: Sequence[Optional[float]] = (None, 0.55, 0.65, 0.75),
                  betas: Sequence[Optional[float]] = (None, 0.1, 0.2, 0.3, 0.4),
                  bandwidths: Sequence[float] = EXPERIMENT_DRIFT_BANDWIDTHS) -> List[ExperimentCell]:
    """α × β × h の全組み合わせ"""
    return [ExperimentCell(a, b, float(h)) for a, b, h in product(alphas, betas, bandwidths)]


def cell_detector(cell: ExperimentCell, spec: ScenarioSpec,
                  template: Optional[DetectorConfig] = None,
                  evaluation_step: int = EXPERIMENT_EVALUATION_STEP,
                  burn_in: float = EXPERIMENT_BURN_IN) -> DetectorConfig:
    """evaluation_step 観測ごとに評価するセル用の検出器設定"""
    spacing = evaluation_step * spec.session_seconds / spec.n
    return replace(
        template or DetectorConfig(),
        drift_bandwidth=cell.drift_bandwidth,
        variance_bandwidth=VARIANCE_BANDWIDTH_RATIO * cell.drift_bandwidth,
        grid_spacing=spacing,
        burn_in=burn_in,
        revision_lookback=spacing,
    )


def _replicate(job: Tuple[ScenarioSpec, List[ExperimentCell], List[DetectorConfig], int]) -> List[Tuple[int, float, float]]:
    """1複製: 全セルについて (m, T*, ρ̂)"""
    spec, cells, detectors, seed = job
    results = []
    days = {}
    for cell, detector in zip(cells, detectors):
        if cell.design not in days:
            day_spec = replace(spec, bursts=cell.burst_params(spec.bursts))
            days[cell.design] = simulate_scenario(day_spec, seed=seed).to_series()
        ts = tstat_grid(days[cell.design], detector)
        try:
            stat = max_stat(ts)
            rho = fit_ar1(ts).rho_hat
        except DriftBurstError as e:
            logger.warning("⚠️ seed=%d: 統計量を計算できません: %s", seed, e)
            results.append((0, float("nan"), float("nan")))
            continue
        results.append((stat.m, stat.T_star, rho))
    return results


def replication_seeds(seed: int, replications: int) -> List[int]:
    """マスターシードから各複製のシードを派生させる"""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(replications)]


def run_experiment(base: ScenarioSpec, cells: Sequence[ExperimentCell], replications: int,
                   seed: int, levels: Sequence[float] = EXPERIMENT_LEVELS,
                   table: Optional[CriticalValueTable] = None,
                   detector: Optional[DetectorConfig] = None,
                   evaluation_step: int = EXPERIMENT_EVALUATION_STEP,
                   burn_in: float = EXPERIMENT_BURN_IN,
                   crit_sims: int = EXPERIMENT_CRIT_SIMS,
                   n_jobs: int = 1,
                   min_replications: int = EXPERIMENT_MIN_REPLICATIONS) -> pd.DataFrame:
    """
    サイズ/検出力の表を作る

    Args:
        base: 基本シナリオ (バースト以外の設定と, a, b の基準値)
        cells: 実験セル
        replications: 複製数
        seed: マスターシード
        levels: 信頼水準
        table: 臨界値テーブル (省略時は観測した m で生成)
        detector: 検出器設定の雛形
        evaluation_step: 評価間隔 (観測数)
        burn_in: 除外期間 (秒)
        crit_sims: テーブル生成時の複製数
        n_jobs: プロセス数
        min_replications: 必要な最小複製数

    Returns:
        セル × 水準ごとの棄却率 (列: alpha, beta, drift_bandwidth, level,
        rejection_rate, replications, m, mean_T_star, mean_rho_hat)
    """
    if replications < min_replications:
        raise ConfigError(f"replications は {min_replications} 以上である必要があります: {replications}",
                          key="replications")
    if not cells:
        raise ConfigError("実験セルがありません", key="cells")
    cells = list(cells)
    detectors = [cell_detector(c, base, detector, evaluation_step, burn_in) for c in cells]
    jobs = [(base, cells, detectors, s) for s in replication_seeds(seed, replications)]

    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            outcomes = list(pool.map(_replicate, jobs))
    else:
        outcomes = []
        for k, job in enumerate(jobs, start=1):
            outcomes.append(_replicate(job))
            if k % 50 == 0:
                logger.info("実験: %d/%d 複製", k, replications)

    # (replication, cell, [m, T*, rho])
    values = np.array(outcomes, dtype=float)
    ms = values[:, :, 0].astype(int)
    if table is None:
        m_axis = sorted({int(m) for m in np.unique(ms) if m >= 2})
        if not m_axis:
            raise ConfigError("有効な最大統計量がありません", key="cells")
        table = build_table(m_axis=m_axis, rho_axis=EXPERIMENT_RHO_AXIS, levels=levels,
                            n_sims=crit_sims, seed=CRIT_SEED, n_jobs=1)

    rows = []
    for j, cell in enumerate(cells):
        m_col, t_col, rho_col = ms[:, j], values[:, j, 1], values[:, j, 2]
        valid = m_col >= 2
        for level in levels:
            rejected = [
                t > critical_value(table, int(m), min(max(rho, 0.0), AR1_RHO_CLAMP), level)
                for m, t, rho in zip(m_col[valid], t_col[valid], rho_col[valid])
            ]
            rows.append({
                "alpha": cell.alpha,
                "beta": cell.beta,
                "drift_bandwidth": cell.drift_bandwidth,
                "level": float(level),
                "rejection_rate": float(np.mean(rejected)) if rejected else float("nan"),
                "replications": int(valid.sum()),
                "m": int(np.median(m_col[valid])) if valid.any() else 0,
                "mean_T_star": float(np.nanmean(t_col)) if valid.any() else float("nan"),
                "mean_rho_hat": float(np.nanmean(rho_col)) if valid.any() else float("nan"),
            })
    return pd.DataFrame(rows)


def write_experiment(frame: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    return path


def _design_label(alpha: Any, beta: Any) -> str:
    def show(value):
        return "-" if value is None or pd.isna(value) else f"{value:g}"
    return f"alpha={show(alpha)}, beta={show(beta)}"


def rejection_table(frame: pd.DataFrame, level: float = 0.95) -> pd.DataFrame:
    """1つの水準について, 行 (α, β)・列 h の棄却率 (%) の表"""
    subset = frame[np.isclose(frame["level"], level)].copy()
    subset["design"] = [_design_label(a, b) for a, b in zip(subset["alpha"], subset["beta"])]
    table = subset.pivot_table(index="design", columns="drift_bandwidth",
                               values="rejection_rate", sort=False)
    return (table * 100.0).round(1)
