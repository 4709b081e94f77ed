#!/usr/bin/env python3
"""
二重ソート

バーストの符号ごとに, R⁻ と V⁻ をそれぞれ四分位で low (第1四分位以下),
medium (四分位範囲), high (第4四分位) に分け, 各セルの平均 R⁺ を求めます。
"""

import logging
from typing import Dict, Sequence

import numpy as np
import pandas as pd

from config import MIN_DOUBLE_SORT_OBS
from driftburst.analysis.returns import EventReturns
from driftburst.errors import InputDataError

logger = logging.getLogger(__name__)

BUCKETS = ["low", "medium", "high"]


def quartile_buckets(values: np.ndarray) -> np.ndarray:
    """low: <= Q1, high: > Q3, それ以外 medium"""
    values = np.asarray(values, dtype=float)
    q1, q3 = np.quantile(values, [0.25, 0.75])
    return np.where(values <= q1, "low", np.where(values > q3, "high", "medium"))


def double_sort(samples: Sequence[EventReturns]) -> Dict[str, pd.DataFrame]:
    """
    R⁻ × V⁻ の条件付き平均 R⁺

    Args:
        samples: V⁻ を持つイベント (30 以上)

    Returns:
        {'negative': 表, 'positive': 表}。各表は行 R⁻ バケット, 列 V⁻ バケットと
        'high-low' (high 列 - low 列)。空のセルは NaN
        四分位バケットが空になる場合 (R⁻ や V⁻ が同値ばかりなど) は警告を出します

    Raises:
        InputDataError: サンプルが少ない, または V⁻ が欠けている場合
    """
    if len(samples) < MIN_DOUBLE_SORT_OBS:
        raise InputDataError(f"二重ソートには {MIN_DOUBLE_SORT_OBS} 個以上のイベントが必要です (入力: {len(samples)})")
    if any(s.V_minus is None for s in samples):
        raise InputDataError("二重ソートには全イベントの V⁻ が必要です")

    frame = pd.DataFrame({
        "sign": [s.sign for s in samples],
        "R_minus": [s.R_minus for s in samples],
        "R_plus": [s.R_plus for s in samples],
        "V_minus": [s.V_minus for s in samples],
    })

    tables = {}
    for label, sign in (("negative", -1), ("positive", 1)):
        subset = frame[frame["sign"] == sign]
        table = pd.DataFrame(np.nan, index=pd.Index(BUCKETS, name="R_minus"),
                             columns=pd.Index(BUCKETS, name="V_minus"))
        if len(subset):
            r_bucket = quartile_buckets(subset["R_minus"].to_numpy())
            v_bucket = quartile_buckets(subset["V_minus"].to_numpy())
            for name, bucket in (("R⁻", r_bucket), ("V⁻", v_bucket)):
                missing = sorted(set(BUCKETS) - set(bucket))
                if missing:
                    logger.warning("⚠️ %s: %s の四分位バケット %s が空です (該当セルは NaN になります)",
                                   label, name, missing)
            means = subset.groupby([r_bucket, v_bucket])["R_plus"].mean()
            for (r, v), value in means.items():
                table.loc[r, v] = value
        table["high-low"] = table["high"] - table["low"]
        tables[label] = table
    return tables
