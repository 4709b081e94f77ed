"""共通フィクスチャ"""

import numpy as np
import pandas as pd
import pytest

from driftburst.detection.detector import DetectorConfig
from driftburst.detection.series import TickSeries
from driftburst.simulation.bursts import BurstParams
from driftburst.simulation.heston import HestonParams
from driftburst.simulation.jumps import JumpParams
from driftburst.simulation.noise import NoiseParams
from driftburst.simulation.scenario import ScenarioSpec


def brownian_series(n=23_400, dt=1.0, sigma=1e-4, drift=0.0, noise=0.0, seed=0, t0=0.0):
    """一定ボラティリティのブラウン運動 (任意でノイズとドリフト)"""
    rng = np.random.default_rng(seed)
    times = t0 + dt * np.arange(n + 1, dtype=float)
    increments = drift * dt + sigma * np.sqrt(dt) * rng.standard_normal(n)
    levels = np.log(100.0) + np.concatenate([[0.0], np.cumsum(increments)])
    if noise:
        levels = levels + noise * rng.standard_normal(n + 1)
    return TickSeries(times, levels, label=f"bm-{seed}")


@pytest.fixture
def null_series():
    return brownian_series(seed=1)


@pytest.fixture
def fast_detector():
    """60秒グリッドの検出器設定 (テスト用)"""
    return DetectorConfig(drift_bandwidth=300.0, grid_spacing=60.0)


@pytest.fixture
def small_spec():
    """10秒ティック1日分の小さなシナリオ"""
    return ScenarioSpec(
        heston=HestonParams(),
        jumps=JumpParams(psi=0.0),
        jump_share=0.2,
        noise=NoiseParams(gamma=0.5),
        n=2_340,
        seed=3,
    )


@pytest.fixture
def burst_spec(small_spec):
    return ScenarioSpec(
        heston=small_spec.heston,
        bursts=BurstParams(a=6.0, alpha=0.75, b=0.15, beta=0.2),
        noise=NoiseParams(gamma=0.5),
        n=23_400,
        seed=5,
    )


@pytest.fixture
def tick_frame():
    """気配と約定を含む小さなティック表"""
    return pd.DataFrame({
        "ts_ms": np.array([1_000, 2_000, 2_000, 3_000, 4_000], dtype=np.int64),
        "bid": [99.0, 100.0, np.nan, 100.0, 101.0],
        "ask": [101.0, 102.0, np.nan, 102.0, 103.0],
        "trade_px": [np.nan, np.nan, 101.0, np.nan, 102.5],
        "trade_sz": [np.nan, np.nan, 3.0, np.nan, 1.0],
    })
