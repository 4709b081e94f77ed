#!/usr/bin/env python3
"""
シナリオ

Heston + 焼き戻し安定ジャンプ + バースト + ノイズを組み合わせた1日分の
シミュレーションと, その宣言的な設定 (YAML) を扱います。

YAML の例 (data/scenarios/flash_crash.yaml):

    n: 23400
    seed: 7
    heston: {kappa: 5.0, theta: 0.0225, xi: 0.4, rho: -0.7071067811865476}
    bursts: {a: 3.0, alpha: 0.75, b: 0.15, beta: 0.2}
    jumps: {lam: 3.0, upsilon: 0.5}
    jump_share: 0.2
    noise: {gamma: 0.5}
"""

import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from config import BASE_PRICE, DAY_FRACTION_OF_YEAR, N_OBSERVATIONS, SESSION_SECONDS, TICK_COLUMNS
from driftburst.detection.series import TickSeries
from driftburst.errors import ConfigError
from driftburst.simulation.bursts import BurstParams, inject_bursts
from driftburst.simulation.heston import HestonParams, feller_condition, simulate_heston
from driftburst.simulation.jumps import JumpParams, calibrate_jump_intensity, simulate_tempered_stable
from driftburst.simulation.noise import NoiseParams, add_noise, daily_sigma
from driftburst.utils.data_loader import load_yaml_file

logger = logging.getLogger(__name__)


def _build(cls, data: Any, section: str):
    if data is None:
        return None
    if isinstance(data, cls):
        return data
    if not isinstance(data, dict):
        raise ConfigError(f"{section} は辞書である必要があります", key=section)
    allowed = set(cls.__dataclass_fields__)
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"Unknown {section} key: {unknown[0]}", key=f"{section}.{unknown[0]}")
    return cls(**data)


@dataclass(frozen=True)
class ScenarioSpec:
    """
    1日分のシミュレーション設定

    jump_share を指定すると jumps.psi はその二次変動シェアから較正されます。
    """
    heston: HestonParams = field(default_factory=HestonParams)
    bursts: Optional[BurstParams] = None
    jumps: Optional[JumpParams] = None
    jump_share: Optional[float] = None
    noise: NoiseParams = field(default_factory=lambda: NoiseParams(gamma=0.0))
    n: int = N_OBSERVATIONS
    session_seconds: float = SESSION_SECONDS
    day_fraction_of_year: float = DAY_FRACTION_OF_YEAR
    base_price: float = BASE_PRICE
    start_ms: int = 0
    v0: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError(f"n は2以上である必要があります: {self.n}", key="n")
        if not self.session_seconds > 0:
            raise ConfigError("session_seconds は正である必要があります", key="session_seconds")
        if self.jump_share is not None and self.jumps is None:
            object.__setattr__(self, "jumps", JumpParams(psi=0.0))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ScenarioSpec":
        """
        辞書 (YAML) からシナリオを作る

        Raises:
            ConfigError: 未知のキーがある場合
        """
        data = dict(data)
        allowed = set(cls.__dataclass_fields__)
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ConfigError(f"Unknown scenario key: {unknown[0]}", key=unknown[0])

        jumps = data.pop("jumps", None)
        if isinstance(jumps, dict) and "psi" not in jumps:
            jumps = {**jumps, "psi": 0.0}
        try:
            return cls(
                heston=_build(HestonParams, data.pop("heston", {}), "heston"),
                bursts=_build(BurstParams, data.pop("bursts", None), "bursts"),
                jumps=_build(JumpParams, jumps, "jumps"),
                noise=_build(NoiseParams, data.pop("noise", {"gamma": 0.0}), "noise"),
                **data,
            )
        except TypeError as e:
            raise ConfigError(f"シナリオ設定が不正です: {e}") from e

    @classmethod
    def from_yaml(cls, path: Path) -> "ScenarioSpec":
        return cls.from_dict(load_yaml_file(Path(path)))

    def resolved_jumps(self) -> Optional[JumpParams]:
        """jump_share が指定されていれば ψ を較正したジャンプパラメータ"""
        if self.jumps is None:
            return None
        if self.jump_share is None:
            return self.jumps
        psi = calibrate_jump_intensity(self.jump_share, self.heston, self.jumps.lam,
                                       self.jumps.upsilon, self.day_fraction_of_year)
        return replace(self.jumps, psi=psi)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "heston": self.heston.to_dict(),
            "bursts": self.bursts.to_dict() if self.bursts else None,
            "jumps": self.jumps.to_dict() if self.jumps else None,
            "jump_share": self.jump_share,
            "noise": {"gamma": self.noise.gamma},
            "n": self.n,
            "session_seconds": self.session_seconds,
            "day_fraction_of_year": self.day_fraction_of_year,
            "base_price": self.base_price,
            "start_ms": self.start_ms,
            "v0": self.v0,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class SimulatedDay:
    """
    1日分のシミュレーション結果

    Attributes:
        ts_ms: 観測時刻 (エポックミリ秒, 長さ n + 1)
        clean_levels: 効率的価格の対数
        levels: ノイズを加えた観測価格の対数
        variance: Heston 分散パス
        jump_increments: ジャンプ成分の増分 (長さ n)
    """
    ts_ms: np.ndarray
    clean_levels: np.ndarray
    levels: np.ndarray
    variance: np.ndarray
    jump_increments: np.ndarray
    spec: ScenarioSpec

    @property
    def times(self) -> np.ndarray:
        return self.ts_ms / 1000.0

    def to_series(self) -> TickSeries:
        return TickSeries(self.times, self.levels, label=f"seed={self.spec.seed}")

    def to_tick_frame(self) -> pd.DataFrame:
        """ティックCSVスキーマ (bid = ask = 観測価格, 約定なし)"""
        prices = np.exp(self.levels)
        frame = pd.DataFrame({
            "ts_ms": self.ts_ms.astype(np.int64),
            "bid": prices,
            "ask": prices,
            "trade_px": np.full(prices.size, np.nan),
            "trade_sz": np.full(prices.size, np.nan),
        })
        return frame[TICK_COLUMNS]


def simulate_scenario(spec: ScenarioSpec, seed: Optional[int] = None) -> SimulatedDay:
    """
    シナリオに従って1日分をシミュレーションする

    各構成要素の乱数はシードから SeedSequence.spawn で派生させます。

    Args:
        spec: シナリオ設定
        seed: spec.seed を上書きするシード

    Returns:
        SimulatedDay
    """
    seed = spec.seed if seed is None else seed
    spec = replace(spec, seed=int(seed))
    heston_seed, jump_seed, burst_seed, noise_seed = np.random.SeedSequence(seed).spawn(4)
    dfy = spec.day_fraction_of_year

    path = simulate_heston(spec.heston, spec.n, dfy, heston_seed, v0=spec.v0)
    increments = path.increments

    jumps = np.zeros(spec.n)
    jp = spec.resolved_jumps()
    if jp is not None:
        jumps = simulate_tempered_stable(jp, spec.n, dfy, jump_seed)
        increments = increments + jumps

    if spec.bursts is not None:
        increments = inject_bursts(increments, path.variance, spec.bursts, dfy, burst_seed,
                                   theta=spec.heston.theta, price_shocks=path.price_shocks)

    clean = math.log(spec.base_price) + np.concatenate([[0.0], np.cumsum(increments)])
    noisy = add_noise(clean, daily_sigma(path.variance, dfy), spec.noise, noise_seed)

    steps = np.arange(spec.n + 1, dtype=np.float64) * (spec.session_seconds * 1000.0 / spec.n)
    ts_ms = spec.start_ms + np.round(steps).astype(np.int64)
    return SimulatedDay(ts_ms, clean, noisy, path.variance, jumps, spec)


def describe_scenario(spec: ScenarioSpec) -> Dict[str, Any]:
    """シナリオの診断情報 (Feller 条件, 較正済み ψ)"""
    jp = spec.resolved_jumps()
    return {
        "feller": feller_condition(spec.heston),
        "psi": jp.psi if jp else 0.0,
        "annualized_vol": math.sqrt(spec.heston.theta),
    }
