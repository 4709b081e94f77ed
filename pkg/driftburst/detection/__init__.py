#!/usr/bin/env python3
"""
Detection package

t 統計量の計算から検定・イベント抽出までをまとめたパッケージです。

Modules:
    - series: 入力ティック系列 TickSeries
    - detector: t 統計量グリッド, 最大統計量, バーストイベント抽出
    - critval: AR(1) 近似によるシミュレーション臨界値
"""

__all__ = []
