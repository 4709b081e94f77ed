#!/usr/bin/env python3
"""
Simulation package

検出器のサイズ・検出力を検証するためのデータ生成過程をまとめたパッケージです。

Modules:
    - heston: Heston 確率的ボラティリティ (Euler, full truncation)
    - bursts: ドリフトバースト・ボラティリティバーストの注入
    - jumps: 焼き戻し安定ジャンプ (υ = 0.5, 受容棄却法)
    - noise: 不均一分散のマイクロストラクチャーノイズ, 事前告知ジャンプ
    - scenario: シナリオ設定 (YAML) と1日分のシミュレーション
"""

__all__ = []
