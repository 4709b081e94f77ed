#!/usr/bin/env python3
"""
Estimation package

ドリフトバースト t 統計量を構成する推定量をまとめたパッケージです。

Modules:
    - kernel: カーネル関数, Parzen ラグ窓, カーネル定数
    - preavg: 事前平均化 (マイクロストラクチャーノイズの減衰)
    - estimator: スポットドリフト, HAC 長期分散, 自動ラグ選択
"""

__all__ = []
