#!/usr/bin/env python3
"""
Parametric package

爆発時刻直前の局所パラメトリックモデル (ドリフト ∝ (T-t)^{-α},
ボラティリティ ∝ (T-t)^{-β}) の最尤推定と尤度比検定をまとめたパッケージです。

Modules:
    - mle: 対数尤度, マルチスタート最尤推定, 尤度比検定, 窓のシミュレーション
"""

__all__ = []
