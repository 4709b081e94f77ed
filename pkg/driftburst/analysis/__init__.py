#!/usr/bin/env python3
"""
Analysis package

検出後のイベント分析をまとめたパッケージです。

Modules:
    - returns: 事前/事後リターン, イベント分類, 月次イベント数
    - regression: OLS + Newey-West 標準誤差, 反転回帰, 出来高交差項回帰
    - volume: 時間帯別の出来高プロファイルによる出来高正規化
    - sorting: 事前リターン × 出来高の二重ソート
"""

__all__ = []
