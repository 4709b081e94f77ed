#!/usr/bin/env python3
"""
Pipeline package

ティックデータの読み込みから検出レポート, サイズ/検出力実験までの
実行フローをまとめたパッケージです。

Modules:
    - ingest: ティックCSVの読み書き, 仲値系列の構築, セッション分割, グリッドサンプリング
    - run_config: 実行設定 (YAML) の読み込み
    - runner: 日次の検出, 閾値決定, レポート出力, イベント窓の最尤推定
    - experiment: シミュレーションによるサイズ/検出力表
"""

__all__ = []
