#!/usr/bin/env python3
"""
ドリフトバースト検出ツールキット

高頻度価格系列における短時間の爆発的トレンド (ドリフトバースト) を
検出・特徴付けするためのパッケージです。

Packages:
    - estimation: カーネル, 事前平均化, スポットドリフト/長期分散推定
    - detection: t統計量グリッド, 最大統計量, イベント抽出, 臨界値
    - simulation: Heston + バースト + ジャンプ + ノイズのシミュレーター
    - parametric: 局所パラメトリックモデルの最尤推定と尤度比検定
    - analysis: 事前/事後リターン, 回帰分析, 出来高正規化, 二重ソート
    - pipeline: ティック読み込み, 実行設定, 検出ランナー, サイズ/検出力実験
    - utils: JSON/YAML ファイル入出力
    - cli: コマンドラインインターフェース
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
