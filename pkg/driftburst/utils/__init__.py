#!/usr/bin/env python3
"""
Utilities package

共通ユーティリティをまとめたパッケージです。

Modules:
    - data_loader: JSON/YAML データファイルの読み書き
"""

__all__ = []
