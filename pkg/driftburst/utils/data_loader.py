#!/usr/bin/env python3
"""
データローダー

JSON (臨界値テーブル, レポート) と YAML (シナリオ, 実行設定) の
読み書き機能を提供します。
"""

import json
from pathlib import Path
from typing import Any, Dict

import yaml

from driftburst.errors import ConfigError


def load_data_file(file_path: Path) -> Dict[str, Any]:
    """
    JSONデータファイルを読み込む

    Args:
        file_path: 読み込むJSONファイルのパス

    Returns:
        読み込んだJSONデータ（辞書形式）

    Raises:
        FileNotFoundError: ファイルが存在しない場合
        json.JSONDecodeError: JSON形式が不正な場合
    """
    file_path = Path(file_path)
    if not file_path.exists():
        raise FileNotFoundError(f"データファイルが見つかりません: {file_path}")

    with open(file_path, 'r', encoding='utf-8') as f:
        return json.load(f)


def save_data_file(data: Dict[str, Any], file_path: Path) -> Path:
    """
    辞書をJSONファイルに書き出す

    キー順を固定して書き出すため, 同じ入力からは同じバイト列が得られます。
    NaN は null として保存します。

    Args:
        data: 書き出すデータ
        file_path: 出力先パス (親ディレクトリは自動作成)

    Returns:
        書き出したファイルのパス
    """
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, 'w', encoding='utf-8') as f:
        json.dump(_nan_to_none(data), f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")
    return file_path


def load_yaml_file(file_path: Path) -> Dict[str, Any]:
    """
    YAML設定ファイルを読み込む

    Args:
        file_path: 読み込むYAMLファイルのパス

    Returns:
        読み込んだ設定（辞書形式, 空ファイルは空辞書）

    Raises:
        FileNotFoundError: ファイルが存在しない場合
        ConfigError: YAMLとして解釈できない, またはトップレベルが辞書でない場合
    """
    file_path = Path(file_path)
    if not file_path.exists():
        raise FileNotFoundError(f"設定ファイルが見つかりません: {file_path}")

    with open(file_path, 'r', encoding='utf-8') as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"YAMLの解析に失敗しました: {file_path}: {e}") from e

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"設定ファイルのトップレベルは辞書である必要があります: {file_path}")
    return data


def _nan_to_none(value: Any) -> Any:
    if isinstance(value, float) and value != value:
        return None
    if isinstance(value, dict):
        return {k: _nan_to_none(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_nan_to_none(v) for v in value]
    return value
