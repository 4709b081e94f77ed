#!/usr/bin/env python3
"""
例外クラス

ドリフトバースト検出ツールキット全体で使用する例外階層を定義します。
CLI は例外の種類から終了コードを決定します (入力系: 1, 数値計算系: 2)。
"""

from typing import List, Optional, Sequence


class DriftBurstError(Exception):
    """ツールキットの基底エラークラス"""
    pass


class InputDataError(DriftBurstError):
    """入力データ (ティック, 系列, 引数配列) の不備"""
    pass


class TickSchemaError(InputDataError):
    """ティックCSVのヘッダーが宣言スキーマと一致しない"""
    def __init__(self, message: str, columns: Optional[Sequence[str]] = None):
        super().__init__(message)
        self.columns = list(columns) if columns is not None else []


class MalformedDataError(InputDataError):
    """不正行が許容割合を超えた"""
    def __init__(self, message: str, bad_rows: int = 0, total_rows: int = 0):
        super().__init__(message)
        self.bad_rows = bad_rows
        self.total_rows = total_rows


class ConfigError(DriftBurstError):
    """設定ファイル・設定値の不備"""
    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(message)
        self.key = key


class DomainError(DriftBurstError, ValueError):
    """引数が数学的な定義域の外にある"""
    pass


class EmptyWindowError(DriftBurstError):
    """カーネル窓内に観測がない"""
    pass


class ExtrapolationError(DriftBurstError):
    """臨界値テーブルの範囲外の参照"""
    pass


class TableVersionError(DriftBurstError):
    """臨界値テーブルの生成バージョンが一致しない"""
    def __init__(self, message: str, found: Optional[str] = None, expected: Optional[str] = None):
        super().__init__(message)
        self.found = found
        self.expected = expected


class NumericalError(DriftBurstError):
    """数値計算の失敗"""
    pass


class FitError(NumericalError):
    """最尤推定が全ての初期値で収束しなかった"""
    def __init__(self, message: str, diagnostics: Optional[List[str]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class OptimizationError(NumericalError):
    """入れ子モデルの対数尤度の順序が崩れている"""
    pass


class CollinearityError(NumericalError):
    """計画行列の条件数が上限を超えた"""
    def __init__(self, message: str, condition_number: float = float("nan")):
        super().__init__(message)
        self.condition_number = condition_number


class SingularDesignError(NumericalError):
    """計画行列が特異"""
    pass
