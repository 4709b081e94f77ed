#!/usr/bin/env python3
"""
ティックデータの読み込み

ティックCSVスキーマ: ts_ms,bid,ask,trade_px,trade_sz
    - ts_ms: エポックミリ秒
    - bid, ask: 最良気配 (両方あるか両方空欄)
    - trade_px, trade_sz: 約定 (任意)
欠損は空欄。浮動小数点は17桁で書き出すため, 保存と読み込みでビット単位に一致します。
"""

import logging
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from config import CSV_FLOAT_FORMAT, DEFAULT_TIMEZONE, MAX_MALFORMED_SHARE, TICK_COLUMNS
from driftburst.detection.series import TickSeries
from driftburst.errors import InputDataError, MalformedDataError, TickSchemaError

logger = logging.getLogger(__name__)


def empty_tick_frame() -> pd.DataFrame:
    return pd.DataFrame({
        "ts_ms": pd.Series(dtype=np.int64),
        "bid": pd.Series(dtype=float),
        "ask": pd.Series(dtype=float),
        "trade_px": pd.Series(dtype=float),
        "trade_sz": pd.Series(dtype=float),
    })


def _parse_floats(values: pd.Series) -> Tuple[np.ndarray, np.ndarray]:
    """文字列列を float に変換する。(値, 解析不能フラグ)。空欄は NaN"""
    text = values.str.strip()
    blank = (text == "").to_numpy()
    try:
        parsed = text.where(~blank, "nan").to_numpy().astype(float)
        return parsed, np.zeros(len(text), dtype=bool)
    except ValueError:
        pass

    parsed = np.full(len(text), np.nan)
    bad = np.zeros(len(text), dtype=bool)
    for i, item in enumerate(text.to_numpy()):
        if blank[i]:
            continue
        try:
            parsed[i] = float(item)
        except ValueError:
            bad[i] = True
    return parsed, bad


def load_ticks(path: Path, max_malformed_share: float = MAX_MALFORMED_SHARE) -> pd.DataFrame:
    """
    ティックCSVを読み込む

    Args:
        path: CSV ファイルのパス
        max_malformed_share: 許容する不正行の割合

    Returns:
        ts_ms で安定ソートされたティック表 (同時刻の行はファイル順を保持)

    Raises:
        FileNotFoundError: ファイルが存在しない場合
        TickSchemaError: ヘッダーがスキーマと一致しない場合
        MalformedDataError: 不正行の割合が上限を超えた場合
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"ティックファイルが見つかりません: {path}")
    if path.stat().st_size == 0:
        logger.warning("⚠️ 空のティックファイルです: %s", path)
        return empty_tick_frame()

    try:
        raw = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        logger.warning("⚠️ 空のティックファイルです: %s", path)
        return empty_tick_frame()
    except pd.errors.ParserError as e:
        raise InputDataError(f"ティックファイルを解析できません: {path}: {e}") from e

    columns = [c.strip() for c in raw.columns]
    if columns != TICK_COLUMNS:
        raise TickSchemaError(
            f"ヘッダーがスキーマと一致しません: {columns} (期待値: {TICK_COLUMNS})", columns=columns
        )
    raw.columns = columns
    total = len(raw)
    if total == 0:
        logger.warning("⚠️ ティックファイルにデータ行がありません: %s", path)
        return empty_tick_frame()

    parsed = {}
    bad = np.zeros(total, dtype=bool)
    for column in TICK_COLUMNS:
        parsed[column], column_bad = _parse_floats(raw[column])
        bad |= column_bad

    ts, bid, ask = parsed["ts_ms"], parsed["bid"], parsed["ask"]
    px, sz = parsed["trade_px"], parsed["trade_sz"]
    has_quote = np.isfinite(bid) & np.isfinite(ask)
    has_trade = np.isfinite(px)
    with np.errstate(invalid="ignore"):
        bad |= ~np.isfinite(ts) | (ts != np.round(ts))
        bad |= np.isfinite(bid) != np.isfinite(ask)
        bad |= has_quote & ((bid <= 0) | (ask <= 0) | (ask < bid))
        bad |= has_trade & (px <= 0)
        bad |= np.isfinite(sz) & (sz < 0)
        bad |= np.isfinite(sz) != has_trade
        bad |= ~(has_quote | has_trade)

    n_bad = int(bad.sum())
    if n_bad:
        share = n_bad / total
        if share > max_malformed_share:
            raise MalformedDataError(
                f"不正行が多すぎます: {n_bad}/{total} 行 ({share:.3%})", bad_rows=n_bad, total_rows=total
            )
        logger.warning("⚠️ 不正行 %d/%d 行を除外しました: %s", n_bad, total, path)

    keep = ~bad
    frame = pd.DataFrame({
        "ts_ms": ts[keep].astype(np.int64),
        "bid": bid[keep],
        "ask": ask[keep],
        "trade_px": px[keep],
        "trade_sz": sz[keep],
    })
    frame = frame.sort_values("ts_ms", kind="stable").reset_index(drop=True)
    logger.info("ティック %d 行を読み込みました: %s", len(frame), path)
    return frame


def save_ticks(frame: pd.DataFrame, path: Path) -> Path:
    """ティック表をスキーマ通りに17桁で書き出す"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    out = frame[TICK_COLUMNS].copy()
    out["ts_ms"] = out["ts_ms"].astype(np.int64)
    out.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, na_rep="")
    return path


def build_midquote(frame: pd.DataFrame, label: str = "") -> TickSeries:
    """
    仲値 (bid + ask) / 2 の対数系列を作る

    同じ時刻に複数の気配がある場合は最後の気配を使い,
    続けて同じ仲値が現れた場合は最初の観測だけを残します。

    Raises:
        InputDataError: 気配が1つもない場合
    """
    quotes = frame.dropna(subset=["bid", "ask"])
    if quotes.empty:
        raise InputDataError("気配データがありません")

    quotes = quotes.drop_duplicates(subset="ts_ms", keep="last")
    mid = (quotes["bid"].to_numpy(dtype=float) + quotes["ask"].to_numpy(dtype=float)) / 2.0
    ts = quotes["ts_ms"].to_numpy(dtype=np.int64)

    changed = np.ones(mid.size, dtype=bool)
    changed[1:] = mid[1:] != mid[:-1]
    logger.debug("仲値の更新: %d/%d", int(changed.sum()), mid.size)
    return TickSeries(ts[changed] / 1000.0, np.log(mid[changed]), label=label)


def sample_on_grid(series: TickSeries, spacing: float, start: float,
                   end: float) -> TickSeries:
    """
    [start, end] を spacing 秒刻みにした各時刻の直前観測値 (LOCF)

    Raises:
        InputDataError: start より前に観測がない場合
    """
    if not spacing > 0:
        raise InputDataError(f"spacing は正である必要があります: {spacing}")
    if start < series.times[0]:
        raise InputDataError(f"開始時刻 {start} より前に観測がありません (最初の観測: {series.times[0]})")
    count = int(np.floor((end - start) / spacing + 1e-9))
    grid = start + spacing * np.arange(count + 1, dtype=float)
    idx = np.searchsorted(series.times, grid, side="right") - 1
    return TickSeries(grid, series.levels[idx], label=series.label)


def split_sessions(frame: pd.DataFrame, session_start: Optional[str] = None,
                   session_end: Optional[str] = None,
                   timezone: str = DEFAULT_TIMEZONE) -> List[Tuple[str, pd.DataFrame]]:
    """
    ティック表を取引所現地時刻の日ごとに分割し, セッション時間帯で絞り込む

    Args:
        frame: ティック表
        session_start, session_end: 'HH:MM' (現地時刻, [start, end))。省略時は終日
        timezone: IANA タイムゾーン名 (例: 'America/Chicago')

    Returns:
        (日付 'YYYY-MM-DD', その日のティック表) のリスト (日付順)
    """
    if frame.empty:
        return []
    try:
        local = pd.to_datetime(frame["ts_ms"].to_numpy(), unit="ms", utc=True).tz_convert(timezone)
    except Exception as e:
        raise InputDataError(f"タイムゾーンを解釈できません: {timezone}: {e}") from e

    clock = local.hour * 3600 + local.minute * 60 + local.second + local.microsecond / 1e6
    mask = np.ones(len(frame), dtype=bool)
    if session_start:
        mask &= np.asarray(clock >= _clock_seconds(session_start))
    if session_end:
        mask &= np.asarray(clock < _clock_seconds(session_end))

    dates = np.asarray(local.strftime("%Y-%m-%d"))
    selected = frame.loc[mask].copy()
    selected["_date"] = dates[mask]
    return [(str(date), day.drop(columns="_date").reset_index(drop=True))
            for date, day in selected.groupby("_date", sort=True)]


def _clock_seconds(text: str) -> float:
    try:
        parts = [int(p) for p in text.split(":")]
    except ValueError as e:
        raise InputDataError(f"時刻の形式が不正です (HH:MM): {text}") from e
    while len(parts) < 3:
        parts.append(0)
    hours, minutes, seconds = parts[:3]
    return hours * 3600.0 + minutes * 60.0 + seconds
