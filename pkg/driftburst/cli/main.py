#!/usr/bin/env python3
"""
ドリフトバースト検出 CLI

使用例:
    # シナリオからティックCSVを生成
    python -m driftburst simulate --scenario flash_crash --seed 7 --output output/day.csv

    # ティックCSVに検出器を適用 (固定閾値 4.5)
    python -m driftburst detect --data output/day.csv --output-dir output/run

    # シミュレーション臨界値 (95%) を閾値にする
    python -m driftburst detect --data output/day.csv --level 0.95 --table data/tables/critical_values.json

    # 臨界値テーブルの生成と参照
    python -m driftburst crit build --output data/tables/critical_values.json
    python -m driftburst crit query --m 4000 --rho 0.9 --level 0.95

    # サイズ/検出力の実験
    python -m driftburst experiment --scenario null_day --replications 1000 --alphas none --betas none

    # イベント直前1時間の局所パラメトリック推定
    python -m driftburst fit-db --data output/day.csv --events output/run/events.csv

    # 反転回帰・出来高回帰・二重ソート
    python -m driftburst events --data ticks.csv --config data/configs/chicago_session.yaml

終了コード: 0 成功, 1 入力/設定エラー, 2 数値計算の失敗
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

# Import centralized config - must be before driftburst imports
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

import pandas as pd

from config import (
    ANALYSIS_FILE_NAME,
    CRIT_LEVELS,
    CRIT_M_AXIS,
    CRIT_N_SIMS,
    CRIT_RHO_AXIS,
    CRIT_SEED,
    CSV_FLOAT_FORMAT,
    DEDUP_POLICIES,
    EXIT_INPUT_ERROR,
    EXIT_NUMERICAL_ERROR,
    EXIT_SUCCESS,
    EXPERIMENT_CRIT_SIMS,
    EXPERIMENT_DRIFT_BANDWIDTHS,
    EXPERIMENT_EVALUATION_STEP,
    EXPERIMENT_FILE_NAME,
    EXPERIMENT_LEVELS,
    FIT_SAMPLING_SECONDS,
    FIT_WINDOW_SECONDS,
    N_JOBS,
    RETURNS_FILE_NAME,
    get_output_path,
    get_scenario_path,
    get_table_path,
)
from driftburst import __version__
from driftburst.analysis.returns import returns_to_frame
from driftburst.detection.critval import build_table, critical_value, load_table, save_table
from driftburst.errors import DriftBurstError, InputDataError, NumericalError
from driftburst.pipeline.experiment import default_cells, rejection_table, run_experiment, write_experiment
from driftburst.pipeline.ingest import build_midquote, load_ticks, save_ticks
from driftburst.pipeline.run_config import RunConfig, load_run_config
from driftburst.pipeline.runner import (
    analyze_events,
    detect_frame,
    fit_event_window,
    load_threshold_table,
    write_report,
)
from driftburst.simulation.scenario import ScenarioSpec, describe_scenario, simulate_scenario
from driftburst.utils.data_loader import save_data_file

logger = logging.getLogger(__name__)


def _optional_float(text: str) -> Optional[float]:
    """'none' は None (バーストなし)"""
    if text.lower() in ("none", "-"):
        return None
    return float(text)


def _run_config(args: argparse.Namespace) -> RunConfig:
    """YAML と CLI フラグから実行設定を作る (CLI フラグが優先)"""
    overrides = {
        "threshold": args.threshold,
        "level": args.level,
        "table_path": args.table,
        "seed": args.seed,
        "output_dir": args.output_dir,
        "dedup": args.dedup,
        "min_separation": args.min_separation,
        "session_start": args.session_start,
        "session_end": args.session_end,
        "timezone": args.timezone,
        "n_jobs": args.n_jobs,
        "detector.drift_bandwidth": args.drift_bandwidth,
        "detector.variance_bandwidth": args.variance_bandwidth,
        "detector.grid_spacing": args.grid_spacing,
        "detector.preavg_window": args.preavg_window,
        "detector.mode": args.mode,
    }
    config = load_run_config(args.config, overrides)
    if config.level is not None and not config.table_path:
        default_table = get_table_path()
        if default_table.exists():
            config = config.with_overrides({"table_path": str(default_table)})
    return config


def _print_day(summary: dict) -> None:
    marker = "⚠️" if summary["n_events"] else "✓"
    print(f"{marker} {summary['day']}: m={summary['m']} T*={summary['T_star']:.3f} "
          f"p={summary['p_value']:.4f} rho={summary['rho_hat']:.3f} "
          f"閾値={summary['threshold']:.3f} イベント={summary['n_events']}")


def cmd_simulate(args: argparse.Namespace) -> None:
    """シナリオから1日分のティックCSVを生成"""
    spec = ScenarioSpec.from_yaml(get_scenario_path(args.scenario))
    if args.n is not None:
        spec = replace(spec, n=args.n)
    day = simulate_scenario(spec, seed=args.seed)
    output = Path(args.output) if args.output else get_output_path(f"{args.scenario}_{day.spec.seed}.csv")
    save_ticks(day.to_tick_frame(), output)

    info = describe_scenario(day.spec)
    if not info["feller"]["satisfied"]:
        print("⚠️ Feller 条件を満たしていません")
    print(f"✓ {len(day.ts_ms)} ティックを書き出しました: {output} (seed={day.spec.seed}, psi={info['psi']:.5f})")


def cmd_detect(args: argparse.Namespace) -> None:
    """ティックCSVに検出器を適用してレポートを書き出す"""
    config = _run_config(args)
    frame = load_ticks(Path(args.data))
    report = detect_frame(frame, config, load_threshold_table(config))
    paths = write_report(report, Path(config.output_dir))
    for day in report.days:
        _print_day(day.summary)
    print(f"✓ レポートを書き出しました: {paths['report']} (イベント {len(report.events)} 件)")


def cmd_crit(args: argparse.Namespace) -> None:
    """臨界値テーブルの生成 (build) と参照 (query)"""
    if args.crit_command == "build":
        table = build_table(m_axis=args.m, rho_axis=args.rho, levels=args.levels,
                            n_sims=args.n_sims, seed=args.seed, n_jobs=args.n_jobs)
        path = save_table(table, get_table_path(args.output))
        print(f"✓ 臨界値テーブルを保存しました: {path} "
              f"({len(table.m_axis)} x {len(table.rho_axis)} x {len(table.levels)}, n_sims={table.n_sims})")
    else:
        table = load_table(get_table_path(args.table))
        value = critical_value(table, args.m, args.rho, args.level, kind=args.kind)
        print(f"✓ m={args.m} rho={args.rho} level={args.level} ({args.kind}): {value:.6f}")


def cmd_experiment(args: argparse.Namespace) -> None:
    """サイズ/検出力の実験"""
    base = ScenarioSpec.from_yaml(get_scenario_path(args.scenario))
    cells = default_cells(args.alphas, args.betas, args.bandwidths)
    frame = run_experiment(base, cells, args.replications, args.seed, levels=args.levels,
                           evaluation_step=args.evaluation_step, crit_sims=args.crit_sims,
                           n_jobs=args.n_jobs)
    output = Path(args.output) if args.output else get_output_path(EXPERIMENT_FILE_NAME)
    write_experiment(frame, output)
    level = 0.95 if any(abs(p - 0.95) < 1e-12 for p in args.levels) else args.levels[0]
    print(f"棄却率 (%) level={level}")
    print(rejection_table(frame, level).to_string())
    print(f"✓ 実験結果を書き出しました: {output} ({len(cells)} セル x {args.replications} 複製)")


def cmd_fit_db(args: argparse.Namespace) -> None:
    """イベント直前の窓で最尤推定と尤度比検定"""
    series = build_midquote(load_ticks(Path(args.data)))
    peak_times = list(args.peak_time or [])
    if args.events:
        peak_times += pd.read_csv(args.events)["peak_time"].astype(float).tolist()
    if not peak_times:
        raise InputDataError("--peak-time か --events を指定してください")

    fits = []
    for peak in peak_times:
        fit = fit_event_window(series, peak, window=args.window, sampling=args.sampling)
        fits.append({"peak_time": peak, **fit.to_dict()})
        print(f"✓ t={peak:.0f}: alpha={fit.alpha:.3f} beta={fit.beta:.3f} "
              f"LR(alpha=0) p={fit.pvalue_drift:.4f} LR(beta=0) p={fit.pvalue_vol:.4f}")
    if args.output:
        save_data_file({"fits": fits}, Path(args.output))
        print(f"✓ 推定結果を書き出しました: {args.output}")


def cmd_events(args: argparse.Namespace) -> None:
    """検出イベントの事後リターン分析"""
    config = _run_config(args)
    frame = load_ticks(Path(args.data))
    report = detect_frame(frame, config, load_threshold_table(config))
    analysis = analyze_events(report, frame, endogenous=args.endogenous)

    output_dir = Path(config.output_dir)
    save_data_file(analysis.to_dict(), output_dir / ANALYSIS_FILE_NAME)
    returns_to_frame(analysis.samples).to_csv(output_dir / RETURNS_FILE_NAME, index=False,
                                              float_format=CSV_FLOAT_FORMAT)
    if analysis.reversion:
        b = analysis.reversion.coefficients["b"]
        t = analysis.reversion.t_statistics["b"]
        print(f"✓ 反転回帰: b={b:.4f} (t={t:.2f}), 反転率={analysis.reversion.reversal_fraction:.1%}")
    else:
        print("⚠️ 反転回帰はイベント数が足りないため省略しました")
    print(f"✓ イベント分析を書き出しました: {output_dir} ({len(analysis.samples)} 件)")


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--data', required=True, help='ティックCSV (ts_ms,bid,ask,trade_px,trade_sz)')
    parser.add_argument('--config', help='実行設定 YAML')
    parser.add_argument('--output-dir', help='出力ディレクトリ')
    parser.add_argument('--threshold', type=float, help='固定閾値 (既定 4.5)')
    parser.add_argument('--level', type=float, help='シミュレーション臨界値の信頼水準 (例: 0.95)')
    parser.add_argument('--table', help='臨界値テーブル JSON')
    parser.add_argument('--seed', type=int, help='乱数シード')
    parser.add_argument('--dedup', choices=DEDUP_POLICIES, help='イベントの重複除去方針')
    parser.add_argument('--min-separation', type=float, help='イベント間の最小間隔 (秒)')
    parser.add_argument('--session-start', help='セッション開始 (現地時刻 HH:MM)')
    parser.add_argument('--session-end', help='セッション終了 (現地時刻 HH:MM)')
    parser.add_argument('--timezone', help='IANA タイムゾーン (例: America/Chicago)')
    parser.add_argument('--drift-bandwidth', type=float, help='ドリフトのバンド幅 h (秒)')
    parser.add_argument('--variance-bandwidth', type=float, help="分散のバンド幅 h' (秒, 既定 5h)")
    parser.add_argument('--grid-spacing', type=float, help='評価グリッド間隔 (秒)')
    parser.add_argument('--preavg-window', type=int, help='事前平均化の窓幅 k_n')
    parser.add_argument('--mode', choices=['noise_robust', 'noise_free'], help='t 統計量の種類')
    parser.add_argument('--n-jobs', type=int, help='並列数')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='driftburst',
        description='ドリフトバースト検出ツールキット'
    )
    parser.add_argument('--verbose', action='store_true', help='DEBUG ログを出力')

    subparsers = parser.add_subparsers(dest='command', help='実行するコマンド')

    # simulateコマンド
    simulate_parser = subparsers.add_parser('simulate', help='シナリオからティックCSVを生成')
    simulate_parser.add_argument('--scenario', required=True, help='シナリオ名 (data/scenarios) または YAML のパス')
    simulate_parser.add_argument('--seed', type=int, help='シナリオのシードを上書き')
    simulate_parser.add_argument('--n', type=int, help='観測数を上書き')
    simulate_parser.add_argument('--output', help='出力CSV')

    # detectコマンド
    detect_parser = subparsers.add_parser('detect', help='ティックCSVに検出器を適用')
    _add_run_options(detect_parser)

    # critコマンド
    crit_parser = subparsers.add_parser('crit', help='臨界値テーブルの生成と参照')
    crit_sub = crit_parser.add_subparsers(dest='crit_command', required=True)
    build_parser_ = crit_sub.add_parser('build', help='臨界値テーブルを生成')
    build_parser_.add_argument('--output', help='出力 JSON (既定 data/tables/critical_values.json)')
    build_parser_.add_argument('--m', type=int, nargs='+', default=CRIT_M_AXIS, help='m 軸')
    build_parser_.add_argument('--rho', type=float, nargs='+', default=CRIT_RHO_AXIS, help='ρ 軸')
    build_parser_.add_argument('--levels', type=float, nargs='+', default=CRIT_LEVELS, help='信頼水準')
    build_parser_.add_argument('--n-sims', type=int, default=CRIT_N_SIMS, help='複製数')
    build_parser_.add_argument('--seed', type=int, default=CRIT_SEED, help='マスターシード')
    build_parser_.add_argument('--n-jobs', type=int, default=N_JOBS, help='スレッド数')
    query_parser = crit_sub.add_parser('query', help='臨界値を補間して表示')
    query_parser.add_argument('--table', help='臨界値テーブル JSON')
    query_parser.add_argument('--m', type=int, required=True, help='検定点数')
    query_parser.add_argument('--rho', type=float, required=True, help='AR(1) 係数')
    query_parser.add_argument('--level', type=float, required=True, help='信頼水準')
    query_parser.add_argument('--kind', choices=['raw', 'normalized'], default='raw', help='値の種類')

    # experimentコマンド
    experiment_parser = subparsers.add_parser('experiment', help='サイズ/検出力の実験')
    experiment_parser.add_argument('--scenario', default='full_design', help='基本シナリオ')
    experiment_parser.add_argument('--replications', type=int, default=1000, help='複製数 (100以上)')
    experiment_parser.add_argument('--seed', type=int, default=CRIT_SEED, help='マスターシード')
    experiment_parser.add_argument('--alphas', type=_optional_float, nargs='+', default=[None, 0.55, 0.65, 0.75],
                                   help="α の値 ('none' でドリフトバーストなし)")
    experiment_parser.add_argument('--betas', type=_optional_float, nargs='+', default=[None, 0.1, 0.2, 0.3, 0.4],
                                   help="β の値 ('none' でボラティリティバーストなし)")
    experiment_parser.add_argument('--bandwidths', type=float, nargs='+', default=EXPERIMENT_DRIFT_BANDWIDTHS,
                                   help='ドリフトのバンド幅 (秒)')
    experiment_parser.add_argument('--levels', type=float, nargs='+', default=EXPERIMENT_LEVELS, help='信頼水準')
    experiment_parser.add_argument('--evaluation-step', type=int, default=EXPERIMENT_EVALUATION_STEP,
                                   help='評価間隔 (観測数)')
    experiment_parser.add_argument('--crit-sims', type=int, default=EXPERIMENT_CRIT_SIMS, help='臨界値の複製数')
    experiment_parser.add_argument('--output', help='出力CSV')
    experiment_parser.add_argument('--n-jobs', type=int, default=N_JOBS, help='プロセス数')

    # fit-dbコマンド
    fit_parser = subparsers.add_parser('fit-db', help='イベント窓の最尤推定と尤度比検定')
    fit_parser.add_argument('--data', required=True, help='ティックCSV')
    fit_parser.add_argument('--peak-time', type=float, action='append', help='イベント時刻 (エポック秒, 複数可)')
    fit_parser.add_argument('--events', help='detect が出力した events.csv')
    fit_parser.add_argument('--window', type=float, default=FIT_WINDOW_SECONDS, help='窓の長さ (秒)')
    fit_parser.add_argument('--sampling', type=float, default=FIT_SAMPLING_SECONDS, help='サンプリング間隔 (秒)')
    fit_parser.add_argument('--output', help='出力 JSON')

    # eventsコマンド
    events_parser = subparsers.add_parser('events', help='反転回帰・出来高回帰・二重ソート')
    _add_run_options(events_parser)
    events_parser.add_argument('--endogenous', action='store_true', help='|t| < 1 に基づく内生的なイベント窓')

    # versionコマンド
    subparsers.add_parser('version', help='バージョンを表示')

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    メイン関数 - コマンドライン引数を解析して各コマンドを実行

    Returns:
        終了コード
    """
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
    )

    # コマンドが指定されていない場合はヘルプを表示
    if not args.command:
        parser.print_help()
        return EXIT_SUCCESS

    try:
        if args.command == 'simulate':
            cmd_simulate(args)

        elif args.command == 'detect':
            cmd_detect(args)

        elif args.command == 'crit':
            cmd_crit(args)

        elif args.command == 'experiment':
            cmd_experiment(args)

        elif args.command == 'fit-db':
            cmd_fit_db(args)

        elif args.command == 'events':
            cmd_events(args)

        elif args.command == 'version':
            print(f"driftburst {__version__}")

    except NumericalError as e:
        print(f"✗ 数値計算に失敗しました: {e}", file=sys.stderr)
        return EXIT_NUMERICAL_ERROR
    except (DriftBurstError, FileNotFoundError, ValueError) as e:
        print(f"✗ エラーが発生しました: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    return EXIT_SUCCESS


if __name__ == '__main__':
    sys.exit(main())
