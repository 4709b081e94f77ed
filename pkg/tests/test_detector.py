import math

import numpy as np
import pytest
from scipy import stats

from driftburst.detection.detector import (
    BurstEvent,
    DetectorConfig,
    StatisticMode,
    TStatSeries,
    _point_lags,
    evaluation_grid,
    events_to_frame,
    extract_events,
    gumbel_constants,
    gumbel_critical_value,
    local_maxima,
    max_stat,
    prepare_series,
    select_peaks,
    tstat_at,
    tstat_grid,
)
from driftburst.detection.series import TickSeries
from driftburst.errors import ConfigError, EmptyWindowError, InputDataError
from driftburst.estimation.estimator import LagMode, LagPolicy, auto_lag, window_slice
from driftburst.estimation.kernel import jump_limit, KernelSpec, parzen
from driftburst.simulation.noise import inject_fixed_jump
from tests.conftest import brownian_series


def test_config_defaults_follow_bandwidth():
    cfg = DetectorConfig(drift_bandwidth=300.0)
    assert cfg.variance_bandwidth == 1_500.0
    assert cfg.burn_in == 1_500.0
    assert cfg.revision_lookback == cfg.grid_spacing == 5.0


def test_config_dict_round_trip():
    cfg = DetectorConfig(drift_bandwidth=120.0, mode="noise_free", grid_spacing=10.0,
                         lag_policy=LagPolicy(mode=LagMode.FIXED, fixed_lag=4))
    assert DetectorConfig.from_dict(cfg.to_dict()) == cfg


def test_config_rejects_unknown_key_and_mode():
    with pytest.raises(ConfigError) as excinfo:
        DetectorConfig.from_dict({"drift_bandwith": 300})
    assert excinfo.value.key == "drift_bandwith"
    with pytest.raises(ConfigError):
        DetectorConfig(mode="fancy")
    with pytest.raises(ConfigError):
        DetectorConfig(drift_bandwidth=0.0)


def test_tick_series_validation():
    with pytest.raises(InputDataError):
        TickSeries([0.0, 1.0, 1.0], [0.0, 0.0, 0.0])
    with pytest.raises(InputDataError):
        TickSeries([0.0, 1.0], [0.0, math.nan])
    series = TickSeries([0.0, 1.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        series.levels[0] = 5.0


def test_evaluation_grid_excludes_start():
    series = TickSeries(np.arange(0.0, 101.0), np.zeros(101))
    grid = evaluation_grid(series, 25.0)
    np.testing.assert_array_equal(grid, [25.0, 50.0, 75.0, 100.0])


def test_burn_in_points_are_missing(null_series, fast_detector):
    ts = tstat_grid(null_series, fast_detector)
    early = ts.grid_times - null_series.times[0] < fast_detector.burn_in
    assert np.all(np.isnan(ts.t_values[early]))
    assert np.all(np.isfinite(ts.t_values[~early]))


def test_points_without_recent_update_are_missing(fast_detector):
    series = brownian_series(n=10_000, seed=4)
    keep = (series.times < 5_000) | (series.times > 6_000)
    gapped = TickSeries(series.times[keep], series.levels[keep])
    ts = tstat_grid(gapped, fast_detector)
    in_gap = (ts.grid_times > 5_000 + fast_detector.grid_spacing) & (ts.grid_times <= 6_000)
    assert in_gap.any()
    assert np.all(np.isnan(ts.t_values[in_gap]))


def test_results_do_not_depend_on_threads(null_series, fast_detector):
    single = tstat_grid(null_series, fast_detector, n_jobs=1)
    threaded = tstat_grid(null_series, fast_detector, n_jobs=3)
    np.testing.assert_array_equal(single.t_values, threaded.t_values)
    np.testing.assert_array_equal(single.lrv_hats, threaded.lrv_hats)


def test_level_shift_invariance(null_series, fast_detector):
    base = tstat_grid(null_series, fast_detector)
    shifted = tstat_grid(null_series.shifted(3.0), fast_detector)
    np.testing.assert_allclose(shifted.t_values, base.t_values, rtol=1e-6, atol=1e-6)


def test_tstat_at_matches_grid(null_series, fast_detector):
    ts = tstat_grid(null_series, fast_detector)
    idx = int(np.flatnonzero(ts.present)[10])
    assert tstat_at(null_series, float(ts.grid_times[idx]), fast_detector) == ts.t_values[idx]


@pytest.mark.parametrize("mode", [StatisticMode.NOISE_ROBUST, StatisticMode.NOISE_FREE])
def test_null_statistic_is_roughly_standard(mode):
    noise = 2e-5 if mode is StatisticMode.NOISE_ROBUST else 0.0
    series = brownian_series(seed=11, noise=noise)
    cfg = DetectorConfig(drift_bandwidth=300.0, grid_spacing=60.0, mode=mode)
    values = tstat_grid(series, cfg).t_values
    values = values[np.isfinite(values)]
    assert 0.6 <= values.std() <= 1.5
    assert abs(values.mean()) < 1.0


def test_strong_drift_gives_large_statistic(fast_detector):
    series = brownian_series(seed=2, drift=2e-5)
    values = tstat_grid(series, fast_detector).t_values
    assert np.nanmean(values) > 3.0


def test_pre_announced_jump_limit():
    series = brownian_series(seed=9)
    k = 15_000
    jumped = inject_fixed_jump(series.levels, series.times, 0.5, float(series.times[k]))
    jumped_series = TickSeries(series.times, jumped)
    cfg = DetectorConfig(drift_bandwidth=300.0, variance_bandwidth=300.0,
                         mode=StatisticMode.NOISE_FREE)
    value = tstat_at(jumped_series, float(series.times[k - 1]), cfg)
    assert abs(value) == pytest.approx(jump_limit(KernelSpec()), abs=0.05)


def test_pre_announced_jump_limit_noise_robust():
    series = brownian_series(seed=9)
    k = 15_000
    jumped = inject_fixed_jump(series.levels, series.times, 0.5, float(series.times[k]))
    jumped_series = TickSeries(series.times, jumped)
    cfg = DetectorConfig(drift_bandwidth=300.0)
    lags = prepare_series(jumped_series, cfg).lags
    value = tstat_at(jumped_series, float(series.times[k - 1]), cfg)
    # two pre-averaged increments carry J/3 each
    ratio = cfg.variance_bandwidth / cfg.drift_bandwidth
    expected = math.sqrt(ratio * 2.0 / (1.0 + parzen(1.0 / lags)))
    assert abs(value) == pytest.approx(expected, abs=0.05)
    assert abs(value) > jump_limit(KernelSpec())


def test_per_point_lags_follow_local_noise():
    series = brownian_series(seed=5)
    rng = np.random.default_rng(6)
    levels = series.levels.copy()
    levels[12_000:] += 2e-4 * rng.standard_normal(levels.size - 12_000)
    noisy = TickSeries(series.times, levels)
    policy = LagPolicy(mode=LagMode.AUTO, per_point=True)
    cfg = DetectorConfig(drift_bandwidth=300.0, variance_bandwidth=300.0, lag_policy=policy)
    prepared = prepare_series(noisy, cfg)

    early, late = _point_lags(prepared, 6_000.0, cfg), _point_lags(prepared, 20_000.0, cfg)
    assert late > early
    lo, hi = window_slice(prepared.raw_times, 20_000.0, 300.0, cfg.kernel)
    assert late == policy.resolve(cfg.preavg.k_n, auto_lag(prepared.raw_increments[lo:hi]))

    day_cfg = DetectorConfig(drift_bandwidth=300.0, variance_bandwidth=300.0,
                             lag_policy=LagPolicy(mode=LagMode.AUTO))
    day_prepared = prepare_series(noisy, day_cfg)
    assert _point_lags(day_prepared, 6_000.0, day_cfg) == day_prepared.lags
    assert _point_lags(day_prepared, 20_000.0, day_cfg) == day_prepared.lags


def test_tstat_series_is_immutable_and_checked():
    ts = TStatSeries([1.0, 2.0], [0.5, math.nan], [0.0, 0.0], [1.0, 1.0])
    with pytest.raises(ValueError):
        ts.t_values[0] = 1.0
    with pytest.raises(InputDataError):
        TStatSeries([1.0, 2.0], [0.5, math.inf], [0.0, 0.0], [1.0, 1.0])
    with pytest.raises(InputDataError):
        TStatSeries([2.0, 1.0], [0.5, 0.1], [0.0, 0.0], [1.0, 1.0])


def test_tstat_series_csv_round_trip(tmp_path, null_series, fast_detector):
    ts = tstat_grid(null_series, fast_detector)
    loaded = TStatSeries.from_csv(ts.to_csv(tmp_path / "tstats.csv"))
    np.testing.assert_array_equal(loaded.grid_times, ts.grid_times)
    np.testing.assert_array_equal(loaded.t_values, ts.t_values)
    np.testing.assert_array_equal(loaded.lrv_hats, ts.lrv_hats)


def test_tstat_series_json_keeps_config(tmp_path, null_series, fast_detector):
    ts = tstat_grid(null_series, fast_detector)
    loaded = TStatSeries.from_json(ts.to_json(tmp_path / "tstats.json"))
    assert loaded.config_snapshot == fast_detector
    np.testing.assert_array_equal(loaded.t_values, ts.t_values)


def test_gumbel_constants():
    a_m, b_m = gumbel_constants(1_000)
    assert a_m == pytest.approx(math.sqrt(2 * math.log(1_000)))
    assert b_m == pytest.approx(a_m - math.log(math.pi * math.log(1_000)) / (2 * a_m))
    with pytest.raises(InputDataError):
        gumbel_constants(1)
    assert gumbel_critical_value(1_000, 0.99) > gumbel_critical_value(1_000, 0.95)


def test_max_stat_on_hand_made_series():
    ts = TStatSeries([10.0, 20.0, 30.0, 40.0], [1.0, -3.0, 2.0, math.nan],
                     np.zeros(4), np.ones(4))
    result = max_stat(ts)
    a_m, b_m = gumbel_constants(3)
    assert result.m == 3
    assert result.T_star == 3.0
    assert result.peak_time == 20.0
    assert result.normalized == pytest.approx((3.0 - b_m) * a_m)
    assert result.p_value == pytest.approx(1 - math.exp(-math.exp(-result.normalized)))


def test_max_stat_all_missing():
    ts = TStatSeries([1.0, 2.0], [math.nan, math.nan], [0.0, 0.0], [0.0, 0.0])
    with pytest.raises(EmptyWindowError):
        max_stat(ts)


def test_gumbel_p_value_matches_scipy():
    ts = TStatSeries(np.arange(1.0, 6.0), [0.1, 0.2, 4.0, 0.3, 0.2], np.zeros(5), np.ones(5))
    result = max_stat(ts)
    assert result.p_value == pytest.approx(stats.gumbel_r.sf(result.normalized), rel=1e-9)


def test_local_maxima_rules():
    assert local_maxima(np.array([0.0, 5.0, 5.0, 0.0]), 4.0).tolist() == [1]
    assert local_maxima(np.array([0.0, 5.0, math.nan]), 4.0).tolist() == []
    assert local_maxima(np.array([0.0, 3.0, 0.0]), 4.0).tolist() == []
    assert local_maxima(np.array([0.0, 5.0, 1.0, 6.0, 0.0]), 4.0).tolist() == [1, 3]


def test_select_peaks_window_and_daily():
    values = np.array([0.0, 5.0, 1.0, 6.0, 0.0, 0.0, 7.0, 0.0])
    times = np.array([0.0, 100.0, 150.0, 200.0, 300.0, 86_400.0, 86_500.0, 86_600.0])
    assert select_peaks(values, times, 4.0, min_separation=300.0) == [3, 6]
    assert select_peaks(values, times, 4.0, min_separation=50.0) == [1, 3, 6]
    assert select_peaks(values, times, 4.0, dedup="daily") == [3, 6]
    with pytest.raises(ConfigError):
        select_peaks(values, times, 4.0, dedup="hourly")


def test_extract_events_signs_and_threshold():
    ts = TStatSeries([0.0, 5.0, 10.0, 500.0, 505.0, 510.0],
                     [0.0, -6.0, 0.0, 0.0, 5.0, 0.0], np.zeros(6), np.ones(6))
    events = extract_events(ts, 4.5)
    assert events == [BurstEvent(5.0, -6.0, -1, 4.5), BurstEvent(505.0, 5.0, 1, 4.5)]
    assert list(events_to_frame(events).columns) == ["peak_time", "peak_t", "sign", "threshold_used"]
    with pytest.raises(InputDataError):
        extract_events(ts, 0.0)
