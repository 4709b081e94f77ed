import numpy as np
import pandas as pd
import pytest
import statsmodels.api as sm

from driftburst.analysis.regression import (
    cgw_regression,
    nw_lags,
    nw_se,
    reversal_fraction,
    reversion_regression,
)
from driftburst.analysis.returns import (
    EventReturns,
    classify_event,
    event_returns,
    level_at,
    monthly_event_counts,
    returns_from_frame,
    returns_to_frame,
)
from driftburst.analysis.sorting import double_sort, quartile_buckets
from driftburst.analysis.volume import normalized_volume, normalized_volume_profile, trades_from_frame
from driftburst.detection.detector import BurstEvent, TStatSeries
from driftburst.detection.series import TickSeries
from driftburst.errors import CollinearityError, InputDataError, SingularDesignError

DAY = 86_400.0


def make_samples(r_minus, r_plus, v_minus=None, sign=None):
    samples = []
    for i, (rm, rp) in enumerate(zip(r_minus, r_plus)):
        samples.append(EventReturns(
            peak_time=1_000.0 * i,
            peak_t=5.0,
            sign=int(np.sign(rm) or 1) if sign is None else sign,
            R_minus=float(rm),
            R_plus=float(rp),
            start_time=1_000.0 * i - 300.0,
            end_time=1_000.0 * i + 300.0,
            V_minus=None if v_minus is None else float(v_minus[i]),
        ))
    return samples


@pytest.fixture
def linear_series():
    times = np.arange(0.0, 1_001.0)
    return TickSeries(times, 0.001 * times)


class TestEventReturns:
    def test_level_at_carries_last_value(self):
        times = np.array([10.0, 20.0, 30.0])
        levels = np.array([1.0, 2.0, 3.0])
        assert np.isnan(level_at(times, levels, 5.0))
        assert level_at(times, levels, 20.0) == 2.0
        assert level_at(times, levels, 29.9) == 2.0

    def test_fixed_horizon(self, linear_series, caplog):
        events = [BurstEvent(500.0, 6.0, 1, 4.5), BurstEvent(100.0, -5.0, -1, 4.5)]
        samples = event_returns(linear_series, events, horizon=300.0)
        assert len(samples) == 1
        assert samples[0].R_minus == pytest.approx(0.3)
        assert samples[0].R_plus == pytest.approx(0.3)
        assert (samples[0].start_time, samples[0].end_time) == (200.0, 800.0)
        assert "範囲外" in caplog.text

    def test_endogenous_window(self, linear_series):
        grid = np.arange(100.0, 1_000.0, 100.0)
        t_values = np.array([0.5, 2.0, 3.0, 5.0, 3.0, 2.0, 0.5, 0.2, 0.1])
        ts = TStatSeries(grid, t_values, np.zeros(9), np.ones(9))
        samples = event_returns(linear_series, [BurstEvent(400.0, 5.0, 1, 4.5)], endogenous=True, ts=ts)
        assert (samples[0].start_time, samples[0].end_time) == (100.0, 700.0)
        with pytest.raises(InputDataError):
            event_returns(linear_series, [], endogenous=True)

    def test_classification(self):
        crash, jump, flat = make_samples([0.1, 0.1, 0.1], [-0.05, 0.02, 0.0])
        assert classify_event(crash) == "flash_crash"
        assert classify_event(jump) == "gradual_jump"
        assert classify_event(flat) == "gradual_jump"

    def test_monthly_counts(self):
        jan, feb = 1_577_836_800.0, 1_580_515_200.0
        events = [BurstEvent(t, 5.0, 1, 4.5) for t in (jan + 10, jan + DAY, feb + 5)]
        assert monthly_event_counts(events) == {"2020-01": 2, "2020-02": 1}
        assert monthly_event_counts([]) == {}

    def test_frame_conversion(self):
        samples = make_samples([0.1, -0.2], [-0.05, -0.1], v_minus=[1.5, 0.5])
        frame = returns_to_frame(samples)
        assert frame["type"].tolist() == ["flash_crash", "gradual_jump"]
        assert returns_from_frame(frame) == samples
        assert "type" in returns_to_frame([]).columns


class TestRegression:
    @pytest.fixture
    def samples(self):
        rng = np.random.default_rng(4)
        r_minus = rng.normal(0.0, 0.01, 80)
        r_plus = -0.4 * r_minus + rng.normal(0.0, 0.001, 80)
        return make_samples(r_minus, r_plus, v_minus=rng.gamma(2.0, 0.5, 80))

    def test_lag_rule(self):
        assert nw_lags(100) == 4
        assert nw_lags(60) == 3
        assert nw_lags(1_000) == 6

    def test_standard_errors_match_statsmodels(self, samples):
        result = reversion_regression(samples)
        y = np.array([s.R_plus for s in samples])
        X = sm.add_constant(np.array([s.R_minus for s in samples]))
        oracle = sm.OLS(y, X).fit(cov_type="HAC", cov_kwds={"maxlags": result.lags, "use_correction": False})
        np.testing.assert_allclose([result.coefficients["a"], result.coefficients["b"]], oracle.params, rtol=1e-8)
        np.testing.assert_allclose([result.standard_errors["a"], result.standard_errors["b"]], oracle.bse, rtol=1e-8)
        assert result.r_squared == pytest.approx(oracle.rsquared)

    def test_zero_lags_is_white(self, samples):
        y = np.array([s.R_plus for s in samples])
        X = sm.add_constant(np.array([s.R_minus for s in samples]))
        oracle = sm.OLS(y, X).fit(cov_type="HC0")
        np.testing.assert_allclose(nw_se(X, oracle.resid, 0), oracle.bse, rtol=1e-8)

    def test_reversal_is_detected(self, samples):
        result = reversion_regression(samples)
        assert result.coefficients["b"] == pytest.approx(-0.4, abs=0.05)
        assert result.t_statistics["b"] < -5
        assert result.reversal_fraction > 0.8
        assert set(result.to_row()) == {"n", "a", "t_a", "b", "t_b", "r_squared", "reversal_fraction"}

    def test_order_does_not_matter(self, samples):
        shuffled = list(reversed(samples))
        assert reversion_regression(shuffled) == reversion_regression(samples)

    def test_cgw_with_volume(self, samples):
        result = cgw_regression(samples)
        assert set(result.coefficients) == {"a", "b", "c"}
        assert result.n == 80

    def test_cgw_without_volume_variation(self, samples):
        flat = [EventReturns(**{**s.to_dict(), "V_minus": 0.0}) for s in samples]
        result = cgw_regression(flat)
        nested = reversion_regression(samples)
        assert result.coefficients["c"] == 0.0
        assert np.isnan(result.standard_errors["c"])
        assert result.coefficients["b"] == nested.coefficients["b"]

    def test_collinear_interaction(self, samples):
        constant = [EventReturns(**{**s.to_dict(), "V_minus": 2.0}) for s in samples]
        with pytest.raises(CollinearityError):
            cgw_regression(constant)

    def test_sample_requirements(self, samples):
        with pytest.raises(InputDataError):
            reversion_regression(samples[:9])
        with pytest.raises(InputDataError):
            cgw_regression(samples[:19])
        missing = [EventReturns(**{**s.to_dict(), "V_minus": None}) for s in samples]
        with pytest.raises(InputDataError):
            cgw_regression(missing)

    def test_singular_design(self):
        X = np.column_stack([np.ones(5), np.zeros(5)])
        with pytest.raises(SingularDesignError):
            nw_se(X, np.ones(5), 1)

    def test_reversal_fraction(self):
        assert reversal_fraction([1.0, -1.0, 1.0, 0.0], [-1.0, -1.0, 2.0, 1.0]) == 0.25
        assert np.isnan(reversal_fraction([], []))


class TestVolume:
    @pytest.fixture
    def trades(self):
        days = np.arange(25) * DAY
        times = np.concatenate([days + 36_000.0, days + 39_600.0])
        notional = np.concatenate([np.full(25, 100.0), np.full(25, 300.0)])
        notional[0] = 200.0
        return times, notional

    def test_normalized_volume(self, trades):
        times, notional = trades
        values = normalized_volume(times, notional, [(35_000.0, 37_000.0), (DAY + 35_000.0, DAY + 37_000.0),
                                                     (DAY + 39_000.0, DAY + 40_000.0)])
        average = (24 * 100.0 + 200.0) / 25
        assert values == pytest.approx([200.0 / average, 100.0 / average, 1.0])

    def test_profile_has_unit_mean(self, trades):
        profile = normalized_volume_profile(*trades, clock_start=35_000.0, length=2_000.0)
        assert profile.size == 25
        assert profile.mean() == pytest.approx(1.0)

    def test_errors(self, trades):
        times, notional = trades
        with pytest.raises(InputDataError):
            normalized_volume(times[:10], notional[:10], [(35_000.0, 37_000.0)])
        with pytest.raises(InputDataError):
            normalized_volume(times, notional, [(0.0, 1_000.0)])

    def test_trades_from_frame(self, tick_frame):
        times, notional = trades_from_frame(tick_frame)
        np.testing.assert_allclose(times, [2.0, 4.0])
        np.testing.assert_allclose(notional, [303.0, 102.5])


class TestDoubleSort:
    def test_quartile_buckets(self):
        buckets = quartile_buckets(np.arange(1.0, 9.0))
        assert buckets.tolist() == ["low", "low", "medium", "medium", "medium", "medium", "high", "high"]

    def test_conditional_means(self):
        n = 40
        r_minus = np.arange(1.0, n + 1) / 1_000
        v_minus = np.tile([0.5, 1.0, 1.5, 2.0], n // 4)
        r_plus = -r_minus * v_minus
        tables = double_sort(make_samples(r_minus, r_plus, v_minus, sign=1))
        positive = tables["positive"]
        assert list(positive.columns) == ["low", "medium", "high", "high-low"]
        assert positive.loc["high", "high-low"] < 0
        assert positive.notna().any().any()
        assert tables["negative"].isna().all().all()

    def test_degenerate_buckets_warn(self, caplog):
        n = 40
        v_minus = np.tile([0.5, 1.0, 1.5, 2.0], n // 4)
        tables = double_sort(make_samples(np.full(n, 0.01), np.ones(n), v_minus, sign=1))
        assert tables["positive"].loc[["medium", "high"]].isna().all().all()
        assert "R⁻" in caplog.text and "⚠️" in caplog.text

    def test_requirements(self):
        with pytest.raises(InputDataError):
            double_sort(make_samples(np.ones(10), np.ones(10), np.ones(10)))
        with pytest.raises(InputDataError):
            double_sort(make_samples(np.ones(40), np.ones(40)))
