import math

import numpy as np
import pytest
from scipy import special

from driftburst.errors import DomainError, InputDataError
from driftburst.simulation.bursts import (
    BurstParams,
    BurstProfile,
    cumulative_burst_return,
    drift_burst_increments,
    inject_bursts,
    volatility_burst_variances,
)
from driftburst.simulation.heston import HestonParams, feller_condition, simulate_heston
from driftburst.simulation.jumps import (
    JumpParams,
    calibrate_jump_intensity,
    jump_quadratic_variation,
    simulate_tempered_stable,
)
from driftburst.simulation.noise import NoiseParams, add_noise, daily_sigma, inject_fixed_jump

DFY = 1.0 / 252.0


class TestHeston:
    def test_path_shapes_and_positivity(self):
        path = simulate_heston(HestonParams(), 1_000, seed=1)
        assert path.variance.shape == (1_001,)
        assert path.increments.shape == (1_000,)
        assert np.all(path.variance >= 0.0)
        assert path.dt == pytest.approx(DFY / 1_000)

    def test_seed_determinism(self):
        a = simulate_heston(HestonParams(), 500, seed=42)
        b = simulate_heston(HestonParams(), 500, seed=42)
        c = simulate_heston(HestonParams(), 500, seed=43)
        np.testing.assert_array_equal(a.increments, b.increments)
        assert not np.array_equal(a.increments, c.increments)

    def test_stationary_start_has_mean_theta(self):
        p = HestonParams()
        starts = [simulate_heston(p, 100, seed=s).variance.mean() for s in range(400)]
        assert np.mean(starts) == pytest.approx(p.theta, rel=0.15)

    def test_fixed_initial_variance(self):
        path = simulate_heston(HestonParams(), 100, seed=0, v0=0.04)
        assert path.variance[0] == 0.04

    def test_increment_variance_follows_variance_path(self):
        path = simulate_heston(HestonParams(), 23_400, seed=3)
        realized = float(np.sum(path.increments ** 2))
        integrated = float(np.sum(path.variance[:-1]) * path.dt)
        assert realized == pytest.approx(integrated, rel=0.05)

    def test_feller_condition(self, caplog):
        assert feller_condition(HestonParams())["satisfied"]
        result = feller_condition(HestonParams(kappa=1.0, theta=0.01, xi=1.0))
        assert not result["satisfied"]
        assert "Feller" in caplog.text

    def test_invalid_parameters(self):
        with pytest.raises(DomainError):
            HestonParams(kappa=0.0)
        with pytest.raises(DomainError):
            HestonParams(rho=-1.5)
        with pytest.raises(DomainError):
            simulate_heston(HestonParams(), 1)


class TestJumps:
    def test_calibrated_intensity(self):
        psi = calibrate_jump_intensity(0.2, HestonParams())
        assert psi == pytest.approx(0.01649, rel=1e-3)
        qv = jump_quadratic_variation(JumpParams(psi=psi))
        assert qv / (qv + HestonParams().theta * DFY) == pytest.approx(0.2)

    def test_calibration_does_not_depend_on_day_length(self):
        hp = HestonParams()
        assert calibrate_jump_intensity(0.3, hp, day_fraction_of_year=1.0) == pytest.approx(
            calibrate_jump_intensity(0.3, hp))

    def test_monte_carlo_second_moment(self):
        jp = JumpParams(psi=50.0, lam=3.0)
        expected = 2.0 * 50.0 * special.gamma(1.5) * 3.0 ** -1.5
        totals = [np.sum(simulate_tempered_stable(jp, 10_000, 1.0, seed=s) ** 2) for s in range(20)]
        assert np.mean(totals) == pytest.approx(expected, rel=0.15)

    def test_zero_intensity_and_unsupported_activity(self):
        np.testing.assert_array_equal(simulate_tempered_stable(JumpParams(psi=0.0), 10), np.zeros(10))
        with pytest.raises(DomainError):
            simulate_tempered_stable(JumpParams(psi=1.0, upsilon=0.7), 10)
        with pytest.raises(DomainError):
            calibrate_jump_intensity(1.0, HestonParams())
        with pytest.raises(DomainError):
            JumpParams(psi=-1.0)

    def test_both_signs_occur(self):
        x = simulate_tempered_stable(JumpParams(psi=1.0), 5_000, seed=8)
        assert (x > 0).any() and (x < 0).any()


class TestBursts:
    grid = np.arange(23_401) / 23_400.0

    def test_cumulative_return_closed_form(self):
        assert cumulative_burst_return(BurstParams(a=3.0, alpha=0.75)) == pytest.approx(0.018935, rel=1e-3)
        assert cumulative_burst_return(BurstParams(a=3.0, alpha=0.55)) == pytest.approx(0.00503, rel=2e-3)

    def test_flash_crash_reverts(self):
        bp = BurstParams(a=3.0, alpha=0.75)
        drift = drift_burst_increments(self.grid, bp, DFY)
        before = drift[self.grid[1:] <= 0.5].sum()
        assert before == pytest.approx(-cumulative_burst_return(bp), rel=1e-9)
        assert drift.sum() == pytest.approx(0.0, abs=1e-12)

    def test_gradual_jump_keeps_level(self):
        bp = BurstParams(a=3.0, alpha=0.75, profile=BurstProfile.GRADUAL_JUMP)
        drift = drift_burst_increments(self.grid, bp, DFY)
        assert drift.sum() == pytest.approx(-cumulative_burst_return(bp), rel=1e-9)
        assert np.all(drift[self.grid[:-1] >= 0.5] == 0.0)

    def test_drift_is_zero_outside_window(self):
        drift = drift_burst_increments(self.grid, BurstParams(a=3.0), DFY)
        outside = (self.grid[1:] <= 0.475) | (self.grid[:-1] >= 0.525)
        assert np.all(drift[outside] == 0.0)

    def test_volatility_burst_total_variance(self):
        bp = BurstParams(b=0.15, beta=0.2)
        theta = 0.0225
        total = volatility_burst_variances(self.grid, bp, theta, DFY).sum()
        expected = bp.b ** 2 * theta * DFY * 2 * 0.025 ** 0.6 / 0.6
        assert total == pytest.approx(expected, rel=1e-9)

    def test_recentered_volatility_burst(self):
        n = 2_340
        out = inject_bursts(np.zeros(n), np.full(n + 1, 0.0225), BurstParams(b=0.15, beta=0.4), DFY, seed=1)
        grid = np.linspace(0.0, 1.0, n + 1)
        inside = (grid[1:] > 0.475) & (grid[:-1] < 0.525)
        assert out[inside].sum() == pytest.approx(0.0, abs=1e-12)
        assert np.all(out[~inside] == 0.0)
        assert np.abs(out[inside]).max() > 0.0

    def test_same_brownian_needs_shocks(self):
        bp = BurstParams(b=0.15, same_brownian=True)
        with pytest.raises(DomainError):
            inject_bursts(np.zeros(100), np.full(101, 0.0225), bp)
        out = inject_bursts(np.zeros(100), np.full(101, 0.0225), bp, price_shocks=np.ones(100))
        assert np.isfinite(out).all()

    def test_invalid_parameters(self):
        with pytest.raises(DomainError):
            BurstParams(tau_db=0.9)
        with pytest.raises(DomainError):
            BurstParams(alpha=1.0)
        with pytest.raises(DomainError):
            BurstParams(beta=0.5)
        with pytest.raises(DomainError):
            inject_bursts(np.zeros(10), np.zeros(10), BurstParams(a=1.0))


class TestNoise:
    def test_zero_noise_is_a_copy(self):
        levels = np.linspace(0.0, 1.0, 11)
        out = add_noise(levels, np.ones(11), NoiseParams(gamma=0.0), seed=1)
        np.testing.assert_array_equal(out, levels)
        assert out is not levels

    def test_noise_scale(self):
        n = 100_000
        sigma = np.full(n + 1, 0.01)
        out = add_noise(np.zeros(n + 1), sigma, NoiseParams(gamma=0.5), seed=2)
        assert out.std() == pytest.approx(0.5 * 0.01 / math.sqrt(n), rel=0.02)

    def test_daily_sigma(self):
        np.testing.assert_allclose(daily_sigma(np.array([0.0225, -1.0])), [math.sqrt(0.0225 / 252), 0.0])

    def test_validation(self):
        with pytest.raises(DomainError):
            NoiseParams(gamma=-0.1)
        with pytest.raises(InputDataError):
            add_noise(np.zeros(3), np.zeros(4), NoiseParams())

    def test_fixed_jump(self):
        times = np.arange(10, dtype=float)
        out = inject_fixed_jump(np.zeros(10), times, 0.3, 4.0)
        np.testing.assert_array_equal(out, [0, 0, 0, 0, 0.3, 0.3, 0.3, 0.3, 0.3, 0.3])
        with pytest.raises(DomainError):
            inject_fixed_jump(np.zeros(10), times, 0.3, 0.0)
