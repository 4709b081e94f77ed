import numpy as np
import pytest

from driftburst.errors import ConfigError, DomainError, InputDataError
from driftburst.estimation.preavg import (
    PreAvgConfig,
    level_weights,
    preaverage,
    preaverage_levels,
    preaverage_series,
    preaverage_weights,
    weight_g,
)


def test_weight_function():
    assert weight_g(0.0) == 0.0
    assert weight_g(0.5) == 0.5
    assert weight_g(0.25) == 0.25
    assert weight_g(1.0) == 0.0
    with pytest.raises(DomainError):
        weight_g(1.2)


def test_config_validation():
    with pytest.raises(ConfigError):
        PreAvgConfig(k_n=0)
    with pytest.raises(ConfigError):
        PreAvgConfig(k_n=2.5)


def test_weights_for_k3():
    np.testing.assert_allclose(preaverage_weights(3), [0.0, 1 / 3, 1 / 3], atol=1e-15)
    np.testing.assert_allclose(level_weights(3), [1 / 3, 0.0, -1 / 3], atol=1e-15)


def test_k3_hand_computed():
    out = preaverage(np.array([1.0, 2.0, 3.0, 4.0]), PreAvgConfig(k_n=3))
    np.testing.assert_allclose(out, [(2 + 3) / 3, (3 + 4) / 3])


def test_k1_is_identity():
    inc = np.array([0.1, -0.2, 0.3])
    out = preaverage(inc, PreAvgConfig(k_n=1))
    np.testing.assert_array_equal(out, inc)
    assert out is not inc


@pytest.mark.parametrize("k_n", [2, 3, 5, 10])
def test_level_form_matches_increment_form(k_n):
    rng = np.random.default_rng(k_n)
    levels = np.cumsum(rng.standard_normal(500))
    cfg = PreAvgConfig(k_n=k_n)
    np.testing.assert_allclose(preaverage_levels(levels, cfg), preaverage(np.diff(levels), cfg),
                               rtol=0, atol=1e-12)


def test_too_short_input():
    with pytest.raises(InputDataError):
        preaverage(np.array([1.0, 2.0]), PreAvgConfig(k_n=3))


def test_anchor_times():
    times = np.arange(10, dtype=float)
    levels = np.arange(10, dtype=float) ** 2
    anchors, pa = preaverage_series(times, levels, PreAvgConfig(k_n=3))
    assert anchors.size == pa.size == 9 - 3 + 1
    np.testing.assert_array_equal(anchors, times[1:1 + pa.size])

    anchors1, pa1 = preaverage_series(times, levels, PreAvgConfig(k_n=1))
    np.testing.assert_array_equal(anchors1, times[:-1])
    np.testing.assert_array_equal(pa1, np.diff(levels))


def test_noise_variance_scales_inverse_with_window():
    rng = np.random.default_rng(42)
    noise = rng.standard_normal(200_001)
    windows = np.arange(2, 21)
    variances = [preaverage(np.diff(noise), PreAvgConfig(k_n=int(k))).var() for k in windows]
    slope = np.polyfit(np.log(windows), np.log(variances), 1)[0]
    assert -1.15 <= slope <= -0.85
