import math

import numpy as np
import pytest

from driftburst.errors import ConfigError, DomainError, InputDataError
from driftburst.estimation.kernel import (
    KernelSpec,
    alternative_constant,
    bias_constant,
    eval_kernel,
    jump_limit,
    kernel_K2,
    kernel_moment,
    kernel_weights,
    parzen,
)


@pytest.fixture
def spec():
    return KernelSpec()


def test_left_exponential_values(spec):
    assert eval_kernel(spec, 0.0) == 1.0
    assert eval_kernel(spec, -1.0) == pytest.approx(math.exp(-1.0))
    assert eval_kernel(spec, 0.5) == 0.0


def test_truncation_zeroes_far_left(spec):
    weights = kernel_weights(spec, np.array([-9.99, -10.0, -10.01, -50.0]))
    assert weights[0] > 0
    assert weights[1] > 0
    assert weights[2] == 0.0
    assert weights[3] == 0.0


def test_eval_kernel_rejects_non_finite(spec):
    with pytest.raises(InputDataError):
        eval_kernel(spec, math.inf)


def test_invalid_truncation_radius():
    with pytest.raises(ConfigError):
        KernelSpec(truncation_radius=0.0)


def test_k2_exact_and_quadrature(spec):
    assert kernel_K2(spec) == 0.5
    assert kernel_K2(spec, method="quad") == pytest.approx(0.5, abs=1e-10)


@pytest.mark.parametrize("power", [-0.8, -0.4, 0.0, 0.5, 1.0])
@pytest.mark.parametrize("squared", [False, True])
def test_moments_analytic_match_quadrature(spec, power, squared):
    analytic = kernel_moment(spec, power, squared=squared)
    numeric = kernel_moment(spec, power, squared=squared, method="quad")
    assert numeric == pytest.approx(analytic, rel=1e-7)


def test_moment_diverges_at_minus_one(spec):
    with pytest.raises(DomainError):
        kernel_moment(spec, -1.0)


@pytest.mark.parametrize("beta", [0.0, 0.1, 0.2, 0.3, 0.4])
def test_alternative_constant_is_power_of_two(spec, beta):
    assert alternative_constant(spec, beta) == pytest.approx(2.0 ** beta, abs=1e-12)
    assert alternative_constant(spec, beta, method="quad") == pytest.approx(2.0 ** beta, abs=1e-6)


def test_alternative_constant_domain(spec):
    with pytest.raises(DomainError):
        alternative_constant(spec, 0.5)


def test_bias_constant_grows_towards_half(spec):
    values = [bias_constant(spec, b) for b in (0.1, 0.3, 0.45, 0.49)]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert bias_constant(spec, 0.2, c_ratio=2.0) == pytest.approx(2.0 * bias_constant(spec, 0.2))


def test_jump_limit_is_sqrt_two(spec):
    assert jump_limit(spec) == pytest.approx(math.sqrt(2.0), abs=1e-12)


def test_parzen_window():
    assert parzen(0.0) == 1.0
    assert parzen(0.5) == pytest.approx(0.25)
    assert parzen(0.75) == pytest.approx(2.0 * 0.25 ** 3)
    assert parzen(1.0) == 0.0
    assert parzen(-0.25) == parzen(0.25)
    with pytest.raises(InputDataError):
        parzen(math.nan)
