import math

import numpy as np
import pytest
from scipy import stats

from mmwnoma import (
    DeploymentModel,
    UserRegion,
    expected_count,
    sample_deployment,
    thresholds_from_coefficients,
)
from mmwnoma.geometry import membership_probabilities, sample_positions

DEG = math.pi / 180.0


def test_expected_count_matches_direct_arithmetic(region):
    # independent arithmetic: area in (r dr dtheta) times density
    area = (45.0**2 - 0.0**2) * (15.0 * DEG / 2.0)
    assert expected_count(region, 0.01) == pytest.approx(area * 0.01, rel=1e-14)
    assert expected_count(region, 0.01) == pytest.approx(2.6507, abs=2e-4)


def test_expected_count_zero_density(region):
    assert expected_count(region, 0.0) == 0.0


def test_expected_count_vanishing_area():
    region = UserRegion(d_min=10.0, d_max=10.0 + 1e-9, delta=15.0 * DEG)
    assert expected_count(region, 0.01) < 1e-9


def test_threshold_formulas(region):
    thr = thresholds_from_coefficients(region, c_d=0.2, c_theta=0.1)
    assert thr.d_th == pytest.approx(9.0, abs=1e-12)
    assert thr.theta_th == pytest.approx(0.75 * DEG, rel=1e-14)


def test_threshold_boundary_coefficient(region):
    assert thresholds_from_coefficients(region, 1.0, 0.5).d_th == region.d_max


@pytest.mark.parametrize("c_d,c_theta", [(-0.1, 0.5), (1.1, 0.5), (0.5, -0.01), (0.5, 2.0)])
def test_threshold_coefficient_domain(region, c_d, c_theta):
    with pytest.raises(ValueError):
        thresholds_from_coefficients(region, c_d, c_theta)


def test_region_validation():
    with pytest.raises(ValueError):
        UserRegion(d_min=-1.0, d_max=45.0, delta=0.1)
    with pytest.raises(ValueError):
        UserRegion(d_min=10.0, d_max=5.0, delta=0.1)
    with pytest.raises(ValueError):
        UserRegion(d_min=0.0, d_max=45.0, delta=0.0)


def test_deployment_determinism(region):
    model = DeploymentModel(density=0.01)
    a = sample_deployment(region, model, np.random.default_rng(1234))
    b = sample_deployment(region, model, np.random.default_rng(1234))
    assert a == b


def test_poisson_count_mean(region):
    model = DeploymentModel(density=0.01)
    mu = model.expected_count(region)
    rng = np.random.default_rng(42)
    n = 50_000
    counts = [len(sample_deployment(region, model, rng)) for _ in range(n)]
    assert abs(np.mean(counts) - mu) <= 3.0 * math.sqrt(mu / n)


def test_samples_inside_sector(region):
    d, th, a2 = sample_positions(region, 100_000, np.random.default_rng(7))
    assert np.all((d >= region.d_min) & (d <= region.d_max))
    assert np.all(np.abs(th - region.theta_bar) <= region.half_angle + 1e-12)
    assert np.all(a2 >= 0)


def test_distance_squared_is_uniform(region):
    d, _, _ = sample_positions(region, 100_000, np.random.default_rng(99))
    span = region.d_max**2 - region.d_min**2
    result = stats.kstest(d**2, "uniform", args=(region.d_min**2, span))
    assert result.pvalue > 0.01


def test_angle_threshold_frequency(region, thresholds):
    _, th, _ = sample_positions(region, 200_000, np.random.default_rng(5))
    freq = np.mean(np.abs(th - region.theta_bar) <= thresholds.theta_th)
    p_theta, _ = membership_probabilities(region, thresholds)
    assert p_theta == pytest.approx(0.1, rel=1e-12)
    assert abs(freq - p_theta) <= 3.0 * math.sqrt(0.1 * 0.9 / 200_000)


def test_membership_probability_identities(region):
    # p_theta = c_theta exactly; p_d = c_d^2 when the inner radius is zero
    for c_theta, c_d in [(0.1, 0.2), (0.5, 0.7), (1.0, 1.0), (0.0, 0.0)]:
        thr = thresholds_from_coefficients(region, c_d, c_theta)
        p_theta, p_d = membership_probabilities(region, thr)
        assert p_theta == pytest.approx(c_theta, abs=1e-14)
        assert p_d == pytest.approx(c_d**2, abs=1e-14)


def test_distance_mean_matches_density(region):
    # E[d] under 2x/(d_max^2-d_min^2) is 2(d_max^3-d_min^3)/(3(d_max^2-d_min^2))
    d, _, _ = sample_positions(region, 400_000, np.random.default_rng(11))
    expected = 2.0 * region.d_max / 3.0
    assert np.mean(d) == pytest.approx(expected, rel=5e-3)
