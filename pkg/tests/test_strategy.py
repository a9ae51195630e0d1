import math

import numpy as np
import pytest

from helpers import SBAR, W2B, WBAR, S2B, deployment_for_pattern, ue_in_quadrant
from mmwnoma import (
    LinkBudget,
    PowerSplit,
    StrategyKind,
    TargetRates,
    TransmissionDecision,
    UserEquipment,
    decide,
    form_groups,
    quantize,
    realized_rate,
    sinr,
)
from mmwnoma.geometry import DeploymentModel, sample_deployment
from mmwnoma.strategy import DecisionMode, PairSource, decision_gains

ALL_KINDS = list(StrategyKind)


def test_quantize_innermost(region, thresholds):
    ue = UserEquipment(distance=region.d_min, angle=region.theta_bar, fading_power=1.0)
    bits = quantize(ue, thresholds, region.theta_bar)
    assert bits.angle_bit and bits.distance_bit


def test_quantize_outer_corner(region, thresholds):
    ue = UserEquipment(distance=region.d_max,
                       angle=region.theta_bar + region.half_angle, fading_power=1.0)
    bits = quantize(ue, thresholds, region.theta_bar)
    assert not bits.angle_bit and not bits.distance_bit


def test_quantize_tie_is_strong(region, thresholds):
    ue = UserEquipment(distance=thresholds.d_th,
                       angle=region.theta_bar + thresholds.theta_th, fading_power=1.0)
    bits = quantize(ue, thresholds, region.theta_bar)
    assert bits.angle_bit and bits.distance_bit


def test_form_groups_empty(region, thresholds):
    for kind in (StrategyKind.TWO_BIT, StrategyKind.ONE_BIT_ANGLE,
                 StrategyKind.ONE_BIT_DISTANCE):
        groups = form_groups([], thresholds, kind, region.theta_bar)
        assert groups.strong == () and groups.weak == ()


def _random_deployment(region, n, seed):
    rng = np.random.default_rng(seed)
    model = DeploymentModel(density=n / region.area_measure)
    return sample_deployment(region, model, rng)


def test_one_bit_groups_partition(region, thresholds):
    deployment = _random_deployment(region, 40, 3)
    for kind in (StrategyKind.ONE_BIT_ANGLE, StrategyKind.ONE_BIT_DISTANCE):
        groups = form_groups(deployment, thresholds, kind, region.theta_bar)
        assert sorted(groups.strong + groups.weak) == list(range(len(deployment)))
        assert not set(groups.strong) & set(groups.weak)


def test_two_bit_strong_is_intersection(region, thresholds):
    deployment = _random_deployment(region, 60, 4)
    two_bit = form_groups(deployment, thresholds, StrategyKind.TWO_BIT, region.theta_bar)
    angle = form_groups(deployment, thresholds, StrategyKind.ONE_BIT_ANGLE, region.theta_bar)
    dist = form_groups(deployment, thresholds, StrategyKind.ONE_BIT_DISTANCE, region.theta_bar)
    assert set(two_bit.strong) == set(angle.strong) & set(dist.strong)
    assert set(two_bit.weak) == set(angle.weak) & set(dist.weak)
    quadrants = (set(two_bit.strong) | set(two_bit.weak)
                 | set(two_bit.sbar) | set(two_bit.wbar))
    assert quadrants == set(range(len(deployment)))


def test_decide_empty_deployment(region, thresholds):
    rng = np.random.default_rng(0)
    for kind in ALL_KINDS:
        decision = decide([], thresholds, kind, rng, region.theta_bar)
        assert decision.mode is DecisionMode.NO_TRANSMISSION


def test_decide_forced_two_bit_pair(region, thresholds):
    deployment = deployment_for_pattern((S2B, W2B), region, thresholds)
    decision = decide(deployment, thresholds, StrategyKind.TWO_BIT,
                      np.random.default_rng(1), region.theta_bar)
    assert decision.mode is DecisionMode.NOMA
    assert {decision.strong_idx, decision.weak_idx} == {0, 1}


def test_one_bit_never_silent_with_users(region, thresholds):
    for seed in range(30):
        deployment = _random_deployment(region, 3, seed)
        if not deployment:
            continue
        for kind in (StrategyKind.ONE_BIT_ANGLE, StrategyKind.ONE_BIT_DISTANCE):
            decision = decide(deployment, thresholds, kind,
                              np.random.default_rng(seed), region.theta_bar)
            assert decision.mode is not DecisionMode.NO_TRANSMISSION


def test_two_bit_may_be_silent_with_users(region, thresholds):
    deployment = deployment_for_pattern((SBAR, WBAR), region, thresholds)
    decision = decide(deployment, thresholds, StrategyKind.TWO_BIT,
                      np.random.default_rng(1), region.theta_bar)
    assert decision.mode is DecisionMode.NO_TRANSMISSION


def test_combined_inherits_two_bit_pairs(region, thresholds):
    # whenever the two-bit strategy can pair, the combined one pairs the same way
    for seed in range(60):
        deployment = _random_deployment(region, 8, seed)
        two_bit = decide(deployment, thresholds, StrategyKind.TWO_BIT,
                         np.random.default_rng(seed), region.theta_bar)
        if two_bit.mode is not DecisionMode.NOMA:
            continue
        for kind in (StrategyKind.COMBINED_ANGLE, StrategyKind.COMBINED_DISTANCE):
            combined = decide(deployment, thresholds, kind,
                              np.random.default_rng(seed), region.theta_bar)
            assert combined.mode is DecisionMode.NOMA
            assert combined.pairing_source is PairSource.TWO_BIT


def test_decide_deterministic(region, thresholds):
    deployment = _random_deployment(region, 12, 9)
    for kind in ALL_KINDS:
        a = decide(deployment, thresholds, kind, np.random.default_rng(321), region.theta_bar)
        b = decide(deployment, thresholds, kind, np.random.default_rng(321), region.theta_bar)
        assert a == b


def test_sinr_zero_gain(split):
    budget = LinkBudget(snr_linear=1e4)
    decision = TransmissionDecision.noma(0, 1, PairSource.TWO_BIT)
    report = sinr(decision, {0: 0.0, 1: 0.0}, budget, split)
    assert report.strong_decodes_weak == 0.0
    assert report.strong_own == 0.0
    assert report.weak_own == 0.0


def test_sinr_degenerate_split():
    budget = LinkBudget(snr_linear=100.0)
    split = PowerSplit.from_strong_fraction(0.0)
    decision = TransmissionDecision.noma(0, 1, PairSource.ONE_BIT)
    report = sinr(decision, {0: 2.0, 1: 3.0}, budget, split)
    assert report.strong_decodes_weak == pytest.approx(100.0 * 2.0 * 1.0)
    assert report.strong_own == 0.0
    assert report.weak_own == pytest.approx(100.0 * 3.0 * 1.0)


def test_sinr_high_snr_limit(split):
    # at huge SNR the weak-message SINR saturates at the power ratio 0.6/0.4
    budget = LinkBudget(snr_linear=1e30)
    decision = TransmissionDecision.noma(0, 1, PairSource.ONE_BIT)
    report = sinr(decision, {0: 1.0, 1: 1.0}, budget, split)
    assert report.strong_decodes_weak == pytest.approx(1.5, rel=1e-12)


def test_realized_rate_no_transmission(split, targets):
    budget = LinkBudget(snr_linear=1.0)
    assert realized_rate(TransmissionDecision.none(), {}, budget, split, targets) == 0.0


def test_realized_rate_infinite_gains(split, targets):
    budget = LinkBudget(snr_linear=10.0)
    decision = TransmissionDecision.noma(0, 1, PairSource.TWO_BIT)
    gains = {0: math.inf, 1: math.inf}
    assert realized_rate(decision, gains, budget, split, targets) == pytest.approx(9.0)


def test_realized_rate_hand_stepped_trace(region, thresholds, array64, split, targets):
    # one fixed deployment, every quantity reassembled from first principles
    deployment = [
        ue_in_quadrant(S2B, region, thresholds, fading=2.0),
        ue_in_quadrant(W2B, region, thresholds, fading=0.4),
    ]
    budget = LinkBudget(snr_linear=1e5)
    decision = decide(deployment, thresholds, StrategyKind.TWO_BIT,
                      np.random.default_rng(5), region.theta_bar)
    assert decision.mode is DecisionMode.NOMA
    gains = decision_gains(decision, deployment, array64, budget, region.theta_bar)
    rate = realized_rate(decision, gains, budget, split, targets)

    def kernel(theta):
        u = math.sin(region.theta_bar) - math.sin(theta)
        return (math.sin(math.pi * 64 * u / 2) / (64 * math.sin(math.pi * u / 2))) ** 2

    g_s = 2.0 * kernel(deployment[0].angle) / deployment[0].distance**2
    g_w = 0.4 * kernel(deployment[1].angle) / deployment[1].distance**2
    rho = 1e5
    ok_strong = (
        rho * g_s * 0.6 / (rho * g_s * 0.4 + 1) > 2**1 - 1
        and rho * g_s * 0.4 > 2**8 - 1
    )
    ok_weak = rho * g_w * 0.6 / (rho * g_w * 0.4 + 1) > 2**1 - 1
    assert rate == pytest.approx(ok_strong * 8.0 + ok_weak * 1.0)


def test_power_split_validation():
    with pytest.raises(ValueError):
        PowerSplit(beta_sq_strong=0.6, beta_sq_weak=0.4)
    with pytest.raises(ValueError):
        PowerSplit(beta_sq_strong=0.5, beta_sq_weak=0.6)
    split = PowerSplit.from_strong_fraction(0.4)
    assert split.beta_sq_weak == pytest.approx(0.6)


def test_target_rate_thresholds(targets):
    assert targets.eps_strong == 255.0
    assert targets.eps_weak == 1.0
    assert targets.eps_sut == 255.0
