"""Shared test utilities: quadrant point factories and the twelve
no-two-bit-pair deployment scenarios with their expected combined-strategy
outcomes."""

from mmwnoma import QuadrantLabel, UserEquipment
from mmwnoma.strategy import DecisionMode, PairSource, SutSource


def ue_in_quadrant(label, region, thresholds, fading=1.0):
    """A user placed well inside the requested feedback quadrant."""
    tb = region.theta_bar
    in_beam_angle = tb + 0.5 * thresholds.theta_th
    out_beam_angle = tb + 0.5 * (thresholds.theta_th + region.half_angle)
    near = 0.5 * (region.d_min + thresholds.d_th)
    far = 0.5 * (thresholds.d_th + region.d_max)
    position = {
        QuadrantLabel.STRONG_TWO_BIT: (near, in_beam_angle),
        QuadrantLabel.WEAK_TWO_BIT: (far, out_beam_angle),
        QuadrantLabel.STRONG_BAR: (near, out_beam_angle),
        QuadrantLabel.WEAK_BAR: (far, in_beam_angle),
    }[label]
    return UserEquipment(distance=position[0], angle=position[1], fading_power=fading)


S2B = QuadrantLabel.STRONG_TWO_BIT
W2B = QuadrantLabel.WEAK_TWO_BIT
SBAR = QuadrantLabel.STRONG_BAR
WBAR = QuadrantLabel.WEAK_BAR

# The twelve deployment patterns without a two-bit pair.  Each row:
# (occupied quadrants, combined-angle expectation, combined-distance
# expectation), where an expectation is either ("noma",), ("sut", source)
# or ("none",).
TABLE_ONE = [
    ((), ("none",), ("none",)),
    ((WBAR,), ("sut", SutSource.STRONG_ONE_BIT), ("sut", SutSource.WEAK_ONE_BIT)),
    ((SBAR,), ("sut", SutSource.WEAK_ONE_BIT), ("sut", SutSource.STRONG_ONE_BIT)),
    ((SBAR, WBAR), ("noma",), ("noma",)),
    ((W2B,), ("sut", SutSource.WEAK_ONE_BIT), ("sut", SutSource.WEAK_ONE_BIT)),
    ((W2B, WBAR), ("noma",), ("sut", SutSource.WEAK_ONE_BIT)),
    ((W2B, SBAR), ("sut", SutSource.WEAK_ONE_BIT), ("noma",)),
    ((W2B, SBAR, WBAR), ("noma",), ("noma",)),
    ((S2B,), ("sut", SutSource.STRONG_TWO_BIT), ("sut", SutSource.STRONG_TWO_BIT)),
    ((S2B, WBAR), ("sut", SutSource.STRONG_TWO_BIT), ("noma",)),
    ((S2B, SBAR), ("noma",), ("sut", SutSource.STRONG_TWO_BIT)),
    ((S2B, SBAR, WBAR), ("noma",), ("noma",)),
]


def deployment_for_pattern(quadrants, region, thresholds):
    return [ue_in_quadrant(label, region, thresholds) for label in quadrants]


def matches_expectation(decision, expectation):
    if expectation[0] == "none":
        return decision.mode is DecisionMode.NO_TRANSMISSION
    if expectation[0] == "noma":
        return (decision.mode is DecisionMode.NOMA
                and decision.pairing_source is PairSource.ONE_BIT)
    return decision.mode is DecisionMode.SUT and decision.sut_source is expectation[1]
