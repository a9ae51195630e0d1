"""Feedback quantization, user grouping, pairing decisions, and realized rates.

Every transmission strategy reduces to the same pipeline: quantize each
user's position into feedback bits, form strong/weak groups, try to pair a
strong with a weak user (two-bit first for the combined strategies), and
fall back to single-user transmission along a fixed search order.  Ties at
a threshold classify as strong.
"""

import math
from dataclasses import dataclass
from enum import Enum

from .channel import effective_gain


class StrategyKind(Enum):
    ONE_BIT_ANGLE = "1B-A"
    ONE_BIT_DISTANCE = "1B-D"
    TWO_BIT = "2B"
    COMBINED_ANGLE = "C-A"
    COMBINED_DISTANCE = "C-D"

    @property
    def is_combined(self):
        return self in (StrategyKind.COMBINED_ANGLE, StrategyKind.COMBINED_DISTANCE)

    @property
    def one_bit_base(self):
        """The one-bit flavour a combined strategy falls back to."""
        if self is StrategyKind.COMBINED_ANGLE:
            return StrategyKind.ONE_BIT_ANGLE
        if self is StrategyKind.COMBINED_DISTANCE:
            return StrategyKind.ONE_BIT_DISTANCE
        raise ValueError(f"{self} has no one-bit base")


class QuadrantLabel(Enum):
    """Partition of the sector by the two feedback bits."""

    STRONG_TWO_BIT = "S2B"   # in-beam and near
    WEAK_TWO_BIT = "W2B"     # out-of-beam and far
    STRONG_BAR = "SBAR"      # out-of-beam and near
    WEAK_BAR = "WBAR"        # in-beam and far


@dataclass(frozen=True)
class FeedbackBits:
    angle_bit: bool
    distance_bit: bool

    @property
    def quadrant(self):
        if self.angle_bit and self.distance_bit:
            return QuadrantLabel.STRONG_TWO_BIT
        if not self.angle_bit and not self.distance_bit:
            return QuadrantLabel.WEAK_TWO_BIT
        if self.distance_bit:
            return QuadrantLabel.STRONG_BAR
        return QuadrantLabel.WEAK_BAR


def quantize(ue, thresholds, theta_bar):
    """Two feedback bits: angle_bit = |theta_bar - theta| <= theta_th,
    distance_bit = d <= d_th (boundary equality counts as strong)."""
    return FeedbackBits(
        angle_bit=abs(theta_bar - ue.angle) <= thresholds.theta_th,
        distance_bit=ue.distance <= thresholds.d_th,
    )


def quadrant_masses(p_theta, p_d):
    """Probability mass of each quadrant for a uniform user."""
    return {
        QuadrantLabel.STRONG_TWO_BIT: p_theta * p_d,
        QuadrantLabel.WEAK_TWO_BIT: (1.0 - p_theta) * (1.0 - p_d),
        QuadrantLabel.STRONG_BAR: p_d * (1.0 - p_theta),
        QuadrantLabel.WEAK_BAR: p_theta * (1.0 - p_d),
    }


@dataclass(frozen=True)
class GroupSets:
    """Strong/weak index tuples; two-bit grouping also exposes the two
    leftover quadrants (near-but-out-of-beam, in-beam-but-far)."""

    strong: tuple
    weak: tuple
    sbar: tuple = None
    wbar: tuple = None


def form_groups(deployment, thresholds, kind, theta_bar):
    """Strong/weak groups for the requested feedback type.

    One-bit groups partition the deployment; the two-bit strong/weak pair
    leaves the two mixed quadrants out (returned separately).
    """
    bits = [quantize(ue, thresholds, theta_bar) for ue in deployment]
    if kind is StrategyKind.ONE_BIT_ANGLE:
        strong = tuple(i for i, b in enumerate(bits) if b.angle_bit)
        weak = tuple(i for i, b in enumerate(bits) if not b.angle_bit)
        return GroupSets(strong=strong, weak=weak)
    if kind is StrategyKind.ONE_BIT_DISTANCE:
        strong = tuple(i for i, b in enumerate(bits) if b.distance_bit)
        weak = tuple(i for i, b in enumerate(bits) if not b.distance_bit)
        return GroupSets(strong=strong, weak=weak)
    if kind is StrategyKind.TWO_BIT:
        by_quadrant = {label: [] for label in QuadrantLabel}
        for i, b in enumerate(bits):
            by_quadrant[b.quadrant].append(i)
        return GroupSets(
            strong=tuple(by_quadrant[QuadrantLabel.STRONG_TWO_BIT]),
            weak=tuple(by_quadrant[QuadrantLabel.WEAK_TWO_BIT]),
            sbar=tuple(by_quadrant[QuadrantLabel.STRONG_BAR]),
            wbar=tuple(by_quadrant[QuadrantLabel.WEAK_BAR]),
        )
    raise ValueError(f"form_groups is defined for elementary kinds, got {kind}")


class DecisionMode(Enum):
    NOMA = "noma"
    SUT = "sut"
    NO_TRANSMISSION = "none"


class PairSource(Enum):
    TWO_BIT = "2B"
    ONE_BIT = "1B"


class SutSource(Enum):
    STRONG = "S"                 # one-bit / two-bit strong group
    WEAK = "W"                   # one-bit / two-bit weak group
    STRONG_TWO_BIT = "S2B"       # combined: first stop of the search order
    STRONG_ONE_BIT = "S1B"       # combined: one-bit strong group
    WEAK_ONE_BIT = "W1B"         # combined: one-bit weak group


@dataclass(frozen=True)
class TransmissionDecision:
    mode: DecisionMode
    strong_idx: int = None
    weak_idx: int = None
    pairing_source: PairSource = None
    sut_idx: int = None
    sut_source: SutSource = None

    @classmethod
    def noma(cls, strong_idx, weak_idx, source):
        if strong_idx == weak_idx:
            raise ValueError("NOMA pair must consist of two distinct users")
        return cls(mode=DecisionMode.NOMA, strong_idx=strong_idx,
                   weak_idx=weak_idx, pairing_source=source)

    @classmethod
    def sut(cls, idx, source):
        return cls(mode=DecisionMode.SUT, sut_idx=idx, sut_source=source)

    @classmethod
    def none(cls):
        return cls(mode=DecisionMode.NO_TRANSMISSION)


def _choose(indices, rng):
    if len(indices) == 1:
        return indices[0]
    return indices[int(rng.integers(len(indices)))]


def decide(deployment, thresholds, kind, rng, theta_bar):
    """Run one strategy on one deployment.

    Elementary kinds pair one uniformly random user from each nonempty
    strong/weak group, else fall back to SUT searching strong then weak.
    Combined kinds try the two-bit pairing, then the one-bit pairing, then
    SUT along strong-two-bit -> strong-one-bit -> weak-one-bit; only an
    empty deployment yields no transmission there.
    """
    if kind.is_combined:
        two_bit = form_groups(deployment, thresholds, StrategyKind.TWO_BIT, theta_bar)
        one_bit = form_groups(deployment, thresholds, kind.one_bit_base, theta_bar)
        if two_bit.strong and two_bit.weak:
            return TransmissionDecision.noma(
                _choose(two_bit.strong, rng), _choose(two_bit.weak, rng),
                PairSource.TWO_BIT)
        if one_bit.strong and one_bit.weak:
            return TransmissionDecision.noma(
                _choose(one_bit.strong, rng), _choose(one_bit.weak, rng),
                PairSource.ONE_BIT)
        for group, source in (
            (two_bit.strong, SutSource.STRONG_TWO_BIT),
            (one_bit.strong, SutSource.STRONG_ONE_BIT),
            (one_bit.weak, SutSource.WEAK_ONE_BIT),
        ):
            if group:
                return TransmissionDecision.sut(_choose(group, rng), source)
        return TransmissionDecision.none()

    groups = form_groups(deployment, thresholds, kind, theta_bar)
    if groups.strong and groups.weak:
        src = PairSource.TWO_BIT if kind is StrategyKind.TWO_BIT else PairSource.ONE_BIT
        return TransmissionDecision.noma(
            _choose(groups.strong, rng), _choose(groups.weak, rng), src)
    for group, source in ((groups.strong, SutSource.STRONG), (groups.weak, SutSource.WEAK)):
        if group:
            return TransmissionDecision.sut(_choose(group, rng), source)
    return TransmissionDecision.none()


@dataclass(frozen=True)
class PowerSplit:
    """Power fractions beta^2 for the NOMA pair; the weak user gets more."""

    beta_sq_strong: float
    beta_sq_weak: float

    def __post_init__(self):
        if self.beta_sq_strong < 0 or self.beta_sq_weak <= 0:
            raise ValueError("power fractions must be nonnegative (weak strictly positive)")
        if abs(self.beta_sq_strong + self.beta_sq_weak - 1.0) > 1e-12:
            raise ValueError("power fractions must sum to 1")
        if self.beta_sq_weak < self.beta_sq_strong:
            raise ValueError("weak user must receive at least the strong user's power")

    @classmethod
    def from_strong_fraction(cls, beta_sq_strong):
        return cls(beta_sq_strong=beta_sq_strong, beta_sq_weak=1.0 - beta_sq_strong)


@dataclass(frozen=True)
class TargetRates:
    """QoS targets in bps/Hz with the matching SINR thresholds 2^R - 1."""

    r_strong: float
    r_weak: float
    r_sut: float

    def __post_init__(self):
        for name in ("r_strong", "r_weak", "r_sut"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")

    @property
    def eps_strong(self):
        return 2.0**self.r_strong - 1.0

    @property
    def eps_weak(self):
        return 2.0**self.r_weak - 1.0

    @property
    def eps_sut(self):
        return 2.0**self.r_sut - 1.0


@dataclass(frozen=True)
class NomaSinr:
    strong_decodes_weak: float
    strong_own: float
    weak_own: float


@dataclass(frozen=True)
class SutSinr:
    snr: float


def _weak_message_sinr(gain, rho, split):
    """rho g bW^2 / (rho g bS^2 + 1), with the exact beta-ratio limit at g = inf."""
    if math.isinf(gain):
        return split.beta_sq_weak / split.beta_sq_strong if split.beta_sq_strong > 0 else math.inf
    x = rho * gain
    return x * split.beta_sq_weak / (x * split.beta_sq_strong + 1.0)


def sinr(decision, gains, budget, split):
    """Per-user SINRs for a scheduled decision.

    ``gains`` maps user index to effective channel gain.  The strong user
    decodes the weak message with interference from its own, then its own
    message interference-free after cancellation; the weak user decodes its
    own message treating the strong one as noise.  SUT sees a plain SNR.
    """
    rho = budget.snr_linear
    if decision.mode is DecisionMode.NOMA:
        g_s = gains[decision.strong_idx]
        g_w = gains[decision.weak_idx]
        return NomaSinr(
            strong_decodes_weak=_weak_message_sinr(g_s, rho, split),
            strong_own=rho * g_s * split.beta_sq_strong,
            weak_own=_weak_message_sinr(g_w, rho, split),
        )
    if decision.mode is DecisionMode.SUT:
        return SutSinr(snr=rho * gains[decision.sut_idx])
    raise ValueError("no SINR is defined without a transmission")


def realized_rate(decision, gains, budget, split, targets):
    """Sum of target rates over the users that are not in outage.

    The strong NOMA user earns its target only if it clears both the weak
    message and its own; the weak user needs only its own; the SUT user
    needs the instantaneous rate to exceed the SUT target.
    """
    if decision.mode is DecisionMode.NO_TRANSMISSION:
        return 0.0
    report = sinr(decision, gains, budget, split)
    if decision.mode is DecisionMode.NOMA:
        rate = 0.0
        if (report.strong_decodes_weak > targets.eps_weak
                and report.strong_own > targets.eps_strong):
            rate += targets.r_strong
        if report.weak_own > targets.eps_weak:
            rate += targets.r_weak
        return rate
    return targets.r_sut if report.snr > targets.eps_sut else 0.0


def decision_gains(decision, deployment, array, budget, theta_bar):
    """Effective gains for exactly the users a decision schedules."""
    if decision.mode is DecisionMode.NOMA:
        idx = (decision.strong_idx, decision.weak_idx)
    elif decision.mode is DecisionMode.SUT:
        idx = (decision.sut_idx,)
    else:
        return {}
    return {
        i: effective_gain(deployment[i], array, budget, theta_bar) for i in idx
    }
