"""Closed-form / numerical analysis: gain CDFs, outage, occurrence, hybrid rates.

The conditional CDF of the effective channel gain over any sector
sub-region is

    F(x) = (1/xi) * I I (1 - exp(-PL(r) x / (F_M(theta_bar, theta) sigma^2))) r dr dtheta

with xi the r-dr-dtheta measure of the region.  There is no closed form
(the kernel blocks it), so the integral is evaluated by composite
Gauss-Legendre quadrature with the angular domain split at the kernel
nulls, plus a node-doubling pass that guards the configured tolerance.

Occurrence probabilities of the NOMA/SUT/no-transmission branches follow
from the independence of the per-quadrant Poisson counts.  Note that the
strong-group SUT weight for two-bit feedback is

    exp(-mu p_other) - exp(-mu (p_strong + p_other))

(the first exponent carries the mass of the *other* pairing group, not the
complement of the own group); this is the form the finite-sum enumeration
and the partition identity force, and the one every simulation here
reproduces.

Hybrid sum rates compose occurrence weights with *conditional* branch
rates.  For the combined strategies the conditional laws are resolved per
deployment scenario: e.g. when the strong two-bit quadrant is empty, the
one-bit-angle pairing draws its strong user from the in-beam-but-far
quadrant, not from the whole in-beam strip, and the composition accounts
for that exactly.
"""

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import gammainc
from scipy.stats import poisson

from .channel import fejer_kernel
from .strategy import QuadrantLabel, StrategyKind

BRANCH_NOMA = "noma"
BRANCH_SUT_STRONG = "sut_strong"
BRANCH_SUT_WEAK = "sut_weak"
BRANCH_NONE = "none"
BRANCH_NOMA_TWO_BIT = "noma_two_bit"
BRANCH_NOMA_ONE_BIT = "noma_one_bit"
BRANCH_SUT_STRONG_TWO_BIT = "sut_strong_two_bit"
BRANCH_SUT_STRONG_ONE_BIT = "sut_strong_one_bit"
BRANCH_SUT_WEAK_ONE_BIT = "sut_weak_one_bit"

PLAIN_BRANCHES = (BRANCH_NOMA, BRANCH_SUT_STRONG, BRANCH_SUT_WEAK, BRANCH_NONE)
COMBINED_BRANCHES = (
    BRANCH_NOMA_TWO_BIT,
    BRANCH_NOMA_ONE_BIT,
    BRANCH_SUT_STRONG_TWO_BIT,
    BRANCH_SUT_STRONG_ONE_BIT,
    BRANCH_SUT_WEAK_ONE_BIT,
    BRANCH_NONE,
)


class Group(Enum):
    STRONG = "S"
    WEAK = "W"


class Feedback(Enum):
    TWO_BIT = "2B"
    ANGLE = "A"
    DISTANCE = "D"


_KIND_FEEDBACK = {
    StrategyKind.TWO_BIT: Feedback.TWO_BIT,
    StrategyKind.ONE_BIT_ANGLE: Feedback.ANGLE,
    StrategyKind.ONE_BIT_DISTANCE: Feedback.DISTANCE,
}


class QuadratureError(RuntimeError):
    """Node doubling moved the integral by more than the tolerance."""


@dataclass(frozen=True)
class QuadratureConfig:
    """Angular Gauss-Legendre panels with an exact radial factor.

    ``nodes_radial`` only matters with ``exact_radial=False``, which swaps
    the incomplete-gamma radial integral for tensor Gauss-Legendre (kept as
    a cross-check; it needs far more nodes for the same accuracy at small
    gain arguments).  ``verify`` runs one node-doubling pass and raises if
    any value moves by more than the relative tolerance.
    """

    nodes_radial: int = 256
    nodes_angular: int = 256
    refinement_tolerance: float = 1e-6
    verify: bool = True
    exact_radial: bool = True

    def __post_init__(self):
        if self.nodes_radial < 8 or self.nodes_angular < 8:
            raise ValueError("quadrature needs at least 8 nodes per axis")
        if self.refinement_tolerance <= 0:
            raise ValueError("refinement_tolerance must be > 0")


@dataclass(frozen=True)
class CdfSpec:
    """Integration region of one conditional gain CDF.

    ``angular_intervals`` are absolute angles; ``xi`` is the region's
    r-dr-dtheta measure and normalizes the CDF.
    """

    label: str
    radial_interval: tuple
    angular_intervals: tuple
    theta_bar: float

    def __post_init__(self):
        lo, hi = self.radial_interval
        if hi < lo or lo < 0:
            raise ValueError(f"bad radial interval {self.radial_interval}")
        for a, b in self.angular_intervals:
            if b < a:
                raise ValueError(f"bad angular interval ({a}, {b})")
        if self.xi <= 0.0:
            raise ValueError(f"region '{self.label}' has zero measure")

    @property
    def xi(self):
        lo, hi = self.radial_interval
        width = sum(b - a for a, b in self.angular_intervals)
        return width * (hi**2 - lo**2) / 2.0


def cdf_spec(group, feedback, region, thresholds):
    """The six named regions: strong/weak under two-bit, angle, distance."""
    tb = region.theta_bar
    th = thresholds.theta_th
    half = region.half_angle
    if feedback is Feedback.ANGLE:
        radial = (region.d_min, region.d_max)
    elif group is Group.STRONG:
        radial = (region.d_min, thresholds.d_th)
    else:
        radial = (thresholds.d_th, region.d_max)
    if feedback is Feedback.DISTANCE:
        angular = ((tb - half, tb + half),)
    elif group is Group.STRONG:
        angular = ((tb - th, tb + th),)
    else:
        angular = ((tb - half, tb - th), (tb + th, tb + half))
    return CdfSpec(
        label=f"{group.value},{feedback.value}",
        radial_interval=radial,
        angular_intervals=angular,
        theta_bar=tb,
    )


def quadrant_cdf_spec(label, region, thresholds):
    """Conditional-gain region of one feedback quadrant."""
    tb = region.theta_bar
    th = thresholds.theta_th
    half = region.half_angle
    in_beam = ((tb - th, tb + th),)
    out_beam = ((tb - half, tb - th), (tb + th, tb + half))
    near = (region.d_min, thresholds.d_th)
    far = (thresholds.d_th, region.d_max)
    regions = {
        QuadrantLabel.STRONG_TWO_BIT: (near, in_beam),
        QuadrantLabel.WEAK_TWO_BIT: (far, out_beam),
        QuadrantLabel.STRONG_BAR: (near, out_beam),
        QuadrantLabel.WEAK_BAR: (far, in_beam),
    }
    radial, angular = regions[label]
    return CdfSpec(label=label.value, radial_interval=radial,
                   angular_intervals=angular, theta_bar=tb)


@lru_cache(maxsize=64)
def _gauss_nodes(n):
    return np.polynomial.legendre.leggauss(n)


def _kernel_nulls(lo, hi, theta_bar, num_elements):
    pts = []
    sb = math.sin(theta_bar)
    for k in range(-num_elements, num_elements + 1):
        if k == 0:
            continue
        v = sb - 2.0 * k / num_elements
        if -1.0 <= v <= 1.0:
            t = math.asin(v)
            if lo < t < hi:
                pts.append(t)
    return pts


def _angular_panels(lo, hi, theta_bar, num_elements, levels=3, shrink=1e-2):
    """Panel boundaries for one angular interval.

    Base panels split at the kernel nulls and the beam peak; around each
    null the integrand develops a boundary layer whose width shrinks with
    the gain argument, so the null-adjacent panels are refined
    geometrically (``levels`` nested panels shrinking by ``shrink``).
    """
    nulls = _kernel_nulls(lo, hi, theta_bar, num_elements)
    base = [lo, hi] + nulls
    sb = math.sin(theta_bar)
    if -1.0 <= sb <= 1.0:
        peak = math.asin(sb)
        if lo < peak < hi:
            base.append(peak)
    base = np.unique(np.asarray(base, dtype=float))
    pts = list(base)
    null_set = set(nulls)
    for a, b in zip(base[:-1], base[1:]):
        width = b - a
        for level in range(1, levels + 1):
            offset = width * shrink**level
            if a in null_set:
                pts.append(a + offset)
            if b in null_set:
                pts.append(b - offset)
    return np.unique(np.asarray(pts, dtype=float))


def _angular_grid(spec, array, na):
    """Concatenated Gauss-Legendre nodes/weights over all refined panels."""
    xa, wa = _gauss_nodes(na)
    nodes, weights = [], []
    for lo, hi in spec.angular_intervals:
        if hi <= lo:
            continue
        brk = _angular_panels(lo, hi, spec.theta_bar, array.num_elements)
        for a, b in zip(brk[:-1], brk[1:]):
            nodes.append(0.5 * (b - a) * xa + 0.5 * (b + a))
            weights.append(0.5 * (b - a) * wa)
    return np.concatenate(nodes), np.concatenate(weights)


def _radial_factor(c, rlo, rhi, gamma):
    """Exact integral of (1 - exp(-c r^gamma)) r dr over [rlo, rhi].

    Uses the incomplete-gamma closed form, with a short series branch for
    small c r^gamma where the closed form would cancel catastrophically.
    ``c`` may contain +inf (kernel nulls), where the integrand saturates.
    """
    c = np.asarray(c, dtype=float)
    half_span = (rhi**2 - rlo**2) / 2.0
    if gamma == 0.0:
        return half_span * -np.expm1(-c)
    s = 2.0 / gamma
    u_hi = c * rhi**gamma
    u_lo = c * rlo**gamma if rlo > 0.0 else np.zeros_like(c)
    out = np.full(c.shape, half_span)
    finite = np.isfinite(c)
    small = finite & (u_hi < 1e-3)
    large = finite & ~small
    if np.any(small):
        cs = c[small]
        acc = np.zeros_like(cs)
        c_pow = cs.copy()
        sign = 1.0
        fact = 1.0
        for k in range(1, 9):
            moment = (rhi**(k * gamma + 2) - rlo**(k * gamma + 2)) / (k * gamma + 2)
            acc += sign * c_pow * moment / fact
            c_pow = c_pow * cs
            sign = -sign
            fact *= k + 1
        out[small] = acc
    if np.any(large):
        cl = c[large]
        tail = (gamma_fn(s) / gamma) * cl**(-s) * (
            gammainc(s, u_hi[large]) - gammainc(s, u_lo[large]))
        out[large] = half_span - tail
    return out


def _integrate(xs, spec, array, budget, nr, na, exact_radial=True):
    """CDF-integral values (not yet normalized) for a vector of arguments."""
    theta, w_theta = _angular_grid(spec, array, na)
    kernel = fejer_kernel(array, spec.theta_bar, theta)
    with np.errstate(divide="ignore"):
        inv = np.where(kernel > 0.0, 1.0 / (budget.fading_variance * kernel), np.inf)
    rlo, rhi = spec.radial_interval
    gamma = budget.path_loss_exponent
    if exact_radial:
        with np.errstate(invalid="ignore", over="ignore"):
            c = inv[:, None] * xs[None, :]
        vals = _radial_factor(c, rlo, rhi, gamma)
        return w_theta @ vals
    xr, wr = _gauss_nodes(nr)
    r = 0.5 * (rhi - rlo) * xr + 0.5 * (rhi + rlo)
    wr_s = 0.5 * (rhi - rlo) * wr * r          # radial weight carries the Jacobian
    rg = r**gamma
    with np.errstate(over="ignore", invalid="ignore"):
        # exponent clamped at 700: beyond that 1 - exp(-E) is exactly 1
        expo = np.minimum(rg[:, None, None] * inv[None, :, None] * xs[None, None, :],
                          700.0)
    vals = -np.expm1(-expo)
    return np.einsum("i,j,ijk->k", wr_s, w_theta, vals)


def ecg_cdf(x, spec, array, budget, quad=QuadratureConfig()):
    """Conditional CDF of the effective channel gain over ``spec``'s region.

    Accepts a scalar or an array of gain arguments (must be >= 0).  Results
    are clamped to [0, 1].  With ``quad.verify`` a node-doubling pass runs
    and a QuadratureError is raised if the refinement moves any value by
    more than the configured relative tolerance.
    """
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs < 0):
        raise ValueError("gain argument must be nonnegative")
    out = np.zeros_like(xs)
    finite = np.isfinite(xs) & (xs > 0)
    out[np.isinf(xs)] = 1.0
    if np.any(finite):
        xf = xs[finite]
        coarse = _integrate(xf, spec, array, budget, quad.nodes_radial,
                            quad.nodes_angular, quad.exact_radial)
        if quad.verify:
            fine = _integrate(xf, spec, array, budget, 2 * quad.nodes_radial,
                              2 * quad.nodes_angular, quad.exact_radial)
            delta = np.abs(fine - coarse)
            bound = quad.refinement_tolerance * np.abs(fine) + 1e-15
            if np.any(delta > bound):
                worst = float(np.max(delta / np.maximum(np.abs(fine), 1e-300)))
                raise QuadratureError(
                    f"node doubling moved the CDF by a relative {worst:.3e} "
                    f"(> {quad.refinement_tolerance:.1e}) for region '{spec.label}'")
            coarse = fine
        out[finite] = np.clip(coarse / spec.xi, 0.0, 1.0)
    if scalar:
        return float(out[0])
    return out


def noma_thresholds(split, targets):
    """Gain thresholds (eta_W, eta_S) that the pair must clear, scaled by 1/rho.

    eta_W = eps_W / (bW^2 - eps_W bS^2); if that denominator is not
    positive the weak user's condition is unsatisfiable at any gain and
    both outage probabilities are 1.  eta_S = eps_S / bS^2 reflects the
    interference-free strong-own SINR after cancellation.
    """
    den = split.beta_sq_weak - targets.eps_weak * split.beta_sq_strong
    eta_w = targets.eps_weak / den if den > 0 else math.inf
    eta_s = (targets.eps_strong / split.beta_sq_strong
             if split.beta_sq_strong > 0 else math.inf)
    return eta_w, eta_s


def noma_outage(spec_strong, spec_weak, array, budget, split, targets,
                quad=QuadratureConfig()):
    """(P_strong, P_weak) outage probabilities of a NOMA pair drawn from the
    two regions; both are 1 when the weak target is unsatisfiable."""
    eta_w, eta_s = noma_thresholds(split, targets)
    if math.isinf(eta_w):
        return 1.0, 1.0
    rho = budget.snr_linear
    p_strong = ecg_cdf(max(eta_w, eta_s) / rho, spec_strong, array, budget, quad)
    p_weak = ecg_cdf(eta_w / rho, spec_weak, array, budget, quad)
    return p_strong, p_weak


def sut_outage(spec, array, budget, targets, quad=QuadratureConfig()):
    """Outage probability of a single scheduled user from ``spec``'s region."""
    return ecg_cdf(targets.eps_sut / budget.snr_linear, spec, array, budget, quad)


# ---------------------------------------------------------------------------
# occurrence probabilities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OccurrenceProbs:
    """Closed-form branch probabilities for every strategy at one
    (mu, p_theta, p_d) point."""

    p_noma_2b: float
    p_sut_s_2b: float
    p_sut_w_2b: float
    p_no_2b: float
    p_noma_a: float
    p_sut_s_a: float
    p_sut_w_a: float
    p_noma_d: float
    p_sut_s_d: float
    p_sut_w_d: float
    p_cnoma_a: float
    p_csut_s2b_a: float
    p_csut_s_a: float
    p_csut_w_a: float
    p_cnoma_d: float
    p_csut_s2b_d: float
    p_csut_s_d: float
    p_csut_w_d: float
    p_no: float


def occurrence_table(mu, p_theta, p_d):
    """Evaluate every closed form at once.

    The two-bit SUT terms use exp(-mu p_other) - exp(-mu(p_S + p_W)); the
    one-bit and combined terms are the standard Poisson-voiding forms.
    """
    if mu <= 0:
        raise ValueError("mu must be > 0")
    if not (0 <= p_theta <= 1 and 0 <= p_d <= 1):
        raise ValueError("membership probabilities must lie in [0, 1]")
    e = math.exp
    q_s2b = p_theta * p_d
    q_w2b = (1 - p_theta) * (1 - p_d)
    pair_mass = q_s2b + q_w2b
    p_noma_2b = 1 + e(-mu * pair_mass) - e(-mu * q_s2b) - e(-mu * q_w2b)
    p_sut_s_2b = e(-mu * q_w2b) - e(-mu * pair_mass)
    p_sut_w_2b = e(-mu * q_s2b) - e(-mu * pair_mass)
    p_no_2b = e(-mu * pair_mass)

    def one_bit(p_s):
        p_w = 1 - p_s
        return (
            1 + e(-mu) - e(-mu * p_s) - e(-mu * p_w),
            e(-mu * p_w) - e(-mu),
            e(-mu * p_s) - e(-mu),
        )

    def combined(p_s):
        p_cnoma = (e(-mu) - e(-mu * (1 - p_s)) - e(-mu * p_s)
                   - e(-mu * pair_mass) + e(-mu * q_s2b) + e(-mu * q_w2b))
        p_csut_s2b = e(-mu * (1 - p_s)) - e(-mu * (1 - p_s + q_s2b))
        p_csut_s = e(-mu * (1 - p_s + q_s2b)) - e(-mu)
        p_csut_w = e(-mu * p_s) - e(-mu)
        return p_cnoma, p_csut_s2b, p_csut_s, p_csut_w

    na, sa, wa = one_bit(p_theta)
    nd, sd, wd = one_bit(p_d)
    cna, cs2a, csa, cwa = combined(p_theta)
    cnd, cs2d, csd, cwd = combined(p_d)
    return OccurrenceProbs(
        p_noma_2b=p_noma_2b, p_sut_s_2b=p_sut_s_2b, p_sut_w_2b=p_sut_w_2b,
        p_no_2b=p_no_2b,
        p_noma_a=na, p_sut_s_a=sa, p_sut_w_a=wa,
        p_noma_d=nd, p_sut_s_d=sd, p_sut_w_d=wd,
        p_cnoma_a=cna, p_csut_s2b_a=cs2a, p_csut_s_a=csa, p_csut_w_a=cwa,
        p_cnoma_d=cnd, p_csut_s2b_d=cs2d, p_csut_s_d=csd, p_csut_w_d=cwd,
        p_no=e(-mu),
    )


def occurrence(kind, mu, p_theta, p_d):
    """Branch-probability partition (sums to 1) for the requested strategy."""
    t = occurrence_table(mu, p_theta, p_d)
    if kind is StrategyKind.TWO_BIT:
        return {
            BRANCH_NOMA: t.p_noma_2b,
            BRANCH_SUT_STRONG: t.p_sut_s_2b,
            BRANCH_SUT_WEAK: t.p_sut_w_2b,
            BRANCH_NONE: t.p_no_2b,
        }
    if kind is StrategyKind.ONE_BIT_ANGLE:
        return {
            BRANCH_NOMA: t.p_noma_a,
            BRANCH_SUT_STRONG: t.p_sut_s_a,
            BRANCH_SUT_WEAK: t.p_sut_w_a,
            BRANCH_NONE: t.p_no,
        }
    if kind is StrategyKind.ONE_BIT_DISTANCE:
        return {
            BRANCH_NOMA: t.p_noma_d,
            BRANCH_SUT_STRONG: t.p_sut_s_d,
            BRANCH_SUT_WEAK: t.p_sut_w_d,
            BRANCH_NONE: t.p_no,
        }
    if kind is StrategyKind.COMBINED_ANGLE:
        return {
            BRANCH_NOMA_TWO_BIT: t.p_noma_2b,
            BRANCH_NOMA_ONE_BIT: t.p_cnoma_a,
            BRANCH_SUT_STRONG_TWO_BIT: t.p_csut_s2b_a,
            BRANCH_SUT_STRONG_ONE_BIT: t.p_csut_s_a,
            BRANCH_SUT_WEAK_ONE_BIT: t.p_csut_w_a,
            BRANCH_NONE: t.p_no,
        }
    if kind is StrategyKind.COMBINED_DISTANCE:
        return {
            BRANCH_NOMA_TWO_BIT: t.p_noma_2b,
            BRANCH_NOMA_ONE_BIT: t.p_cnoma_d,
            BRANCH_SUT_STRONG_TWO_BIT: t.p_csut_s2b_d,
            BRANCH_SUT_STRONG_ONE_BIT: t.p_csut_s_d,
            BRANCH_SUT_WEAK_ONE_BIT: t.p_csut_w_d,
            BRANCH_NONE: t.p_no,
        }
    raise ValueError(f"unknown strategy kind {kind}")


def _mixture_weight_strong(mu_primary, mu_secondary, tail=1e-15):
    """E[a / (a + b)] with a ~ Poisson(mu_primary) conditioned on a >= 1 and
    b ~ Poisson(mu_secondary): the chance the uniformly picked strong user
    comes from the primary quadrant."""
    a_hi = max(4, int(poisson.ppf(1 - tail, mu_primary)) + 2)
    b_hi = max(4, int(poisson.ppf(1 - tail, mu_secondary)) + 2)
    a = np.arange(1, a_hi + 1)
    b = np.arange(0, b_hi + 1)
    pa = poisson.pmf(a, mu_primary) / (1.0 - math.exp(-mu_primary))
    pb = poisson.pmf(b, mu_secondary)
    frac = a[:, None] / (a[:, None] + b[None, :])
    return float(pa @ frac @ pb)


@dataclass(frozen=True)
class RateReport:
    """Hybrid sum rate with its per-branch decomposition.

    ``weights`` are the occurrence probabilities, ``branch_rates`` the
    conditional rates per branch, ``outages`` the outage probabilities that
    entered them; the hybrid equals the weight-rate dot product.
    """

    kind: StrategyKind
    hybrid: float
    weights: dict
    branch_rates: dict
    outages: dict

    @property
    def rate_noma(self):
        keys = [k for k in self.branch_rates if k.startswith("noma")]
        w = sum(self.weights[k] for k in keys)
        if w == 0.0:
            return 0.0
        return sum(self.weights[k] * self.branch_rates[k] for k in keys) / w

    @property
    def rate_sut(self):
        return {k: v for k, v in self.branch_rates.items() if k.startswith("sut")}


def compose_hybrid(weights, branch_rates):
    """Occurrence-weighted combination of conditional branch rates."""
    return sum(weights[k] * branch_rates.get(k, 0.0) for k in weights)


# occurrence weights built from exp-differences carry O(1e-16) float noise;
# branches at or below this weight are skipped instead of evaluated (their
# regions may be degenerate exactly when their weight vanishes)
_WEIGHT_EPS = 1e-12


def _noma_branch_rate(p_strong, p_weak, targets):
    return (1.0 - p_strong) * targets.r_strong + (1.0 - p_weak) * targets.r_weak


def hybrid_rate(kind, scn, quad=QuadratureConfig()):
    """Analytic hybrid sum rate of one strategy on one scenario.

    Branches with zero occurrence weight are skipped, which keeps
    degenerate thresholds (empty groups almost surely) well defined.
    """
    p_theta, p_d = scn.membership
    weights = occurrence(kind, scn.mu, p_theta, p_d)
    eta_w, eta_s = noma_thresholds(scn.split, scn.targets)
    rho = scn.budget.snr_linear
    x_strong = max(eta_w, eta_s) / rho
    x_weak = eta_w / rho
    x_sut = scn.targets.eps_sut / rho

    def cdf(spec, x):
        return ecg_cdf(x, spec, scn.array, scn.budget, quad)

    def named(group, feedback):
        return cdf_spec(group, feedback, scn.region, scn.thresholds)

    def quadrant(label):
        return quadrant_cdf_spec(label, scn.region, scn.thresholds)

    branch_rates = {}
    outages = {}

    if not kind.is_combined:
        feedback = _KIND_FEEDBACK[kind]
        if weights[BRANCH_NOMA] > _WEIGHT_EPS:
            ps = 1.0 if math.isinf(x_strong) else cdf(named(Group.STRONG, feedback), x_strong)
            pw = 1.0 if math.isinf(x_weak) else cdf(named(Group.WEAK, feedback), x_weak)
            outages["noma_strong"] = ps
            outages["noma_weak"] = pw
            branch_rates[BRANCH_NOMA] = _noma_branch_rate(ps, pw, scn.targets)
        if weights[BRANCH_SUT_STRONG] > _WEIGHT_EPS:
            po = cdf(named(Group.STRONG, feedback), x_sut)
            outages["sut_strong"] = po
            branch_rates[BRANCH_SUT_STRONG] = (1.0 - po) * scn.targets.r_sut
        if weights[BRANCH_SUT_WEAK] > _WEIGHT_EPS:
            po = cdf(named(Group.WEAK, feedback), x_sut)
            outages["sut_weak"] = po
            branch_rates[BRANCH_SUT_WEAK] = (1.0 - po) * scn.targets.r_sut
        branch_rates[BRANCH_NONE] = 0.0
        hybrid = compose_hybrid(weights, branch_rates)
        return RateReport(kind=kind, hybrid=hybrid, weights=weights,
                          branch_rates=branch_rates, outages=outages)

    # Combined strategies.  Quadrant roles: the one-bit strong group is the
    # union of the strong-two-bit quadrant and one "fallback" quadrant
    # (in-beam-far for angle feedback, near-out-of-beam for distance); the
    # remaining quadrant completes the one-bit weak group.
    base = kind.one_bit_base
    feedback = _KIND_FEEDBACK[base]
    if base is StrategyKind.ONE_BIT_ANGLE:
        fallback_label, other_label = QuadrantLabel.WEAK_BAR, QuadrantLabel.STRONG_BAR
        q_fallback = p_theta * (1 - p_d)
        q_other = p_d * (1 - p_theta)
    else:
        fallback_label, other_label = QuadrantLabel.STRONG_BAR, QuadrantLabel.WEAK_BAR
        q_fallback = p_d * (1 - p_theta)
        q_other = p_theta * (1 - p_d)
    q_s2b = p_theta * p_d
    q_w2b = (1 - p_theta) * (1 - p_d)
    mu = scn.mu

    if weights[BRANCH_NOMA_TWO_BIT] > _WEIGHT_EPS:
        ps = 1.0 if math.isinf(x_strong) else cdf(named(Group.STRONG, Feedback.TWO_BIT), x_strong)
        pw = 1.0 if math.isinf(x_weak) else cdf(named(Group.WEAK, Feedback.TWO_BIT), x_weak)
        outages["noma_two_bit_strong"] = ps
        outages["noma_two_bit_weak"] = pw
        branch_rates[BRANCH_NOMA_TWO_BIT] = _noma_branch_rate(ps, pw, scn.targets)

    if weights[BRANCH_NOMA_ONE_BIT] > _WEIGHT_EPS and not math.isinf(x_weak):
        # scenario split of the one-bit pairing given that two-bit failed:
        #   alpha: strong-2B quadrant empty -> strong user sits in the
        #          fallback quadrant, weak group is the full one-bit weak region
        #   beta:  strong-2B occupied but weak-2B empty -> weak user sits in
        #          the "other" quadrant, strong user is a count-weighted
        #          mixture of the strong-2B and fallback quadrants
        p_alpha = (math.exp(-mu * q_s2b) * (1 - math.exp(-mu * q_fallback))
                   * (1 - math.exp(-mu * (q_w2b + q_other))))
        p_beta = ((1 - math.exp(-mu * q_s2b)) * math.exp(-mu * q_w2b)
                  * (1 - math.exp(-mu * q_other)))
        contribution = 0.0
        if p_alpha > _WEIGHT_EPS:
            ps = cdf(quadrant(fallback_label), x_strong)
            pw = cdf(named(Group.WEAK, feedback), x_weak)
            outages["noma_one_bit_alpha_strong"] = ps
            outages["noma_one_bit_alpha_weak"] = pw
            contribution += p_alpha * _noma_branch_rate(ps, pw, scn.targets)
        if p_beta > _WEIGHT_EPS:
            w_primary = _mixture_weight_strong(mu * q_s2b, mu * q_fallback)
            ps = w_primary * cdf(quadrant(QuadrantLabel.STRONG_TWO_BIT), x_strong)
            if w_primary < 1.0:
                ps += (1 - w_primary) * cdf(quadrant(fallback_label), x_strong)
            pw = cdf(quadrant(other_label), x_weak)
            outages["noma_one_bit_beta_strong"] = ps
            outages["noma_one_bit_beta_weak"] = pw
            contribution += p_beta * _noma_branch_rate(ps, pw, scn.targets)
        branch_rates[BRANCH_NOMA_ONE_BIT] = contribution / weights[BRANCH_NOMA_ONE_BIT]
    elif weights[BRANCH_NOMA_ONE_BIT] > _WEIGHT_EPS:
        branch_rates[BRANCH_NOMA_ONE_BIT] = 0.0

    if weights[BRANCH_SUT_STRONG_TWO_BIT] > _WEIGHT_EPS:
        po = cdf(quadrant(QuadrantLabel.STRONG_TWO_BIT), x_sut)
        outages["sut_strong_two_bit"] = po
        branch_rates[BRANCH_SUT_STRONG_TWO_BIT] = (1.0 - po) * scn.targets.r_sut
    if weights[BRANCH_SUT_STRONG_ONE_BIT] > _WEIGHT_EPS:
        # reached only when every user outside the strong-2B quadrant is in
        # the fallback quadrant, so the scheduled user's law is that quadrant
        po = cdf(quadrant(fallback_label), x_sut)
        outages["sut_strong_one_bit"] = po
        branch_rates[BRANCH_SUT_STRONG_ONE_BIT] = (1.0 - po) * scn.targets.r_sut
    if weights[BRANCH_SUT_WEAK_ONE_BIT] > _WEIGHT_EPS:
        po = cdf(named(Group.WEAK, feedback), x_sut)
        outages["sut_weak_one_bit"] = po
        branch_rates[BRANCH_SUT_WEAK_ONE_BIT] = (1.0 - po) * scn.targets.r_sut
    branch_rates[BRANCH_NONE] = 0.0
    hybrid = compose_hybrid(weights, branch_rates)
    return RateReport(kind=kind, hybrid=hybrid, weights=weights,
                      branch_rates=branch_rates, outages=outages)
