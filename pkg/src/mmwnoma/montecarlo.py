"""Monte Carlo engine, enumeration oracles, and the OMA / full-CSI baselines.

Trials are simulated in fixed-size chunks, each driven by an independent
generator stream derived from (base_seed, chunk index), so results are
bit-identical no matter how the chunks are scheduled.  Within a chunk all
users of all trials are drawn as flat arrays and decisions are resolved
with vectorized group counts; the uniformly random member picks use a
per-user priority draw and a segmented argmax.

The occurrence oracle never touches the closed forms: it enumerates every
composition of K users over the four feedback quadrants (multinomial
weights, Poisson-averaged up to a truncation point with a reported tail
bound) and classifies each emptiness pattern with the decision rules.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, xlogy
from scipy.stats import poisson

from .analytics import (
    BRANCH_NONE,
    BRANCH_NOMA,
    BRANCH_NOMA_ONE_BIT,
    BRANCH_NOMA_TWO_BIT,
    BRANCH_SUT_STRONG,
    BRANCH_SUT_STRONG_ONE_BIT,
    BRANCH_SUT_STRONG_TWO_BIT,
    BRANCH_SUT_WEAK,
    BRANCH_SUT_WEAK_ONE_BIT,
    COMBINED_BRANCHES,
    PLAIN_BRANCHES,
)
from .channel import effective_gain_array
from .geometry import sample_positions
from .strategy import StrategyKind

FULL_CSI_WEAK_RANK = 10


@dataclass(frozen=True)
class TrialPlan:
    """How many trials, which seed, and the deterministic chunking."""

    num_trials: int
    base_seed: int
    chunk_size: int = 1 << 16

    def __post_init__(self):
        if self.num_trials < 1:
            raise ValueError("num_trials must be >= 1")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")

    def chunks(self):
        """(chunk_index, chunk_trials) pairs covering all trials."""
        full, rem = divmod(self.num_trials, self.chunk_size)
        for i in range(full):
            yield i, self.chunk_size
        if rem:
            yield full, rem

    def chunk_rng(self, index):
        seq = np.random.SeedSequence(entropy=self.base_seed, spawn_key=(index,))
        return np.random.default_rng(seq)


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_error: float
    num_samples: int


def _estimate_from_moments(total, total_sq, n):
    mean = total / n
    if n > 1:
        var = max(total_sq - n * mean**2, 0.0) / (n - 1)
    else:
        var = 0.0
    return Estimate(mean=mean, std_error=math.sqrt(var / n), num_samples=n)


def _segmented_pick(mask, trial_id, priority, num_trials):
    """Per trial, the index of the max-priority user satisfying ``mask``
    (-1 where no user qualifies).  Equivalent to a uniform random pick."""
    out = np.full(num_trials, -1, dtype=np.int64)
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return out
    order = np.lexsort((priority[idx], trial_id[idx]))
    tid_sorted = trial_id[idx][order]
    last = np.flatnonzero(np.r_[tid_sorted[1:] != tid_sorted[:-1], True])
    out[tid_sorted[last]] = idx[order[last]]
    return out


def _weak_message_sinr_vec(gains, rho, split):
    bs2, bw2 = split.beta_sq_strong, split.beta_sq_weak
    x = rho * gains
    with np.errstate(invalid="ignore", over="ignore"):
        val = x * bw2 / (x * bs2 + 1.0)
    if bs2 > 0:
        return np.where(np.isinf(gains), bw2 / bs2, val)
    return np.where(np.isinf(gains), np.inf, val)


@dataclass
class _ChunkState:
    """Per-chunk flat arrays plus the per-kind decision resolution."""

    num_trials: int
    trial_id: np.ndarray
    counts_k: np.ndarray
    gains: np.ndarray
    in_beam: np.ndarray
    near: np.ndarray
    priority: np.ndarray

    def _counts(self, mask):
        return np.bincount(self.trial_id[mask], minlength=self.num_trials)

    def resolve(self, kind):
        """(branch_label_per_trial, strong_pick, weak_pick, sut_pick).

        Branch labels index PLAIN_BRANCHES or COMBINED_BRANCHES.
        """
        n = self.num_trials
        if kind is StrategyKind.TWO_BIT:
            strong_mask = self.in_beam & self.near
            weak_mask = ~self.in_beam & ~self.near
        elif kind is StrategyKind.ONE_BIT_ANGLE:
            strong_mask, weak_mask = self.in_beam, ~self.in_beam
        elif kind is StrategyKind.ONE_BIT_DISTANCE:
            strong_mask, weak_mask = self.near, ~self.near
        else:
            return self._resolve_combined(kind)
        c_s, c_w = self._counts(strong_mask), self._counts(weak_mask)
        noma = (c_s > 0) & (c_w > 0)
        sut_s = ~noma & (c_s > 0)
        sut_w = ~noma & (c_s == 0) & (c_w > 0)
        branch = np.full(n, PLAIN_BRANCHES.index(BRANCH_NONE), dtype=np.int8)
        branch[noma] = PLAIN_BRANCHES.index(BRANCH_NOMA)
        branch[sut_s] = PLAIN_BRANCHES.index(BRANCH_SUT_STRONG)
        branch[sut_w] = PLAIN_BRANCHES.index(BRANCH_SUT_WEAK)
        pick_s = _segmented_pick(strong_mask, self.trial_id, self.priority, n)
        pick_w = _segmented_pick(weak_mask, self.trial_id, self.priority, n)
        sut_pick = np.where(sut_s, pick_s, np.where(sut_w, pick_w, -1))
        return branch, pick_s, pick_w, sut_pick

    def _resolve_combined(self, kind):
        n = self.num_trials
        s2b_mask = self.in_beam & self.near
        w2b_mask = ~self.in_beam & ~self.near
        if kind is StrategyKind.COMBINED_ANGLE:
            strong1_mask, weak1_mask = self.in_beam, ~self.in_beam
        else:
            strong1_mask, weak1_mask = self.near, ~self.near
        c1, c2 = self._counts(s2b_mask), self._counts(w2b_mask)
        cs, cw = self._counts(strong1_mask), self._counts(weak1_mask)
        noma2 = (c1 > 0) & (c2 > 0)
        noma1 = ~noma2 & (cs > 0) & (cw > 0)
        rest = ~noma2 & ~noma1
        sut_s2b = rest & (c1 > 0)
        sut_s1b = rest & (c1 == 0) & (cs > 0)
        sut_w1b = rest & (c1 == 0) & (cs == 0) & (cw > 0)
        branch = np.full(n, COMBINED_BRANCHES.index(BRANCH_NONE), dtype=np.int8)
        branch[noma2] = COMBINED_BRANCHES.index(BRANCH_NOMA_TWO_BIT)
        branch[noma1] = COMBINED_BRANCHES.index(BRANCH_NOMA_ONE_BIT)
        branch[sut_s2b] = COMBINED_BRANCHES.index(BRANCH_SUT_STRONG_TWO_BIT)
        branch[sut_s1b] = COMBINED_BRANCHES.index(BRANCH_SUT_STRONG_ONE_BIT)
        branch[sut_w1b] = COMBINED_BRANCHES.index(BRANCH_SUT_WEAK_ONE_BIT)
        pick_s2b = _segmented_pick(s2b_mask, self.trial_id, self.priority, n)
        pick_w2b = _segmented_pick(w2b_mask, self.trial_id, self.priority, n)
        pick_s1b = _segmented_pick(strong1_mask, self.trial_id, self.priority, n)
        pick_w1b = _segmented_pick(weak1_mask, self.trial_id, self.priority, n)
        strong_pick = np.where(noma2, pick_s2b, pick_s1b)
        weak_pick = np.where(noma2, pick_w2b, pick_w1b)
        sut_pick = np.where(sut_s2b, pick_s2b,
                            np.where(sut_s1b, pick_s1b,
                                     np.where(sut_w1b, pick_w1b, -1)))
        return branch, strong_pick, weak_pick, sut_pick

    def branch_names(self, kind):
        return COMBINED_BRANCHES if kind.is_combined else PLAIN_BRANCHES


def _draw_chunk(scn, size, rng):
    counts_k = rng.poisson(scn.mu, size)
    total = int(counts_k.sum())
    trial_id = np.repeat(np.arange(size), counts_k)
    distances, angles, fading = sample_positions(
        scn.region, total, rng, scn.budget.fading_variance)
    priority = rng.random(total)
    gains = effective_gain_array(
        distances, angles, fading, scn.array, scn.budget, scn.region.theta_bar)
    in_beam = np.abs(scn.region.theta_bar - angles) <= scn.thresholds.theta_th
    near = distances <= scn.thresholds.d_th
    return _ChunkState(num_trials=size, trial_id=trial_id, counts_k=counts_k,
                       gains=gains, in_beam=in_beam, near=near, priority=priority)


def _chunk_rates(scn, kind, state, oma=False):
    """Per-trial realized rate for one chunk (optionally scoring the NOMA
    stage as half-resource OMA)."""
    rho = scn.budget.snr_linear
    split, targets = scn.split, scn.targets
    branch, pick_s, pick_w, pick_sut = state.resolve(kind)
    names = state.branch_names(kind)
    noma_ids = [i for i, b in enumerate(names) if b.startswith("noma")]
    is_noma = np.isin(branch, noma_ids)
    rate = np.zeros(state.num_trials)
    if np.any(is_noma):
        g_s = state.gains[pick_s[is_noma]]
        g_w = state.gains[pick_w[is_noma]]
        if oma:
            # half the resource each: rate target R needs log2(1+rho g)/2 > R
            ok_s = rho * g_s > 4.0**targets.r_strong - 1.0
            ok_w = rho * g_w > 4.0**targets.r_weak - 1.0
        else:
            sinr_ws = _weak_message_sinr_vec(g_s, rho, split)
            sinr_ss = rho * g_s * split.beta_sq_strong
            sinr_ww = _weak_message_sinr_vec(g_w, rho, split)
            ok_s = (sinr_ws > targets.eps_weak) & (sinr_ss > targets.eps_strong)
            ok_w = sinr_ww > targets.eps_weak
        rate[is_noma] = ok_s * targets.r_strong + ok_w * targets.r_weak
    is_sut = pick_sut >= 0
    if np.any(is_sut):
        g = state.gains[pick_sut[is_sut]]
        rate[is_sut] = (rho * g > targets.eps_sut) * targets.r_sut
    return rate


def simulate_hybrid_rate(scn, kind, plan):
    """Mean realized rate over fresh deployments (no-transmission trials
    contribute zero, matching the unconditional occurrence weighting)."""
    total = total_sq = 0.0
    for index, size in plan.chunks():
        state = _draw_chunk(scn, size, plan.chunk_rng(index))
        rates = _chunk_rates(scn, kind, state)
        total += float(rates.sum())
        total_sq += float(np.dot(rates, rates))
    return _estimate_from_moments(total, total_sq, plan.num_trials)


@dataclass(frozen=True)
class OccurrenceFrequencies:
    """Empirical branch frequencies with the exact integer counts."""

    counts: dict
    num_trials: int

    @property
    def frequencies(self):
        return {k: v / self.num_trials for k, v in self.counts.items()}

    def std_error(self, branch):
        f = self.counts[branch] / self.num_trials
        return math.sqrt(f * (1.0 - f) / self.num_trials)


def simulate_occurrence(scn, kind, plan):
    """Empirical frequency of each transmission branch."""
    names = COMBINED_BRANCHES if kind.is_combined else PLAIN_BRANCHES
    counts = np.zeros(len(names), dtype=np.int64)
    for index, size in plan.chunks():
        state = _draw_chunk(scn, size, plan.chunk_rng(index))
        branch, _, _, _ = state.resolve(kind)
        counts += np.bincount(branch, minlength=len(names))
    return OccurrenceFrequencies(
        counts={name: int(c) for name, c in zip(names, counts)},
        num_trials=plan.num_trials,
    )


def baseline_oma_rate(scn, kind, plan):
    """Same pairing decisions, but NOMA-feasible trials score each paired
    user at half the time-frequency resource; SUT and empty trials score
    exactly as in the hybrid simulation."""
    total = total_sq = 0.0
    for index, size in plan.chunks():
        state = _draw_chunk(scn, size, plan.chunk_rng(index))
        rates = _chunk_rates(scn, kind, state, oma=True)
        total += float(rates.sum())
        total_sq += float(np.dot(rates, rates))
    return _estimate_from_moments(total, total_sq, plan.num_trials)


def baseline_fullcsi_rate(scn, plan):
    """Unquantized-feedback pairing: rank users by exact effective gain and
    pair the best with the tenth best.  Trials with fewer than ten users
    contribute zero (the pairing rule is undefined there)."""
    rho = scn.budget.snr_linear
    split, targets = scn.split, scn.targets
    total = total_sq = 0.0
    for index, size in plan.chunks():
        state = _draw_chunk(scn, size, plan.chunk_rng(index))
        order = np.lexsort((-state.gains, state.trial_id))
        starts = np.concatenate(([0], np.cumsum(state.counts_k)))[:-1]
        feasible = state.counts_k >= FULL_CSI_WEAK_RANK
        rate = np.zeros(size)
        if np.any(feasible):
            g_s = state.gains[order[starts[feasible]]]
            g_w = state.gains[order[starts[feasible] + FULL_CSI_WEAK_RANK - 1]]
            sinr_ws = _weak_message_sinr_vec(g_s, rho, split)
            sinr_ss = rho * g_s * split.beta_sq_strong
            sinr_ww = _weak_message_sinr_vec(g_w, rho, split)
            ok_s = (sinr_ws > targets.eps_weak) & (sinr_ss > targets.eps_strong)
            ok_w = sinr_ww > targets.eps_weak
            rate[feasible] = ok_s * targets.r_strong + ok_w * targets.r_weak
        total += float(rate.sum())
        total_sq += float(np.dot(rate, rate))
    return _estimate_from_moments(total, total_sq, plan.num_trials)


def sample_conditional_gains(spec, budget, array, count, rng):
    """Effective-gain draws conditioned on the user lying in ``spec``'s
    region: the independent sampling oracle behind the CDF cross-checks."""
    widths = np.array([b - a for a, b in spec.angular_intervals], dtype=float)
    los = np.array([a for a, _ in spec.angular_intervals])
    choice = rng.choice(len(widths), size=count, p=widths / widths.sum())
    angles = los[choice] + rng.random(count) * widths[choice]
    rlo, rhi = spec.radial_interval
    distances = np.sqrt(rlo**2 + rng.random(count) * (rhi**2 - rlo**2))
    fading = rng.exponential(budget.fading_variance, size=count)
    return effective_gain_array(distances, angles, fading, array, budget, spec.theta_bar)


# ---------------------------------------------------------------------------
# enumeration oracle for the occurrence probabilities
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4)
def _composition_table(k_max):
    """All (n1, n2, n3, n4) with n1+..+n4 = K <= k_max, plus the log
    multinomial coefficient and the 4-bit emptiness pattern of each row."""
    rows = []
    for k in range(k_max + 1):
        for n1 in range(k + 1):
            for n2 in range(k - n1 + 1):
                for n3 in range(k - n1 - n2 + 1):
                    rows.append((n1, n2, n3, k - n1 - n2 - n3))
    n = np.array(rows, dtype=np.int64)
    k_tot = n.sum(axis=1)
    log_coef = gammaln(k_tot + 1) - gammaln(n + 1).sum(axis=1)
    pattern = ((n[:, 0] > 0).astype(np.int8)
               | ((n[:, 1] > 0) << 1)
               | ((n[:, 2] > 0) << 2)
               | ((n[:, 3] > 0) << 3))
    return n, k_tot, log_coef, pattern


def _pattern_branch_table(kind):
    """Branch index for each of the 16 quadrant-emptiness patterns.

    Quadrant bit order: strong-2B, weak-2B, near-out-of-beam, in-beam-far.
    """
    names = COMBINED_BRANCHES if kind.is_combined else PLAIN_BRANCHES
    table = np.empty(16, dtype=np.int8)
    for pattern in range(16):
        e1, e2, e3, e4 = (bool(pattern & (1 << b)) for b in range(4))
        if kind is StrategyKind.TWO_BIT:
            strong, weak = e1, e2
        elif kind in (StrategyKind.ONE_BIT_ANGLE, StrategyKind.COMBINED_ANGLE):
            strong, weak = e1 or e4, e2 or e3
        else:
            strong, weak = e1 or e3, e2 or e4
        if kind.is_combined:
            if e1 and e2:
                label = BRANCH_NOMA_TWO_BIT
            elif strong and weak:
                label = BRANCH_NOMA_ONE_BIT
            elif e1:
                label = BRANCH_SUT_STRONG_TWO_BIT
            elif strong:
                label = BRANCH_SUT_STRONG_ONE_BIT
            elif weak:
                label = BRANCH_SUT_WEAK_ONE_BIT
            else:
                label = BRANCH_NONE
        else:
            if strong and weak:
                label = BRANCH_NOMA
            elif strong:
                label = BRANCH_SUT_STRONG
            elif weak:
                label = BRANCH_SUT_WEAK
            else:
                label = BRANCH_NONE
        table[pattern] = names.index(label)
    return table


@dataclass(frozen=True)
class OracleOccurrence:
    """Truncated-Poisson enumeration result with its truncation bound."""

    probs: dict
    tail_bound: float
    k_max: int


@lru_cache(maxsize=16)
def _pattern_masses(mu, p_theta, p_d, k_max):
    """Total enumerated probability of each quadrant-emptiness pattern.

    Shared by every strategy kind for one parameter triple (only the
    pattern-to-branch mapping differs).
    """
    n, k_tot, log_coef, pattern = _composition_table(k_max)
    masses = np.array([
        p_theta * p_d,
        (1 - p_theta) * (1 - p_d),
        p_d * (1 - p_theta),
        p_theta * (1 - p_d),
    ])
    log_pois = -mu + xlogy(k_tot, mu) - gammaln(k_tot + 1)
    log_prob = log_pois + log_coef + xlogy(n, masses[None, :]).sum(axis=1)
    with np.errstate(divide="ignore"):
        prob = np.exp(log_prob)
    return np.bincount(pattern, weights=prob, minlength=16)


def oracle_occurrence(kind, mu, p_theta, p_d, k_max=60):
    """Brute-force occurrence probabilities via quadrant enumeration.

    For each K <= k_max every multinomial split of K users over the four
    quadrants is weighted exactly and classified by the decision rules;
    the Poisson average is truncated at k_max with Pr(K > k_max) reported
    as ``tail_bound``.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    if mu <= 0:
        raise ValueError("mu must be > 0")
    pattern_mass = _pattern_masses(float(mu), float(p_theta), float(p_d), int(k_max))
    names = COMBINED_BRANCHES if kind.is_combined else PLAIN_BRANCHES
    table = _pattern_branch_table(kind)
    sums = np.zeros(len(names))
    np.add.at(sums, table, pattern_mass)
    return OracleOccurrence(
        probs={name: float(v) for name, v in zip(names, sums)},
        tail_bound=float(poisson.sf(k_max, mu)),
        k_max=k_max,
    )


def conditional_branch_probs(kind, k, p_theta, p_d):
    """Branch probabilities conditioned on exactly ``k`` deployed users."""
    n, k_tot, log_coef, pattern = _composition_table(k)
    keep = k_tot == k
    masses = np.array([
        p_theta * p_d,
        (1 - p_theta) * (1 - p_d),
        p_d * (1 - p_theta),
        p_theta * (1 - p_d),
    ])
    log_prob = log_coef[keep] + xlogy(n[keep], masses[None, :]).sum(axis=1)
    prob = np.exp(log_prob)
    pattern_mass = np.bincount(pattern[keep], weights=prob, minlength=16)
    names = COMBINED_BRANCHES if kind.is_combined else PLAIN_BRANCHES
    table = _pattern_branch_table(kind)
    sums = np.zeros(len(names))
    np.add.at(sums, table, pattern_mass)
    return {name: float(v) for name, v in zip(names, sums)}
