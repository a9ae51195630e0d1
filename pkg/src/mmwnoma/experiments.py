"""Config-driven experiment runner: SNR/threshold/power/geometry/occurrence sweeps.

Configs are flat ``key = value`` text with dotted section keys; angles are
accepted in degrees through ``*_deg`` keys and converted at this boundary.
Every sweep returns a SweepResult whose CSV serialization is byte-stable
(12 significant digits, ``.`` decimal, mandatory header row; the generated
timestamp comment is suppressed in deterministic mode).
"""

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import analytics, montecarlo
from .analytics import QuadratureConfig, hybrid_rate, occurrence
from .channel import ArrayConfig, LinkBudget
from .geometry import DeploymentModel, UserRegion, thresholds_from_coefficients
from .montecarlo import (
    TrialPlan,
    baseline_fullcsi_rate,
    baseline_oma_rate,
    simulate_hybrid_rate,
    simulate_occurrence,
)
from .scenario import Scenario
from .strategy import PowerSplit, StrategyKind, TargetRates

DEG = math.pi / 180.0

STRATEGY_BY_NAME = {kind.value: kind for kind in StrategyKind}
BASELINE_OMA_PREFIX = "OMA-"
BASELINE_FULL_CSI = "full-CSI"


class ConfigError(ValueError):
    """Config parse or validation failure (CLI exit code 2)."""


DEFAULTS = {
    "region.d_min_m": 0.0,
    "region.d_max_m": 45.0,
    "region.delta_deg": 15.0,
    "region.theta_bar_deg": 0.0,
    "deploy.density_per_m2": 0.01,
    "array.num_elements": 64,
    "array.spacing_wavelengths": 0.5,
    "link.snr_db_list": [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0,
                         35.0, 40.0, 45.0, 50.0, 55.0, 60.0],
    "link.path_loss_exponent": 2.0,
    "link.fading_variance": 1.0,
    "thresholds.c_theta": 0.1,
    "thresholds.c_d": 0.2,
    "split.beta_sq_strong": 0.4,
    "rates.strong_bps": 8.0,
    "rates.weak_bps": 1.0,
    "rates.sut_bps": 8.0,
    "trials.num": 100000,
    "trials.seed": 1,
    "trials.chunk_size": 65536,
    "strategies": ["2B", "1B-A", "1B-D", "C-A", "C-D"],
    "baselines": [],
    "sweep.snr_db": 50.0,
    "sweep.c_theta_list": [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
    "sweep.c_d_list": [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
    "sweep.beta_sq_list": [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.49],
    "sweep.d_max_list_m": [9.0, 15.0, 21.0, 27.0, 33.0, 39.0, 45.0],
    "sweep.delta_list_deg": [2.0, 4.0, 6.0, 8.0, 10.0, 15.0],
    "quad.nodes_radial": 256,
    "quad.nodes_angular": 256,
    "quad.tolerance": 1e-6,
}


def _parse_scalar(token):
    token = token.strip()
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        return token


def parse_config(text):
    """Parse flat key-value text into a mapping; errors carry line numbers."""
    result = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in result:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        if "," in value:
            result[key] = [_parse_scalar(tok) for tok in value.split(",") if tok.strip()]
        else:
            result[key] = _parse_scalar(value)
    return result


def serialize_config(mapping):
    """Canonical text form; parse(serialize(parse(x))) == parse(x)."""
    lines = []
    for key in sorted(mapping):
        value = mapping[key]
        if isinstance(value, (list, tuple)):
            rendered = ",".join(_render_value(v) for v in value)
            if len(value) == 1:
                rendered += ","
        else:
            rendered = _render_value(value)
        lines.append(f"{key} = {rendered}")
    return "\n".join(lines) + "\n"


def _render_value(value):
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


@dataclass
class ExperimentConfig:
    """Validated experiment parameters; unknown keys are rejected."""

    values: dict = field(default_factory=dict)

    @classmethod
    def from_text(cls, text):
        return cls.from_mapping(parse_config(text))

    @classmethod
    def from_mapping(cls, mapping):
        values = dict(DEFAULTS)
        for key, value in mapping.items():
            if key not in DEFAULTS:
                raise ConfigError(f"key '{key}': unknown configuration key")
            if isinstance(DEFAULTS[key], list) and not isinstance(value, list):
                value = [value]
            values[key] = value
        config = cls(values=values)
        config.validate()
        return config

    def __getitem__(self, key):
        return self.values[key]

    def validate(self):
        v = self.values
        try:
            self.region()
            self.array()
            self.split()
            self.targets()
            thresholds_from_coefficients(self.region(), v["thresholds.c_d"],
                                         v["thresholds.c_theta"])
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc
        if not v["link.snr_db_list"]:
            raise ConfigError("key 'link.snr_db_list': SNR grid must be nonempty")
        if v["deploy.density_per_m2"] <= 0:
            raise ConfigError("key 'deploy.density_per_m2': density must be > 0")
        if int(v["trials.num"]) < 1:
            raise ConfigError("key 'trials.num': need at least one trial")
        for name in v["strategies"]:
            if name not in STRATEGY_BY_NAME:
                raise ConfigError(
                    f"key 'strategies': unknown strategy '{name}' "
                    f"(choose from {sorted(STRATEGY_BY_NAME)})")
        for name in v["baselines"]:
            if name not in ("oma", "full-csi"):
                raise ConfigError(f"key 'baselines': unknown baseline '{name}'")
        for b in v["sweep.beta_sq_list"]:
            if not 0.0 < b < 0.5:
                raise ConfigError(
                    f"key 'sweep.beta_sq_list': strong power fraction {b} "
                    "must lie in (0, 0.5)")

    # ---- typed builders -------------------------------------------------
    def region(self, d_max_m=None, delta_deg=None):
        v = self.values
        return UserRegion(
            d_min=float(v["region.d_min_m"]),
            d_max=float(d_max_m if d_max_m is not None else v["region.d_max_m"]),
            delta=float(delta_deg if delta_deg is not None else v["region.delta_deg"]) * DEG,
            theta_bar=float(v["region.theta_bar_deg"]) * DEG,
        )

    def array(self):
        return ArrayConfig(
            num_elements=int(self.values["array.num_elements"]),
            element_spacing_over_wavelength=float(self.values["array.spacing_wavelengths"]),
        )

    def split(self, beta_sq_strong=None):
        b = beta_sq_strong if beta_sq_strong is not None else self.values["split.beta_sq_strong"]
        return PowerSplit.from_strong_fraction(float(b))

    def targets(self):
        v = self.values
        return TargetRates(r_strong=float(v["rates.strong_bps"]),
                           r_weak=float(v["rates.weak_bps"]),
                           r_sut=float(v["rates.sut_bps"]))

    def quadrature(self):
        v = self.values
        return QuadratureConfig(nodes_radial=int(v["quad.nodes_radial"]),
                                nodes_angular=int(v["quad.nodes_angular"]),
                                refinement_tolerance=float(v["quad.tolerance"]))

    def scenario(self, snr_db, d_max_m=None, delta_deg=None,
                 c_theta=None, c_d=None, beta_sq_strong=None):
        v = self.values
        region = self.region(d_max_m=d_max_m, delta_deg=delta_deg)
        thresholds = thresholds_from_coefficients(
            region,
            float(c_d if c_d is not None else v["thresholds.c_d"]),
            float(c_theta if c_theta is not None else v["thresholds.c_theta"]),
        )
        budget = LinkBudget(
            snr_linear=10.0 ** (float(snr_db) / 10.0),
            path_loss_exponent=float(v["link.path_loss_exponent"]),
            fading_variance=float(v["link.fading_variance"]),
        )
        return Scenario(
            region=region,
            model=DeploymentModel(density=float(v["deploy.density_per_m2"])),
            thresholds=thresholds,
            array=self.array(),
            budget=budget,
            split=self.split(beta_sq_strong),
            targets=self.targets(),
        )

    def strategies(self):
        return [STRATEGY_BY_NAME[name] for name in self.values["strategies"]]

    def plan(self, row_index, num_trials=None):
        """Independent, reproducible trial stream for one sweep row."""
        seed = (int(self.values["trials.seed"]) * 1000003 + row_index) % (1 << 63)
        return TrialPlan(
            num_trials=int(num_trials if num_trials is not None else self.values["trials.num"]),
            base_seed=seed,
            chunk_size=int(self.values["trials.chunk_size"]),
        )


@dataclass
class SweepResult:
    columns: list
    rows: list

    def to_csv_text(self, deterministic=False):
        lines = []
        if not deterministic:
            stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
            lines.append(f"# generated {stamp}")
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(_render_cell(cell) for cell in row))
        return "\n".join(lines) + "\n"

    def write_csv(self, path, deterministic=False):
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(self.to_csv_text(deterministic=deterministic))

    def column(self, name):
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def _render_cell(cell):
    if cell is None:
        return ""
    if isinstance(cell, str):
        return cell
    if isinstance(cell, (int, np.integer)):
        return str(int(cell))
    value = float(cell)
    if math.isnan(value):
        return ""
    return f"{value:.12g}"


def _analytic_rate(config, scn, kind):
    return hybrid_rate(kind, scn, config.quadrature()).hybrid


def run_snr_sweep(config, analytic_only=False, trials=None):
    """Hybrid rate (analytic + MC) per SNR and strategy, plus optional
    OMA / full-CSI baseline rows (MC only)."""
    rows = []
    row_index = 0
    strategies = config.strategies()
    with_oma = "oma" in config["baselines"]
    with_fullcsi = "full-csi" in config["baselines"]
    for snr_db in config["link.snr_db_list"]:
        scn = config.scenario(snr_db)
        for kind in strategies:
            analytic = _analytic_rate(config, scn, kind)
            if analytic_only:
                rows.append((float(snr_db), kind.value, analytic, None, None))
            else:
                est = simulate_hybrid_rate(scn, kind, config.plan(row_index, trials))
                rows.append((float(snr_db), kind.value, analytic, est.mean, est.std_error))
            row_index += 1
        if with_oma and not analytic_only:
            for kind in strategies:
                if kind.is_combined:
                    continue
                est = baseline_oma_rate(scn, kind, config.plan(row_index, trials))
                rows.append((float(snr_db), BASELINE_OMA_PREFIX + kind.value,
                             None, est.mean, est.std_error))
                row_index += 1
        if with_fullcsi and not analytic_only:
            est = baseline_fullcsi_rate(scn, config.plan(row_index, trials))
            rows.append((float(snr_db), BASELINE_FULL_CSI, None, est.mean, est.std_error))
            row_index += 1
    return SweepResult(
        columns=["snr_db", "strategy", "analytic_rate", "mc_rate", "mc_se"],
        rows=rows,
    )


def run_threshold_grid(config):
    """Analytic two-bit hybrid rate over the (c_theta, c_d) grid."""
    rows = []
    for c_theta in config["sweep.c_theta_list"]:
        for c_d in config["sweep.c_d_list"]:
            scn = config.scenario(config["sweep.snr_db"], c_theta=c_theta, c_d=c_d)
            rate = _analytic_rate(config, scn, StrategyKind.TWO_BIT)
            rows.append((float(c_theta), float(c_d), rate))
    return SweepResult(columns=["c_theta", "c_d", "analytic_rate"], rows=rows)


def run_power_sweep(config, analytic_only=False, trials=None):
    """Hybrid rate against the strong user's power fraction."""
    rows = []
    row_index = 0
    for beta_sq in config["sweep.beta_sq_list"]:
        scn = config.scenario(config["sweep.snr_db"], beta_sq_strong=beta_sq)
        for kind in config.strategies():
            analytic = _analytic_rate(config, scn, kind)
            if analytic_only:
                rows.append((float(beta_sq), kind.value, analytic, None, None))
            else:
                est = simulate_hybrid_rate(scn, kind, config.plan(row_index, trials))
                rows.append((float(beta_sq), kind.value, analytic, est.mean, est.std_error))
            row_index += 1
    return SweepResult(
        columns=["beta_sq_strong", "strategy", "analytic_rate", "mc_rate", "mc_se"],
        rows=rows,
    )


BASIC_SET = (StrategyKind.ONE_BIT_ANGLE, StrategyKind.ONE_BIT_DISTANCE,
             StrategyKind.TWO_BIT)
FULL_SET = BASIC_SET + (StrategyKind.COMBINED_ANGLE, StrategyKind.COMBINED_DISTANCE)


def run_geometry_map(config):
    """Analytic hybrid rate per (d_max, delta) cell for every strategy, with
    argmax winner labels over the basic and the full strategy sets."""
    rows = []
    for d_max in config["sweep.d_max_list_m"]:
        for delta_deg in config["sweep.delta_list_deg"]:
            scn = config.scenario(config["sweep.snr_db"], d_max_m=d_max,
                                  delta_deg=delta_deg)
            rates = {kind: _analytic_rate(config, scn, kind) for kind in FULL_SET}
            winner_basic = max(BASIC_SET, key=lambda k: rates[k])
            winner_all = max(FULL_SET, key=lambda k: rates[k])
            rows.append((
                float(d_max), float(delta_deg),
                rates[StrategyKind.ONE_BIT_ANGLE],
                rates[StrategyKind.ONE_BIT_DISTANCE],
                rates[StrategyKind.TWO_BIT],
                rates[StrategyKind.COMBINED_ANGLE],
                rates[StrategyKind.COMBINED_DISTANCE],
                winner_basic.value, winner_all.value,
            ))
    return SweepResult(
        columns=["d_max_m", "delta_deg", "rate_1B-A", "rate_1B-D", "rate_2B",
                 "rate_C-A", "rate_C-D", "winner_basic", "winner_all"],
        rows=rows,
    )


OCCURRENCE_KINDS = (StrategyKind.TWO_BIT, StrategyKind.COMBINED_ANGLE)


def run_occurrence_report(config, analytic_only=False, trials=None):
    """Closed-form and empirical branch probabilities against c_theta for
    two-bit and combined-angle operation."""
    rows = []
    row_index = 0
    for c_theta in config["sweep.c_theta_list"]:
        scn = config.scenario(config["sweep.snr_db"], c_theta=c_theta)
        p_theta, p_d = scn.membership
        for kind in OCCURRENCE_KINDS:
            closed = occurrence(kind, scn.mu, p_theta, p_d)
            if analytic_only:
                for branch, value in closed.items():
                    rows.append((float(c_theta), kind.value, branch, value, None, None))
            else:
                freqs = simulate_occurrence(scn, kind, config.plan(row_index, trials))
                for branch, value in closed.items():
                    rows.append((float(c_theta), kind.value, branch, value,
                                 freqs.frequencies[branch], freqs.std_error(branch)))
            row_index += 1
    return SweepResult(
        columns=["c_theta", "strategy", "branch", "closed_form", "mc", "mc_se"],
        rows=rows,
    )


def verify_agreement(result, sigma=3.0):
    """Check every row with both analytic and MC columns for agreement
    within ``sigma`` standard errors; returns the offending rows."""
    cols = result.columns
    if "mc" in cols:
        a_col, m_col, s_col = "closed_form", "mc", "mc_se"
    else:
        a_col, m_col, s_col = "analytic_rate", "mc_rate", "mc_se"
    bad = []
    for row in result.rows:
        analytic = row[cols.index(a_col)]
        mc = row[cols.index(m_col)]
        se = row[cols.index(s_col)]
        if analytic is None or mc is None:
            continue
        tolerance = sigma * (se if se else 0.0) + 1e-12
        if abs(analytic - mc) > tolerance:
            bad.append(row)
    return bad
