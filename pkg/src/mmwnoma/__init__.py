"""Limited-feedback mmWave NOMA: analysis and simulation that check each other."""

from .analytics import (
    CdfSpec,
    Feedback,
    Group,
    OccurrenceProbs,
    QuadratureConfig,
    QuadratureError,
    RateReport,
    cdf_spec,
    ecg_cdf,
    hybrid_rate,
    noma_outage,
    occurrence,
    occurrence_table,
    quadrant_cdf_spec,
    sut_outage,
)
from .channel import (
    ArrayConfig,
    LinkBudget,
    effective_gain,
    fejer_kernel,
    path_loss,
    steering_vector,
)
from .experiments import (
    ConfigError,
    ExperimentConfig,
    SweepResult,
    parse_config,
    run_geometry_map,
    run_occurrence_report,
    run_power_sweep,
    run_snr_sweep,
    run_threshold_grid,
    serialize_config,
)
from .geometry import (
    DeploymentModel,
    Thresholds,
    UserEquipment,
    UserRegion,
    expected_count,
    sample_deployment,
    thresholds_from_coefficients,
)
from .montecarlo import (
    Estimate,
    OracleOccurrence,
    TrialPlan,
    baseline_fullcsi_rate,
    baseline_oma_rate,
    oracle_occurrence,
    simulate_hybrid_rate,
    simulate_occurrence,
)
from .scenario import Scenario
from .strategy import (
    DecisionMode,
    FeedbackBits,
    PairSource,
    PowerSplit,
    QuadrantLabel,
    StrategyKind,
    SutSource,
    TargetRates,
    TransmissionDecision,
    decide,
    form_groups,
    quantize,
    realized_rate,
    sinr,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
