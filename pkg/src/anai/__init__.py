"""Deterministic simulator and analysis toolkit for autonomy/infrastructure
technology transitions: index algebra, coupled logistic dynamics with
threshold-crossing detection, phase-plane geometry, and logistic calibration.
"""

from .calibration import (
    DegenerateSeries,
    FitResult,
    ObservedSeries,
    SweepEntry,
    SweepSpec,
    UnconvergedFit,
    fit_logistic,
    predict_crossing,
    sensitivity_sweep,
)
from .dynamics import (
    ClampViolation,
    CouplingFunction,
    CrossingEvent,
    DegenerateTrajectory,
    FeedbackParams,
    LogisticParams,
    NonFiniteState,
    ScenarioConfig,
    TimeGrid,
    Trajectory,
    crossing_time,
    growth_decomposition,
    integrate,
    logistic_closed_form,
    simulate,
    simulate_decoupled,
    simulate_feedback,
)
from .indices import (
    AutonomyComponents,
    ClassifierConfig,
    DomainAssessment,
    DomainReport,
    InfraComponents,
    Regime,
    Stage,
    assess_domain,
    autonomy_index,
    boundary_proximity,
    classify_regime,
    classify_stage,
    coupling_coefficient,
    is_transitioned,
    round_half_up,
    transition_potential,
)
from .phase_space import (
    BoundaryCurve,
    InvalidTau,
    PositionedDomain,
    RegimeGrid,
    boundary_curve,
    position_domains,
    project_trajectory,
    regime_grid,
)
from .scenario import (
    ScenarioError,
    ScenarioParseError,
    ValidationError,
    format_scenario,
    parse_scenario,
)

__version__ = "0.1.0"
