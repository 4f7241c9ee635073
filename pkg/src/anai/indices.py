"""Static score algebra for the autonomy/infrastructure transition framework.

Computes the autonomy index (mean of four capability scores), the
infrastructure coupling coefficient (product of three embedding scores),
the transition potential (their product), and the threshold, regime and
stage classifications built on top of them. Everything here is pure
arithmetic over validated unit-interval values.
"""

from __future__ import annotations

import enum
import math
from bisect import bisect_right
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

__all__ = [
    "AutonomyComponents",
    "ClassifierConfig",
    "DomainAssessment",
    "DomainReport",
    "InfraComponents",
    "Regime",
    "Stage",
    "assess_domain",
    "autonomy_index",
    "boundary_proximity",
    "check_unit",
    "classify_regime",
    "classify_stage",
    "coupling_coefficient",
    "is_transitioned",
    "round_half_up",
    "transition_potential",
]


def check_unit(value: float, name: str = "score") -> float:
    """Validate a unit-interval score and return it as a float."""
    v = float(value)
    if not math.isfinite(v) or v < 0.0 or v > 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value!r}")
    return v


def round_half_up(value: float, ndigits: int) -> float:
    """Round with ties away from zero (0.485 -> 0.49), not banker's style."""
    exp = Decimal(1).scaleb(-ndigits)
    return float(Decimal(repr(value)).quantize(exp, rounding=ROUND_HALF_UP))


class Regime(enum.Enum):
    """Quadrant classes of the autonomy-coupling plane."""

    TRADITIONAL_DIGITAL = "traditional_digital"
    ISOLATED_AUTONOMOUS = "isolated_autonomous"
    DIGITALLY_OPTIMIZED = "digitally_optimized_human_centered"
    ANAI = "anai"


class Stage(enum.IntEnum):
    """Transition stages, ordered by ascending transition-potential band."""

    EMERGING = 0
    TRANSITIONAL = 1
    NEAR_ANAI = 2
    ANAI = 3

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class AutonomyComponents:
    """The four normalized autonomy scores.

    ``decision``: share of operational decisions taken without human override.
    ``execution``: degree to which actions are carried out autonomously.
    ``responsiveness``: presence of closed-loop real-time adaptation.
    ``self_modification``: capacity to update models/policies without
    external reprogramming.
    """

    decision: float
    execution: float
    responsiveness: float
    self_modification: float

    def __post_init__(self) -> None:
        for field in ("decision", "execution", "responsiveness", "self_modification"):
            object.__setattr__(self, field, check_unit(getattr(self, field), field))


@dataclass(frozen=True)
class InfraComponents:
    """The three normalized infrastructure-embedding scores.

    ``energy_penetration``: reach into energy infrastructure.
    ``data_dependence``: reliance on data infrastructure.
    ``physical_embedding``: integration with physical systems.
    """

    energy_penetration: float
    data_dependence: float
    physical_embedding: float

    def __post_init__(self) -> None:
        for field in ("energy_penetration", "data_dependence", "physical_embedding"):
            object.__setattr__(self, field, check_unit(getattr(self, field), field))


@dataclass(frozen=True)
class ClassifierConfig:
    """Thresholds driving regime and stage classification.

    ``tau`` is the transition threshold on the potential, ``high_cut`` the
    high/low quadrant cut applied to both indices, and ``stage_bands`` the
    three ascending cut points splitting [0, 1] into the four stages. The
    top band must start exactly at ``tau`` so the stage and threshold views
    agree on what counts as fully transitioned.
    """

    tau: float = 0.5
    high_cut: float = 0.5
    stage_bands: tuple[float, float, float] = (0.35, 0.45, 0.5)

    def __post_init__(self) -> None:
        object.__setattr__(self, "tau", check_unit(self.tau, "tau"))
        hc = float(self.high_cut)
        if not math.isfinite(hc) or not 0.0 < hc < 1.0:
            raise ValueError(f"high_cut must be in (0, 1), got {self.high_cut!r}")
        object.__setattr__(self, "high_cut", hc)
        bands = tuple(float(b) for b in self.stage_bands)
        if len(bands) != 3:
            raise ValueError("stage_bands must contain exactly 3 cut points")
        if not all(math.isfinite(b) for b in bands):
            raise ValueError("stage_bands must be finite")
        if not 0.0 < bands[0] < bands[1] < bands[2]:
            raise ValueError(f"stage_bands must be strictly ascending in (0, 1], got {bands}")
        if bands[2] != self.tau:
            raise ValueError(
                f"top stage band must start at tau ({self.tau}), got {bands[2]}"
            )
        object.__setattr__(self, "stage_bands", bands)

    @classmethod
    def for_tau(cls, tau: float, high_cut: float = 0.5) -> "ClassifierConfig":
        """Default bands for an arbitrary threshold.

        Uses the standard cuts (0.35, 0.45, tau) when they stay ascending;
        for small tau the lower cuts are scaled proportionally instead.
        """
        tau = check_unit(tau, "tau")
        if tau > 0.45:
            bands = (0.35, 0.45, tau)
        else:
            bands = (0.7 * tau, 0.9 * tau, tau)
        return cls(tau=tau, high_cut=high_cut, stage_bands=bands)


@dataclass(frozen=True)
class DomainAssessment:
    """Named component scores for one infrastructure domain."""

    name: str
    autonomy: AutonomyComponents
    infra: InfraComponents

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("domain name must be nonempty")


@dataclass(frozen=True)
class DomainReport:
    """Full classification of one domain, with signed distance to threshold.

    ``tau_distance`` is tau minus the transition potential: negative once
    the domain is past the threshold. ``near_boundary`` flags high/high
    points that still sit at or below the threshold.
    """

    name: str
    aix: float
    icc: float
    ttp: float
    regime: Regime
    stage: Stage
    tau_distance: float
    near_boundary: bool


def autonomy_index(components: AutonomyComponents) -> float:
    """Unweighted mean of the four autonomy scores."""
    c = components
    return (c.decision + c.execution + c.responsiveness + c.self_modification) / 4.0


def coupling_coefficient(components: InfraComponents) -> float:
    """Product of the three embedding scores.

    Multiplicative on purpose: coupling collapses to zero as soon as any
    single dimension does.
    """
    c = components
    return c.energy_penetration * c.data_dependence * c.physical_embedding


def transition_potential(aix: float, icc: float) -> float:
    """Product of autonomy index and coupling coefficient."""
    return check_unit(aix, "aix") * check_unit(icc, "icc")


def is_transitioned(ttp: float, tau: float) -> bool:
    """True iff the potential strictly exceeds the threshold."""
    return check_unit(ttp, "ttp") > check_unit(tau, "tau")


def classify_regime(aix: float, icc: float, cfg: ClassifierConfig | None = None) -> Regime:
    """Label a point of the autonomy-coupling plane.

    The transitioned regime is bounded by the threshold on the potential,
    not by the quadrant cut: a high/high point whose potential is still at
    or below tau gets the nearest non-transitioned quadrant label (flip the
    coordinate with the smaller margin above the cut; ties go to the
    isolated-autonomy side). Use :func:`boundary_proximity` to detect such
    points.
    """
    cfg = cfg or ClassifierConfig()
    aix = check_unit(aix, "aix")
    icc = check_unit(icc, "icc")
    if aix * icc > cfg.tau:
        return Regime.ANAI
    high_a = aix >= cfg.high_cut
    high_i = icc >= cfg.high_cut
    if high_a and high_i:
        return Regime.ISOLATED_AUTONOMOUS if aix >= icc else Regime.DIGITALLY_OPTIMIZED
    if high_a:
        return Regime.ISOLATED_AUTONOMOUS
    if high_i:
        return Regime.DIGITALLY_OPTIMIZED
    return Regime.TRADITIONAL_DIGITAL


def boundary_proximity(aix: float, icc: float, cfg: ClassifierConfig | None = None) -> bool:
    """True for high/high points whose potential has not yet crossed tau."""
    cfg = cfg or ClassifierConfig()
    aix = check_unit(aix, "aix")
    icc = check_unit(icc, "icc")
    return aix >= cfg.high_cut and icc >= cfg.high_cut and aix * icc <= cfg.tau


def classify_stage(ttp: float, cfg: ClassifierConfig | None = None) -> Stage:
    """Band lookup of the potential against the stage cut points.

    Band edges belong to the upper band; in particular a potential exactly
    at tau is already in the top stage.
    """
    cfg = cfg or ClassifierConfig()
    ttp = check_unit(ttp, "ttp")
    return Stage(bisect_right(cfg.stage_bands, ttp))


def assess_domain(assessment: DomainAssessment, cfg: ClassifierConfig | None = None) -> DomainReport:
    """Compose the index pipeline for one named domain."""
    cfg = cfg or ClassifierConfig()
    aix = autonomy_index(assessment.autonomy)
    icc = coupling_coefficient(assessment.infra)
    ttp = transition_potential(aix, icc)
    return DomainReport(
        name=assessment.name,
        aix=aix,
        icc=icc,
        ttp=ttp,
        regime=classify_regime(aix, icc, cfg),
        stage=classify_stage(ttp, cfg),
        tau_distance=cfg.tau - ttp,
        near_boundary=boundary_proximity(aix, icc, cfg),
    )
