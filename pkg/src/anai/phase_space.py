"""Geometry of the autonomy-coupling plane.

The transition boundary is the hyperbola where the product of the two
indices equals the threshold; regime grids rasterize the classifier over
the unit square, and trajectories and domain assessments are projected
onto the plane for plotting. Output here is data only; rendering is left
to external tools.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory
from .indices import (
    ClassifierConfig,
    DomainAssessment,
    Regime,
    Stage,
    assess_domain,
    check_unit,
    classify_regime,
)

__all__ = [
    "REGIME_ORDER",
    "BoundaryCurve",
    "InvalidTau",
    "PositionedDomain",
    "RegimeGrid",
    "boundary_curve",
    "position_domains",
    "project_trajectory",
    "regime_grid",
]

# fixed code order used for the compact grid representation
REGIME_ORDER: tuple[Regime, ...] = (
    Regime.TRADITIONAL_DIGITAL,
    Regime.ISOLATED_AUTONOMOUS,
    Regime.DIGITALLY_OPTIMIZED,
    Regime.ANAI,
)
_REGIME_CODE = {regime: code for code, regime in enumerate(REGIME_ORDER)}


class InvalidTau(ValueError):
    """Threshold outside (0, 1]; the boundary leaves the unit square."""


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    """Sampled transition boundary: points with aix * icc = tau."""

    tau: float
    aix: np.ndarray
    icc: np.ndarray

    def __len__(self) -> int:
        return len(self.aix)


@dataclass(frozen=True, eq=False)
class RegimeGrid:
    """Regime labels at the cell centers of an n-by-n raster of the unit square.

    ``codes[i, j]`` holds the regime at center ((i + 0.5)/n, (j + 0.5)/n),
    i indexing the autonomy axis and j the coupling axis; codes follow
    ``REGIME_ORDER``.
    """

    resolution: int
    codes: np.ndarray

    def center(self, i: int, j: int) -> tuple[float, float]:
        n = self.resolution
        return (i + 0.5) / n, (j + 0.5) / n

    def label(self, i: int, j: int) -> Regime:
        return REGIME_ORDER[int(self.codes[i, j])]


@dataclass(frozen=True)
class PositionedDomain:
    """One domain assessment placed on the plane."""

    name: str
    aix: float
    icc: float
    ttp: float
    stage: Stage
    above_boundary: bool


def boundary_curve(tau: float, n: int) -> BoundaryCurve:
    """Sample the boundary hyperbola icc = tau / aix.

    ``aix`` is sampled uniformly on [tau, 1], which keeps every sampled
    point inside the unit square. ``tau = 1`` degenerates to the single
    corner point repeated n times.
    """
    tau = float(tau)
    if not 0.0 < tau <= 1.0:
        raise InvalidTau(f"tau must be in (0, 1], got {tau!r}")
    if n < 2:
        raise ValueError(f"need at least 2 boundary points, got {n}")
    aix = np.linspace(tau, 1.0, n)
    icc = tau / aix
    return BoundaryCurve(tau=tau, aix=aix, icc=icc)


def regime_grid(cfg: ClassifierConfig, n: int) -> RegimeGrid:
    """Classify every cell center of an n-by-n raster.

    Evaluation happens at cell centers rather than corners so no sample can
    sit exactly on the threshold for generic tau.
    """
    if n < 2:
        raise ValueError(f"grid resolution must be at least 2, got {n}")
    codes = np.empty((n, n), dtype=np.uint8)
    for i in range(n):
        aix = (i + 0.5) / n
        for j in range(n):
            icc = (j + 0.5) / n
            codes[i, j] = _REGIME_CODE[classify_regime(aix, icc, cfg)]
    return RegimeGrid(resolution=n, codes=codes)


def project_trajectory(traj: Trajectory) -> np.ndarray:
    """Time-ordered polyline of (aix, icc) pairs, shape (len, 2)."""
    if len(traj) == 0:
        raise ValueError("trajectory must be nonempty")
    return np.column_stack([traj.aix, traj.icc])


def position_domains(
    assessments: list[DomainAssessment], cfg: ClassifierConfig | None = None
) -> list[PositionedDomain]:
    """Place each assessed domain on the plane, preserving input order."""
    if not assessments:
        raise ValueError("need at least one domain assessment")
    cfg = cfg or ClassifierConfig()
    check_unit(cfg.tau, "tau")
    out = []
    for assessment in assessments:
        report = assess_domain(assessment, cfg)
        out.append(
            PositionedDomain(
                name=report.name,
                aix=report.aix,
                icc=report.icc,
                ttp=report.ttp,
                stage=report.stage,
                above_boundary=report.ttp > cfg.tau,
            )
        )
    return out
