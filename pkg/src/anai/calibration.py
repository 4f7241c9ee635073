"""Fitting logistic growth curves to observed series and what-if analysis.

The fitter is a damped Gauss-Newton loop (Levenberg-Marquardt style
damping) over the three logistic parameters, using the analytic Jacobian
of the closed-form solution. The parameter space is tiny, so a bespoke
solver with box-constraint projection beats pulling in a general-purpose
optimizer. Crossing prediction and parameter sweeps build on the fitted
curves and the simulator.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    LogisticParams,
    ScenarioConfig,
    logistic_closed_form,
    simulate,
)
from .indices import ClassifierConfig, check_unit

__all__ = [
    "SWEEP_PARAMETERS",
    "DegenerateSeries",
    "FitResult",
    "ObservedSeries",
    "SweepEntry",
    "SweepSpec",
    "UnconvergedFit",
    "fit_logistic",
    "predict_crossing",
    "sensitivity_sweep",
]

MAX_ITERATIONS = 200
GRADIENT_TOL = 1e-10
SSE_CHANGE_TOL = 1e-12

SWEEP_PARAMETERS = (
    "autonomy.rate",
    "autonomy.capacity",
    "infra.rate",
    "infra.capacity",
    "tau",
    "feedback.beta_f",
    "feedback.gamma_c",
)


class DegenerateSeries(ValueError):
    """Series on which the logistic model is unidentifiable."""


class UnconvergedFit(RuntimeError):
    """An operation required a converged fit but got a partial one."""


@dataclass(frozen=True, eq=False)
class ObservedSeries:
    """Observed (t, value) samples of one index, values in [0, 1]."""

    t: np.ndarray
    value: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        t = np.asarray(self.t, dtype=float)
        v = np.asarray(self.value, dtype=float)
        if t.ndim != 1 or v.ndim != 1 or len(t) != len(v):
            raise ValueError("t and value must be 1-d arrays of equal length")
        if len(t) < 4:
            raise ValueError(f"need at least 4 samples, got {len(t)}")
        if not np.all(np.isfinite(t)) or not np.all(np.isfinite(v)):
            raise ValueError("samples must be finite")
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample times must be strictly increasing")
        if np.any(v < 0.0) or np.any(v > 1.0):
            raise ValueError("values must lie in [0, 1]")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "value", v)

    def __len__(self) -> int:
        return len(self.t)


@dataclass(frozen=True)
class FitResult:
    """Fitted parameters with the residual sum and convergence status."""

    params: LogisticParams
    sse: float
    iterations: int
    converged: bool


def _model_and_jacobian(theta: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form logistic and its partials w.r.t. (rate, capacity, x0)."""
    rate, cap, x0 = theta
    e = np.exp(-rate * t)
    ratio = (cap - x0) / x0
    denom = 1.0 + ratio * e
    f = cap / denom
    d2 = denom * denom
    df_rate = cap * ratio * t * e / d2
    df_cap = 1.0 / denom - cap * e / (x0 * d2)
    df_x0 = cap * cap * e / (x0 * x0 * d2)
    return f, np.column_stack([df_rate, df_cap, df_x0])


def _project(theta: np.ndarray) -> np.ndarray:
    """Enforce rate > 0, capacity in (0, 1], 0 < x0 <= capacity."""
    rate = max(theta[0], 1e-12)
    cap = min(max(theta[1], 1e-9), 1.0)
    x0 = min(max(theta[2], 1e-12), cap)
    return np.array([rate, cap, x0])


def _initial_guess(t: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Warm start: capacity slightly above the observed maximum, x0 from the
    first sample, rate from least squares on the logit of interior samples."""
    cap0 = min(1.0, 1.05 * float(v.max()))
    x00 = min(max(float(v[0]), 1e-6), (1.0 - 1e-9) * cap0)
    interior = (v > 0.0) & (v < cap0)
    rate0 = 1.0
    if interior.sum() >= 2:
        z = np.log(v[interior] / (cap0 - v[interior]))
        slope = np.polyfit(t[interior], z, 1)[0]
        if slope > 0.0:
            rate0 = float(slope)
    return _project(np.array([rate0, cap0, x00]))


def fit_logistic(series: ObservedSeries) -> FitResult:
    """Least-squares fit of the closed-form logistic to an observed series.

    Args:
        series: validated samples; must show an increasing trend and at
            least one value strictly between zero and the observed maximum.

    Returns:
        A :class:`FitResult`; ``converged`` is False when the iteration cap
        was reached before the gradient or the relative residual change
        dropped below tolerance (the partial result is still returned).

    Raises:
        DegenerateSeries: flat or non-increasing-trend data.
    """
    t, v = series.t, series.value
    if float(v.max() - v.min()) < 1e-9:
        raise DegenerateSeries("series is flat; logistic parameters are unidentifiable")
    trend = np.polyfit(t, v, 1)[0]
    if trend <= 0.0:
        raise DegenerateSeries("series shows no increasing trend")
    if not np.any((v > 0.0) & (v < v.max())):
        raise DegenerateSeries("no sample strictly between zero and the maximum")

    theta = _initial_guess(t, v)
    f, jac = _model_and_jacobian(theta, t)
    residual = f - v
    sse = float(residual @ residual)
    lam = 1e-3
    converged = False
    iterations = 0
    while iterations < MAX_ITERATIONS:
        iterations += 1
        jtj = jac.T @ jac
        grad = jac.T @ residual
        damped = jtj + lam * np.diag(np.clip(np.diag(jtj), 1e-12, None))
        try:
            step = np.linalg.solve(damped, -grad)
        except np.linalg.LinAlgError:
            lam = min(lam * 10.0, 1e12)
            continue
        candidate = _project(theta + step)
        f_new, jac_new = _model_and_jacobian(candidate, t)
        residual_new = f_new - v
        sse_new = float(residual_new @ residual_new)
        if sse_new < sse:
            rel_change = (sse - sse_new) / max(sse, 1e-300)
            theta, jac, residual, sse = candidate, jac_new, residual_new, sse_new
            lam = max(lam / 10.0, 1e-12)
            grad_norm = float(np.max(np.abs(2.0 * jac.T @ residual)))
            if grad_norm < GRADIENT_TOL or rel_change < SSE_CHANGE_TOL:
                converged = True
                break
        else:
            lam = min(lam * 10.0, 1e12)
            if lam >= 1e12:
                # no downhill step exists at maximal damping: stationary
                converged = True
                break
    params = LogisticParams(rate=float(theta[0]), capacity=float(theta[1]), x0=float(theta[2]))
    return FitResult(params=params, sse=sse, iterations=iterations, converged=converged)


def predict_crossing(
    fit_a: FitResult, fit_i: FitResult, tau: float, t_start: float = 0.0
) -> float | None:
    """Root of the fitted product curve against the threshold.

    Scans forward from ``t_start`` with doubling brackets, then bisects to
    1e-9 time units. Returns None when the asymptotic product of the two
    capacities never reaches the threshold, and ``t_start`` itself when the
    product already exceeds tau there.

    Raises:
        UnconvergedFit: either input fit has ``converged=False``.
    """
    if not fit_a.converged or not fit_i.converged:
        raise UnconvergedFit("crossing prediction requires two converged fits")
    tau = check_unit(tau, "tau")
    pa, pi = fit_a.params, fit_i.params
    if pa.capacity * pi.capacity <= tau:
        return None
    if pa.x0 == 0.0 or pi.x0 == 0.0:
        return None

    def product(t: float) -> float:
        return float(logistic_closed_form(pa, t)) * float(logistic_closed_form(pi, t))

    if product(t_start) > tau:
        return t_start
    lo, hi = t_start, t_start + 1.0
    while product(hi) <= tau:
        lo, hi = hi, t_start + 2.0 * (hi - t_start)
        if not math.isfinite(hi):  # pragma: no cover - exp underflow ends the scan first
            return None
    while hi - lo > 1e-9:
        mid = 0.5 * (lo + hi)
        if product(mid) > tau:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class SweepSpec:
    """One scenario parameter swept over an ascending list of values."""

    base: ScenarioConfig
    parameter: str
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.parameter not in SWEEP_PARAMETERS:
            raise ValueError(
                f"unknown sweep parameter {self.parameter!r}; expected one of {SWEEP_PARAMETERS}"
            )
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValueError("sweep needs at least one value")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("sweep values must be strictly ascending")
        object.__setattr__(self, "values", values)
        if self.parameter.startswith("feedback.") and self.base.feedback is None:
            raise ValueError(f"{self.parameter} requires a scenario with a feedback block")
        for v in values:  # every swept value must yield a valid scenario
            apply_sweep_value(self.base, self.parameter, v)


@dataclass(frozen=True)
class SweepEntry:
    """Result of one sweep run; ``error`` holds the failure name if any."""

    value: float
    t_cross: float | None
    error: str | None = None


def apply_sweep_value(base: ScenarioConfig, parameter: str, value: float) -> ScenarioConfig:
    """Return a copy of ``base`` with one parameter replaced.

    Sweeping tau rebuilds the attached classifier (if any) with default
    bands for the new threshold, since stage bands are anchored to tau.
    """
    if parameter == "tau":
        classifier = None
        if base.classifier is not None:
            classifier = ClassifierConfig.for_tau(value, high_cut=base.classifier.high_cut)
        return dataclasses.replace(base, tau=value, classifier=classifier)
    block_name, field = parameter.split(".")
    block = getattr(base, block_name)
    return dataclasses.replace(base, **{block_name: dataclasses.replace(block, **{field: value})})


def sensitivity_sweep(spec: SweepSpec) -> list[SweepEntry]:
    """Simulate the base scenario once per swept value.

    Entries come back in input order; a simulation failure is recorded on
    its entry instead of aborting the remaining runs.
    """
    out = []
    for value in spec.values:
        config = apply_sweep_value(spec.base, spec.parameter, value)
        try:
            traj = simulate(config)
        except Exception as exc:  # noqa: BLE001 - per-entry error markers by contract
            out.append(SweepEntry(value=value, t_cross=None, error=type(exc).__name__))
            continue
        t_cross = None if traj.crossing is None else traj.crossing.t_cross
        out.append(SweepEntry(value=value, t_cross=t_cross))
    return out
