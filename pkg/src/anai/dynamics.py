"""Time-domain simulation of the transition model.

Autonomy and infrastructure coupling follow bounded logistic growth; the
feedback variant adds a compute state whose growth is driven by deployed
autonomy and feeds infrastructure embedding through a configurable coupling
function, with induced energy demand proportional to compute. Trajectories
carry the pointwise transition potential and the first threshold crossing.

Integration is classical fixed-step RK4: the right-hand sides are smooth
and non-stiff, and a fixed step keeps runs deterministic and directly
comparable against the closed-form logistic solution.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from . import _kernels
from .indices import ClassifierConfig, check_unit

__all__ = [
    "CLAMP_TOL",
    "ClampViolation",
    "CouplingFunction",
    "CrossingEvent",
    "DegenerateTrajectory",
    "FeedbackParams",
    "GrowthDecomposition",
    "IntegrationError",
    "LogisticParams",
    "NonFiniteState",
    "ScenarioConfig",
    "TimeGrid",
    "Trajectory",
    "TrajectoryPoint",
    "crossing_time",
    "growth_decomposition",
    "integrate",
    "logistic_closed_form",
    "simulate",
    "simulate_decoupled",
    "simulate_feedback",
]

# RK4 may overshoot an invariant bound by its local truncation error; anything
# beyond this is treated as a sign that the step size is too large.
CLAMP_TOL = 1e-9

# bisection tolerance (in time units) for threshold-crossing refinement
CROSSING_TIME_TOL = 1e-9


class IntegrationError(RuntimeError):
    """Base class for numerical failures during integration."""


class NonFiniteState(IntegrationError):
    """A state component became NaN or infinite."""


class ClampViolation(IntegrationError):
    """A state left its bounds by more than the clamp tolerance."""


class DegenerateTrajectory(ValueError):
    """Trajectory unusable for the requested analysis (zero interior values)."""


def _positive(value: float, name: str) -> float:
    v = float(value)
    if not math.isfinite(v) or v <= 0.0:
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return v


def _nonnegative(value: float, name: str) -> float:
    v = float(value)
    if not math.isfinite(v) or v < 0.0:
        raise ValueError(f"{name} must be a nonnegative finite number, got {value!r}")
    return v


@dataclass(frozen=True)
class LogisticParams:
    """Growth rate, ceiling and initial value for one logistic state."""

    rate: float
    capacity: float
    x0: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "rate", _positive(self.rate, "rate"))
        cap = float(self.capacity)
        if not math.isfinite(cap) or not 0.0 < cap <= 1.0:
            raise ValueError(f"capacity must be in (0, 1], got {self.capacity!r}")
        object.__setattr__(self, "capacity", cap)
        x0 = _nonnegative(self.x0, "x0")
        if x0 > cap:
            raise ValueError(f"x0 must not exceed capacity ({cap}), got {self.x0!r}")
        object.__setattr__(self, "x0", x0)


class CouplingFunction(enum.Enum):
    """How compute intensity drives infrastructure embedding."""

    LINEAR = "linear"
    LOG = "log"
    SATURATING = "saturating"


_COUPLING_CODES = {
    CouplingFunction.LINEAR: _kernels.COUPLING_LINEAR,
    CouplingFunction.LOG: _kernels.COUPLING_LOG,
    CouplingFunction.SATURATING: _kernels.COUPLING_SATURATING,
}


@dataclass(frozen=True)
class FeedbackParams:
    """Parameters of the energy/compute feedback variant.

    ``kappa_e`` converts compute intensity to induced energy demand,
    ``beta_f`` is the feedback gain on infrastructure embedding, ``gamma_c``
    the autonomy-driven compute growth rate, and ``c0`` the initial compute
    intensity. The coupling function is normalized by its value at ``c0`` so
    the gain means the same thing across coupling choices. With
    ``combine_logistic`` the feedback term adds to the intrinsic logistic
    embedding dynamic instead of replacing it.
    """

    kappa_e: float
    beta_f: float
    gamma_c: float
    c0: float
    coupling: CouplingFunction = CouplingFunction.SATURATING
    c_half: float | None = None
    combine_logistic: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "kappa_e", _positive(self.kappa_e, "kappa_e"))
        object.__setattr__(self, "beta_f", _nonnegative(self.beta_f, "beta_f"))
        object.__setattr__(self, "gamma_c", _nonnegative(self.gamma_c, "gamma_c"))
        object.__setattr__(self, "c0", _positive(self.c0, "c0"))
        if not isinstance(self.coupling, CouplingFunction):
            object.__setattr__(self, "coupling", CouplingFunction(self.coupling))
        if self.c_half is None:
            if self.coupling is CouplingFunction.SATURATING:
                object.__setattr__(self, "c_half", 1.0)
        else:
            object.__setattr__(self, "c_half", _positive(self.c_half, "c_half"))

    def coupling_value(self, c: float) -> float:
        """Raw (unnormalized) coupling function at compute intensity ``c``."""
        if self.coupling is CouplingFunction.LINEAR:
            return float(c)
        if self.coupling is CouplingFunction.LOG:
            return math.log1p(c)
        return c / (self.c_half + c)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid: [t_start, t_end] split into round((t_end-t_start)/dt) steps."""

    t_start: float
    t_end: float
    dt: float

    def __post_init__(self) -> None:
        for name in ("t_start", "t_end", "dt"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {getattr(self, name)!r}")
            object.__setattr__(self, name, v)
        if self.t_end <= self.t_start:
            raise ValueError(f"t_end must exceed t_start, got [{self.t_start}, {self.t_end}]")
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if self.n_steps < 1:
            raise ValueError("grid must contain at least one step")

    @property
    def n_steps(self) -> int:
        return int(round((self.t_end - self.t_start) / self.dt))

    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.n_steps + 1)


@dataclass(frozen=True)
class ScenarioConfig:
    """A complete simulation specification."""

    autonomy: LogisticParams
    infra: LogisticParams
    tau: float
    grid: TimeGrid
    feedback: FeedbackParams | None = None
    classifier: ClassifierConfig | None = None
    time_unit_label: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "tau", check_unit(self.tau, "tau"))
        if self.classifier is not None and self.classifier.tau != self.tau:
            raise ValueError(
                f"classifier tau ({self.classifier.tau}) must match scenario tau ({self.tau})"
            )


@dataclass(frozen=True)
class CrossingEvent:
    """First time the transition potential strictly exceeds the threshold."""

    t_cross: float
    ttp_at_cross: float


@dataclass(frozen=True)
class TrajectoryPoint:
    t: float
    aix: float
    icc: float
    ttp: float
    compute: float | None = None
    energy: float | None = None


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time-indexed simulation output as parallel arrays.

    ``compute`` and ``energy`` are present only for feedback runs.
    """

    t: np.ndarray
    aix: np.ndarray
    icc: np.ndarray
    ttp: np.ndarray
    compute: np.ndarray | None = None
    energy: np.ndarray | None = None
    crossing: CrossingEvent | None = None

    def __len__(self) -> int:
        return len(self.t)

    def point(self, i: int) -> TrajectoryPoint:
        return TrajectoryPoint(
            t=float(self.t[i]),
            aix=float(self.aix[i]),
            icc=float(self.icc[i]),
            ttp=float(self.ttp[i]),
            compute=None if self.compute is None else float(self.compute[i]),
            energy=None if self.energy is None else float(self.energy[i]),
        )

    def __iter__(self) -> Iterator[TrajectoryPoint]:
        return (self.point(i) for i in range(len(self)))


@dataclass(frozen=True, eq=False)
class GrowthDecomposition:
    """Central-difference relative growth rates at interior grid points."""

    t: np.ndarray
    aix_rate: np.ndarray
    icc_rate: np.ndarray
    ttp_rate: np.ndarray


def logistic_closed_form(p: LogisticParams, t) -> np.ndarray | float:
    """Exact logistic solution x(t) = K / (1 + ((K - x0)/x0) exp(-rate t)).

    Accepts a scalar or array ``t``. ``x0 = 0`` is the fixed point at zero,
    so the result is identically zero there.
    """
    t_arr = np.asarray(t, dtype=float)
    if p.x0 == 0.0:
        out = np.zeros_like(t_arr)
        return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out
    ratio = (p.capacity - p.x0) / p.x0
    with np.errstate(over="ignore"):
        out = p.capacity / (1.0 + ratio * np.exp(-p.rate * t_arr))
    return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out


def integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    grid: TimeGrid,
    initial_state: Sequence[float],
    lower: Sequence[float] | None = None,
    upper: Sequence[float] | None = None,
    clamp_tol: float = CLAMP_TOL,
) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step classical RK4 over an arbitrary right-hand side.

    Args:
        rhs: derivative function ``(t, state) -> dstate``.
        grid: uniform time grid.
        initial_state: state vector at ``grid.t_start``.
        lower, upper: optional per-component bounds. Overshoot within
            ``clamp_tol`` is clamped; more raises :class:`ClampViolation`.

    Returns:
        ``(times, states)`` with ``states.shape == (n_steps + 1, dim)``.

    Raises:
        NonFiniteState: a state component became NaN or infinite.
        ClampViolation: a bound was exceeded by more than ``clamp_tol``.
    """
    y = np.array(initial_state, dtype=float).reshape(-1).copy()
    lo = None if lower is None else np.asarray(lower, dtype=float)
    hi = None if upper is None else np.asarray(upper, dtype=float)
    times = grid.times()
    h = grid.dt
    out = np.empty((grid.n_steps + 1, y.size))
    out[0] = y
    for k in range(grid.n_steps):
        t = times[k]
        k1 = np.asarray(rhs(t, y), dtype=float)
        k2 = np.asarray(rhs(t + 0.5 * h, y + 0.5 * h * k1), dtype=float)
        k3 = np.asarray(rhs(t + 0.5 * h, y + 0.5 * h * k2), dtype=float)
        k4 = np.asarray(rhs(t + h, y + h * k3), dtype=float)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise NonFiniteState(f"state became non-finite at t = {times[k + 1]!r}")
        if lo is not None:
            below = y < lo
            if np.any(below):
                if np.any((lo - y)[below] > clamp_tol):
                    raise ClampViolation(
                        f"state fell below its lower bound by more than {clamp_tol} "
                        f"at t = {times[k + 1]!r}; reduce dt"
                    )
                y = np.where(below, lo, y)
        if hi is not None:
            above = y > hi
            if np.any(above):
                if np.any((y - hi)[above] > clamp_tol):
                    raise ClampViolation(
                        f"state exceeded its upper bound by more than {clamp_tol} "
                        f"at t = {times[k + 1]!r}; reduce dt"
                    )
                y = np.where(above, hi, y)
        out[k + 1] = y
    return times, out


def _raise_for_status(status: int, step: int, grid: TimeGrid) -> None:
    if status == _kernels.STATUS_OK:
        return
    t_bad = grid.t_start + (step + 1) * grid.dt
    if status == _kernels.STATUS_NON_FINITE:
        raise NonFiniteState(f"state became non-finite at t = {t_bad!r}")
    raise ClampViolation(
        f"state left its bounds by more than {CLAMP_TOL} at t = {t_bad!r}; reduce dt"
    )


def simulate_decoupled(config: ScenarioConfig) -> Trajectory:
    """Simulate independently growing autonomy and embedding.

    Requires ``config.feedback`` to be absent.
    """
    if config.feedback is not None:
        raise ValueError("decoupled simulation requires a scenario without a feedback block")
    a, i = config.autonomy, config.infra
    aix, icc, status, step = _kernels.rk4_logistic_pair(
        a.rate, a.capacity, a.x0, i.rate, i.capacity, i.x0,
        config.grid.dt, config.grid.n_steps, CLAMP_TOL,
    )
    _raise_for_status(status, step, config.grid)
    t = config.grid.times()
    ttp = aix * icc
    return Trajectory(
        t=t, aix=aix, icc=icc, ttp=ttp,
        crossing=_crossing_from_arrays(t, ttp, config.tau),
    )


def simulate_feedback(config: ScenarioConfig) -> Trajectory:
    """Simulate the compute/energy feedback variant.

    State is (autonomy, embedding, compute): autonomy keeps its logistic
    dynamic, compute grows at ``gamma_c * autonomy * compute``, and
    embedding responds to the normalized coupling of compute with the same
    saturation ceiling as the logistic form. Energy demand is reported as
    ``kappa_e * compute``. Requires ``config.feedback`` to be present.
    """
    fb = config.feedback
    if fb is None:
        raise ValueError("feedback simulation requires a scenario with a feedback block")
    a, i = config.autonomy, config.infra
    f_ref = fb.coupling_value(fb.c0)
    c_half = fb.c_half if fb.c_half is not None else 1.0
    aix, icc, comp, status, step = _kernels.rk4_feedback(
        a.rate, a.capacity, a.x0, i.rate, i.capacity, i.x0,
        fb.combine_logistic, fb.beta_f, fb.gamma_c, fb.c0,
        _COUPLING_CODES[fb.coupling], c_half, f_ref,
        config.grid.dt, config.grid.n_steps, CLAMP_TOL,
    )
    _raise_for_status(status, step, config.grid)
    t = config.grid.times()
    ttp = aix * icc
    return Trajectory(
        t=t, aix=aix, icc=icc, ttp=ttp,
        compute=comp, energy=fb.kappa_e * comp,
        crossing=_crossing_from_arrays(t, ttp, config.tau),
    )


def simulate(config: ScenarioConfig) -> Trajectory:
    """Dispatch on the presence of the feedback block."""
    if config.feedback is None:
        return simulate_decoupled(config)
    return simulate_feedback(config)


def _crossing_from_arrays(t: np.ndarray, ttp: np.ndarray, tau: float) -> CrossingEvent | None:
    if ttp[0] > tau:
        # started already past the threshold: crossing at the grid start
        return CrossingEvent(t_cross=float(t[0]), ttp_at_cross=float(ttp[0]))
    above = ttp > tau
    if not above.any():
        return None
    i = int(np.argmax(above))
    lo_t, hi_t = float(t[i - 1]), float(t[i])
    lo_v, hi_v = float(ttp[i - 1]), float(ttp[i])

    def interp(s: float) -> float:
        return lo_v + (hi_v - lo_v) * (s - lo_t) / (hi_t - lo_t)

    lo, hi = lo_t, hi_t
    while hi - lo > CROSSING_TIME_TOL:
        mid = 0.5 * (lo + hi)
        if interp(mid) > tau:
            hi = mid
        else:
            lo = mid
    t_cross = 0.5 * (lo + hi)
    return CrossingEvent(t_cross=t_cross, ttp_at_cross=interp(t_cross))


def crossing_time(traj: Trajectory, tau: float) -> CrossingEvent | None:
    """Locate the first threshold crossing along a trajectory.

    Finds the first grid interval where the potential passes from <= tau to
    > tau and refines the time by bisection on the interpolated potential.
    A trajectory that starts above tau reports a crossing at its first
    point. Returns None when the threshold is never exceeded.
    """
    if len(traj) == 0:
        raise ValueError("trajectory must be nonempty")
    tau = check_unit(tau, "tau")
    return _crossing_from_arrays(traj.t, traj.ttp, tau)


def growth_decomposition(traj: Trajectory) -> GrowthDecomposition:
    """Relative growth rates of both factors and of their product.

    Uses central differences at interior grid points; by the product rule
    the potential's relative rate equals the sum of the factor rates, up to
    finite-difference error.
    """
    n = len(traj)
    if n < 3:
        raise ValueError("growth decomposition needs at least 3 trajectory points")
    t, a, b, p = traj.t, traj.aix, traj.icc, traj.ttp
    if np.any(a[1:-1] == 0.0) or np.any(b[1:-1] == 0.0) or np.any(p[1:-1] == 0.0):
        raise DegenerateTrajectory("zero interior values; relative rates are undefined")
    span = t[2:] - t[:-2]
    return GrowthDecomposition(
        t=t[1:-1].copy(),
        aix_rate=(a[2:] - a[:-2]) / span / a[1:-1],
        icc_rate=(b[2:] - b[:-2]) / span / b[1:-1],
        ttp_rate=(p[2:] - p[:-2]) / span / p[1:-1],
    )
