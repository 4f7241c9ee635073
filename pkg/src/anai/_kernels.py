"""Fixed-step RK4 inner loops for the transition dynamics.

These loops dominate runtime for long grids, parameter sweeps and the
generated-case test suites, so they are compiled with numba when available.
Setting ``ANAI_DISABLE_NUMBA=1`` before import selects the interpreted
fallback: the identical functions running as plain Python over numpy
scalars, so both paths produce the same floating-point sequence.
``benchmarks/bench_kernels.py`` times one path against the other.

Kernels never raise; they report a status code and the index of the failing
step, and the wrappers in :mod:`anai.dynamics` turn those into exceptions.
"""

from __future__ import annotations

import math
import os

import numpy as np

STATUS_OK = 0
STATUS_NON_FINITE = 1
STATUS_CLAMP = 2

COUPLING_LINEAR = 0
COUPLING_LOG = 1
COUPLING_SATURATING = 2


def _numba_selected() -> bool:
    if os.environ.get("ANAI_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}:
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED = _numba_selected()


def _jit(fn):
    if NUMBA_ENABLED:
        from numba import njit

        return njit(cache=True)(fn)
    return fn


def _logistic_step_impl(x, rate, cap, dt):
    # classical RK4 for dx/dt = rate * x * (1 - x / cap)
    k1 = rate * x * (1.0 - x / cap)
    x2 = x + 0.5 * dt * k1
    k2 = rate * x2 * (1.0 - x2 / cap)
    x3 = x + 0.5 * dt * k2
    k3 = rate * x3 * (1.0 - x3 / cap)
    x4 = x + dt * k3
    k4 = rate * x4 * (1.0 - x4 / cap)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _settle_impl(x, upper, tol):
    # Accept tiny integrator overshoot past the bounds, flag anything larger.
    if not math.isfinite(x):
        return x, STATUS_NON_FINITE
    if x < 0.0:
        if -x <= tol:
            return 0.0, STATUS_OK
        return x, STATUS_CLAMP
    if x > upper:
        if x - upper <= tol:
            return upper, STATUS_OK
        return x, STATUS_CLAMP
    return x, STATUS_OK


def _coupling_impl(c, kind, c_half):
    if kind == COUPLING_LINEAR:
        return c
    if kind == COUPLING_LOG:
        return math.log1p(c)
    return c / (c_half + c)


def _feedback_rhs_impl(
    a, b, c, rate_a, cap_a, rate_i, cap_i, combine, beta_f, gamma_c, kind, c_half, f_ref
):
    da = rate_a * a * (1.0 - a / cap_a)
    dc = gamma_c * a * c
    db = beta_f * (_coupling(c, kind, c_half) / f_ref) * (1.0 - b / cap_i)
    if combine:
        db += rate_i * b * (1.0 - b / cap_i)
    return da, db, dc


def _pair_loop_impl(rate_a, cap_a, x0_a, rate_i, cap_i, x0_i, dt, n_steps, clamp_tol):
    aix = np.empty(n_steps + 1)
    icc = np.empty(n_steps + 1)
    aix[0] = x0_a
    icc[0] = x0_i
    a = x0_a
    b = x0_i
    for k in range(n_steps):
        # the two states are uncoupled, so componentwise stepping is the
        # exact joint RK4 step
        a = _logistic_step(a, rate_a, cap_a, dt)
        b = _logistic_step(b, rate_i, cap_i, dt)
        a, st = _settle(a, cap_a, clamp_tol)
        if st != STATUS_OK:
            return aix, icc, st, k
        b, st = _settle(b, cap_i, clamp_tol)
        if st != STATUS_OK:
            return aix, icc, st, k
        aix[k + 1] = a
        icc[k + 1] = b
    return aix, icc, STATUS_OK, -1


def _feedback_loop_impl(
    rate_a,
    cap_a,
    x0_a,
    rate_i,
    cap_i,
    x0_i,
    combine,
    beta_f,
    gamma_c,
    c0,
    kind,
    c_half,
    f_ref,
    dt,
    n_steps,
    clamp_tol,
):
    aix = np.empty(n_steps + 1)
    icc = np.empty(n_steps + 1)
    comp = np.empty(n_steps + 1)
    aix[0] = x0_a
    icc[0] = x0_i
    comp[0] = c0
    a = x0_a
    b = x0_i
    c = c0
    h = dt
    inf = math.inf
    for k in range(n_steps):
        k1a, k1b, k1c = _feedback_rhs(
            a, b, c, rate_a, cap_a, rate_i, cap_i, combine, beta_f, gamma_c, kind, c_half, f_ref
        )
        k2a, k2b, k2c = _feedback_rhs(
            a + 0.5 * h * k1a,
            b + 0.5 * h * k1b,
            c + 0.5 * h * k1c,
            rate_a, cap_a, rate_i, cap_i, combine, beta_f, gamma_c, kind, c_half, f_ref,
        )
        k3a, k3b, k3c = _feedback_rhs(
            a + 0.5 * h * k2a,
            b + 0.5 * h * k2b,
            c + 0.5 * h * k2c,
            rate_a, cap_a, rate_i, cap_i, combine, beta_f, gamma_c, kind, c_half, f_ref,
        )
        k4a, k4b, k4c = _feedback_rhs(
            a + h * k3a,
            b + h * k3b,
            c + h * k3c,
            rate_a, cap_a, rate_i, cap_i, combine, beta_f, gamma_c, kind, c_half, f_ref,
        )
        a = a + (h / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        b = b + (h / 6.0) * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        c = c + (h / 6.0) * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
        a, st = _settle(a, cap_a, clamp_tol)
        if st != STATUS_OK:
            return aix, icc, comp, st, k
        b, st = _settle(b, cap_i, clamp_tol)
        if st != STATUS_OK:
            return aix, icc, comp, st, k
        c, st = _settle(c, inf, clamp_tol)
        if st != STATUS_OK:
            return aix, icc, comp, st, k
        aix[k + 1] = a
        icc[k + 1] = b
        comp[k + 1] = c
    return aix, icc, comp, STATUS_OK, -1


_logistic_step = _jit(_logistic_step_impl)
_settle = _jit(_settle_impl)
_coupling = _jit(_coupling_impl)
_feedback_rhs = _jit(_feedback_rhs_impl)
rk4_logistic_pair = _jit(_pair_loop_impl)
rk4_feedback = _jit(_feedback_loop_impl)
