"""Shared fixtures and deterministic helpers for the test suite."""

from __future__ import annotations

import math

import numpy as np
import pytest

from anai import LogisticParams, ScenarioConfig, TimeGrid


def lcg_normals(seed: int, n: int) -> np.ndarray:
    """Language-neutral deterministic standard normals.

    Generator (so any implementation can reproduce the exact samples):

      * 32-bit linear congruential state update
        ``state = (1664525 * state + 1013904223) mod 2**32``
      * uniforms ``u = (state + 0.5) / 2**32`` (never exactly 0 or 1)
      * Box-Muller: each pair (u1, u2) of consecutive uniforms yields
        ``sqrt(-2 ln u1) * cos(2 pi u2)`` and ``sqrt(-2 ln u1) * sin(2 pi u2)``

    The first ``n`` normals produced this way are returned.
    """
    state = seed & 0xFFFFFFFF
    out: list[float] = []
    while len(out) < n:
        state = (1664525 * state + 1013904223) % 2**32
        u1 = (state + 0.5) / 2**32
        state = (1664525 * state + 1013904223) % 2**32
        u2 = (state + 0.5) / 2**32
        radius = math.sqrt(-2.0 * math.log(u1))
        out.append(radius * math.cos(2.0 * math.pi * u2))
        out.append(radius * math.sin(2.0 * math.pi * u2))
    return np.array(out[:n])


NOISE_SEED = 12345


def make_scenario(
    rate_a: float = 0.5,
    cap_a: float = 0.9,
    x0_a: float = 0.1,
    rate_i: float = 0.5,
    cap_i: float = 0.9,
    x0_i: float = 0.1,
    tau: float = 0.5,
    t_end: float = 20.0,
    dt: float = 0.01,
    **kwargs,
) -> ScenarioConfig:
    return ScenarioConfig(
        autonomy=LogisticParams(rate_a, cap_a, x0_a),
        infra=LogisticParams(rate_i, cap_i, x0_i),
        tau=tau,
        grid=TimeGrid(0.0, t_end, dt),
        **kwargs,
    )


@pytest.fixture
def symmetric_scenario() -> ScenarioConfig:
    return make_scenario()
