"""Shared fixtures: reference parameter sets, scenarios and random instances."""

from __future__ import annotations

import numpy as np
import pytest

from sird_control import DistributionSpec, ModelParams, PolicyConfig, UncertaintyDraw
from sird_control.simulate import Scenario


@pytest.fixture
def toy_params() -> ModelParams:
    """Small classroom-sized parameter set for hand-checkable examples."""
    return ModelParams(
        s0=1000.0, i0=10.0,
        delta_max=0.3, d_max=0.05, v_min=0.1, v_max=0.5,
        delta_mean=0.15, d_mean=0.02, v_mean=0.3,
    )


def make_average_params() -> ModelParams:
    """Parameters for the average-control reference scenario."""
    return ModelParams(
        s0=1_000_000.0, i0=100.0,
        delta_max=0.3, d_max=0.004, v_min=0.1, v_max=0.2,
        delta_mean=0.2, d_mean=0.002, v_mean=0.15,
    )


def make_average_scenario(paths: int = 2000, horizon: int = 200,
                          gain: float | None = None, seed: int = 20200301) -> Scenario:
    params = make_average_params()
    if gain is None:
        gain = params.delta_mean / params.v_mean
    return Scenario(
        params=params,
        delta_spec=DistributionSpec.uniform(0.1, 0.3),
        v_spec=DistributionSpec.uniform(0.1, 0.2),
        d_i_spec=DistributionSpec.uniform(0.0, 0.004),
        policy=PolicyConfig(gain=gain, resource_cap=max(2.0, gain)),
        horizon=horizon,
        paths=paths,
        master_seed=seed,
    )


def make_worst_case_params() -> ModelParams:
    """Parameters satisfying the worst-case (almost-sure) gain condition."""
    return ModelParams(
        s0=1_000_000.0, i0=100.0,
        delta_max=0.2, d_max=0.1, v_min=0.5, v_max=0.6,
        delta_mean=0.1, d_mean=0.05, v_mean=0.55,
    )


def make_worst_case_scenario(paths: int = 1000, horizon: int = 200,
                             gain: float = 1.0, seed: int = 41) -> Scenario:
    params = make_worst_case_params()
    return Scenario(
        params=params,
        delta_spec=DistributionSpec.uniform(0.0, 0.2),
        v_spec=DistributionSpec.uniform(0.5, 0.6),
        d_i_spec=DistributionSpec.uniform(0.0, 0.1),
        policy=PolicyConfig(gain=gain, resource_cap=max(2.0, gain)),
        horizon=horizon,
        paths=paths,
        master_seed=seed,
    )


@pytest.fixture
def average_scenario() -> Scenario:
    return make_average_scenario()


@pytest.fixture
def worst_case_scenario() -> Scenario:
    return make_worst_case_scenario()


def random_params(rng: np.random.Generator) -> ModelParams:
    """A random valid parameter set with nondegenerate bounds."""
    delta_max = rng.uniform(0.05, 0.5)
    d_max = rng.uniform(0.01, 0.2)
    v_min = rng.uniform(0.05, 0.4)
    v_max = min(v_min + rng.uniform(0.05, 0.4), 1.0)
    return ModelParams(
        s0=rng.uniform(5e3, 5e4),
        i0=rng.uniform(20.0, 200.0),
        delta_max=delta_max,
        d_max=d_max,
        v_min=v_min,
        v_max=v_max,
        delta_mean=delta_max * rng.uniform(0.3, 0.9),
        d_mean=d_max * rng.uniform(0.2, 0.9),
        v_mean=v_min + (v_max - v_min) * rng.uniform(0.2, 0.8),
    )


def random_draws(rng: np.random.Generator, params: ModelParams,
                 horizon: int) -> list[UncertaintyDraw]:
    delta = rng.uniform(0.0, params.delta_max, horizon)
    v = rng.uniform(params.v_min, params.v_max, horizon)
    d_i = rng.uniform(0.0, params.d_max, horizon)
    return [UncertaintyDraw(delta=float(a), v=float(b), d_i=float(c))
            for a, b, c in zip(delta, v, d_i)]


def assert_paths_close(actual, expected, rel: float = 1e-9) -> None:
    """Trajectory agreement to a relative tolerance in the path-uniform norm."""
    actual = np.asarray(actual, dtype=np.float64)
    expected = np.asarray(expected, dtype=np.float64)
    scale = max(1.0, float(np.abs(actual).max()), float(np.abs(expected).max()))
    np.testing.assert_allclose(actual, expected, rtol=rel, atol=rel * scale)
