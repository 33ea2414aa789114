"""Analytic path solutions, expectations, bounds and horizons.

Everything here is an independent evaluation route for quantities the
step recursion also produces: exact per-path solutions given realized
draws and controls, expectation curves under the linear feedback policy,
worst-case envelopes, and the validity window inside which the
susceptible count is guaranteed nonnegative.  The Monte Carlo engine is
cross-checked against these formulas, never the other way around.

Two-branch formulas (geometric sum vs its degenerate linear limit) select
the branch by comparing the discriminant against ``DISCRIMINANT_TOL``;
within tolerance the linear branch is used, which avoids catastrophic
cancellation near the pole.  Negative-discriminant regions have no stated
formula and raise ``OutOfBranchError`` instead of extrapolating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import ModelParams, UncertaintyDraw
from .policy import admissible_gain_range

DISCRIMINANT_TOL = 1e-12

CURVE_KINDS = ("infected", "susceptible", "deceased", "recovered_upper", "recovered_lower")


class WindowExceededError(ValueError):
    """Requested horizon lies beyond the susceptible-nonnegativity window."""


class OutOfBranchError(ValueError):
    """Negative discriminant: no closed form is defined in this region."""


@dataclass(frozen=True)
class ExpectationCurve:
    """Per-day expectation (or expectation bound) curve, indexed 0..horizon."""

    values: np.ndarray
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in CURVE_KINDS:
            raise ValueError(f"unknown curve kind {self.kind!r}")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def horizon(self) -> int:
        return len(self.values) - 1


def _unpack(draws: Sequence[UncertaintyDraw], controls: Sequence[float]):
    if len(draws) != len(controls):
        raise ValueError(f"length mismatch: {len(draws)} draws vs {len(controls)} controls")
    delta = np.array([d.delta for d in draws], dtype=np.float64)
    v = np.array([d.v for d in draws], dtype=np.float64)
    d_i = np.array([d.d_i for d in draws], dtype=np.float64)
    u = np.asarray(controls, dtype=np.float64)
    if len(u) and u.min() < 0:
        raise ValueError("controls must be nonnegative")
    return delta, v, d_i, u


def _prefix_products(delta: np.ndarray, d_i: np.ndarray) -> np.ndarray:
    # P[j] = prod_{m<j} (1 + delta(m) - d_i(m)), P[0] = 1.
    factors = 1.0 + delta - d_i
    out = np.empty(len(factors) + 1, dtype=np.float64)
    out[0] = 1.0
    np.cumprod(factors, out=out[1:])
    return out


def infected_path_oracle(
    params: ModelParams,
    draws: Sequence[UncertaintyDraw],
    controls: Sequence[float],
) -> np.ndarray:
    """Exact infected path I(0..k) from the transition-product sum.

    I(k) is the transition product from day 0 times I0, minus each prior
    day's removed mass v(i)u(i) propagated forward by the transition
    product from day i+1.  Controls must be causal: u(i) may not depend on
    draws after day i.
    """
    delta, v, d_i, u = _unpack(draws, controls)
    prefix = _prefix_products(delta, d_i)
    horizon = len(u)
    out = np.empty(horizon + 1, dtype=np.float64)
    out[0] = params.i0
    for k in range(1, horizon + 1):
        removed = 0.0
        for i in range(k):
            removed += prefix[k] / prefix[i + 1] * v[i] * u[i]
        out[k] = prefix[k] * params.i0 - removed
    return out


def susceptible_path_oracle(
    params: ModelParams,
    draws: Sequence[UncertaintyDraw],
    controls: Sequence[float],
) -> np.ndarray:
    """Exact susceptible path: S(k) = S0 minus the accumulated delta(i) I(i)."""
    delta, _, _, _ = _unpack(draws, controls)
    infected = infected_path_oracle(params, draws, controls)
    out = np.empty(len(delta) + 1, dtype=np.float64)
    out[0] = params.s0
    out[1:] = params.s0 - np.cumsum(delta * infected[:-1])
    return out


def recovered_path_oracle(
    params: ModelParams,
    draws: Sequence[UncertaintyDraw],
    controls: Sequence[float],
) -> np.ndarray:
    """Exact recovered path: the running sum of v(i) u(i); non-decreasing."""
    _, v, _, u = _unpack(draws, controls)
    out = np.empty(len(u) + 1, dtype=np.float64)
    out[0] = 0.0
    out[1:] = np.cumsum(v * u)
    return out


def deceased_path_oracle(
    params: ModelParams,
    draws: Sequence[UncertaintyDraw],
    controls: Sequence[float],
) -> np.ndarray:
    """Exact deceased path: the running sum of d_i(i) I(i); non-decreasing."""
    _, _, d_i, _ = _unpack(draws, controls)
    infected = infected_path_oracle(params, draws, controls)
    out = np.empty(len(d_i) + 1, dtype=np.float64)
    out[0] = 0.0
    out[1:] = np.cumsum(d_i * infected[:-1])
    return out


def no_control_profile(
    params: ModelParams,
    draws: Sequence[UncertaintyDraw],
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(S, I, R, D) paths when control is absent or completely ineffective.

    With u ~ 0 the infected count compounds through the raw transition
    product, nobody recovers, and deaths accumulate off the compounding
    infected curve: the uncontrolled outbreak profile.
    """
    delta = np.array([d.delta for d in draws], dtype=np.float64)
    d_i = np.array([d.d_i for d in draws], dtype=np.float64)
    prefix = _prefix_products(delta, d_i)
    infected = prefix * params.i0
    susceptible = np.empty_like(infected)
    susceptible[0] = params.s0
    susceptible[1:] = params.s0 - np.cumsum(delta * infected[:-1])
    recovered = np.zeros_like(infected)
    deceased = np.empty_like(infected)
    deceased[0] = 0.0
    deceased[1:] = np.cumsum(d_i * infected[:-1])
    return susceptible, infected, recovered, deceased


def _check_admissible(params: ModelParams, gain: float) -> None:
    lo, hi = admissible_gain_range(params)
    if not lo <= gain <= hi:
        raise ValueError(
            f"gain {gain} outside admissible range [{lo}, {hi}]; "
            "the expectation formulas require nonnegative infected counts"
        )


def _geometric_ratio(params: ModelParams, gain: float) -> float:
    return 1.0 + params.delta_mean - params.d_mean - gain * params.v_mean


def expected_infected_linear(params: ModelParams, gain: float, horizon: int) -> ExpectationCurve:
    """E[I(k)] = rho**k * I0 under u = gain * I, rho = 1 + delta_mean - d_mean - gain*v_mean."""
    _check_admissible(params, gain)
    rho = _geometric_ratio(params, gain)
    values = rho ** np.arange(horizon + 1, dtype=np.float64) * params.i0
    return ExpectationCurve(values=values, kind="infected")


def expected_susceptible_linear(params: ModelParams, gain: float, horizon: int) -> ExpectationCurve:
    """Expected susceptible curve under the linear policy.

    Valid only through the susceptible-nonnegativity window
    ``floor(s0 / (i0 * delta_max))``; beyond it the closed form can go
    negative, so the horizon is rejected outright.
    """
    _check_admissible(params, gain)
    window = susceptible_nonneg_horizon(params)
    if horizon > window:
        raise WindowExceededError(
            f"horizon {horizon} exceeds the susceptible validity window {window}"
        )
    disc = gain * params.v_mean - (params.delta_mean - params.d_mean)
    k = np.arange(horizon + 1, dtype=np.float64)
    if disc > DISCRIMINANT_TOL:
        rho = _geometric_ratio(params, gain)
        values = params.s0 - params.delta_mean * params.i0 * (1.0 - rho**k) / disc
    elif disc >= -DISCRIMINANT_TOL:
        values = params.s0 - params.i0 * params.delta_mean * k
    else:
        raise OutOfBranchError(
            f"gain*v_mean - delta_mean + d_mean = {disc} < 0: no susceptible closed form"
        )
    return ExpectationCurve(values=values, kind="susceptible")


def expected_deceased_linear(params: ModelParams, gain: float, horizon: int) -> ExpectationCurve:
    """Expected deceased curve under the linear policy (geometric or linear branch)."""
    _check_admissible(params, gain)
    disc = gain * params.v_mean - params.delta_mean + params.d_mean
    k = np.arange(horizon + 1, dtype=np.float64)
    if disc > DISCRIMINANT_TOL:
        rho = _geometric_ratio(params, gain)
        values = params.d_mean * params.i0 * (1.0 - rho**k) / disc
    elif disc >= -DISCRIMINANT_TOL:
        values = params.d_mean * params.i0 * k
    else:
        raise OutOfBranchError(
            f"gain*v_mean - delta_mean + d_mean = {disc} < 0: no deceased closed form"
        )
    return ExpectationCurve(values=values, kind="deceased")


def expected_deceased_limit(params: ModelParams, gain: float) -> float:
    """Long-run limit of E[D(k)]: i0*d_mean/disc, or infinity when disc is zero."""
    _check_admissible(params, gain)
    disc = gain * params.v_mean - params.delta_mean + params.d_mean
    if disc > DISCRIMINANT_TOL:
        return params.i0 * params.d_mean / disc
    if disc >= -DISCRIMINANT_TOL:
        return math.inf
    raise OutOfBranchError(
        f"gain*v_mean - delta_mean + d_mean = {disc} < 0: no deceased limit"
    )


def expected_recovered_bounds_linear(
    params: ModelParams, gain: float, horizon: int
) -> tuple[ExpectationCurve, ExpectationCurve]:
    """Lower/upper brackets of E[R(k)] under the linear policy.

    The recovered count accumulates v(i) u(i), so its expectation is
    bracketed by v_min and v_max times the accumulated expected effort
    gain * E[I(i)].
    """
    expected_infected = expected_infected_linear(params, gain, horizon).values
    effort = np.empty(horizon + 1, dtype=np.float64)
    effort[0] = 0.0
    effort[1:] = np.cumsum(gain * expected_infected[:-1])
    lower = ExpectationCurve(values=params.v_min * effort, kind="recovered_lower")
    upper = ExpectationCurve(values=params.v_max * effort, kind="recovered_upper")
    return lower, upper


def deceased_bound_pathwise(params: ModelParams, gain: float, horizon: int) -> np.ndarray:
    """Almost-sure upper envelope of D(k) for gains at or above delta_max/v_min."""
    lo = params.delta_max / params.v_min
    _, hi = admissible_gain_range(params)
    if not lo <= gain <= hi:
        raise ValueError(
            f"gain {gain} outside [{lo}, {hi}]; the deceased envelope needs "
            "gain*v_min to dominate delta_max within the admissible range"
        )
    disc = gain * params.v_min - params.delta_max
    k = np.arange(horizon + 1, dtype=np.float64)
    if disc > DISCRIMINANT_TOL:
        shrink = 1.0 + params.delta_max - gain * params.v_min
        return params.d_max * params.i0 * (1.0 - shrink**k) / disc
    return params.d_max * params.i0 * k


def susceptible_nonneg_horizon(params: ModelParams) -> int | float:
    """Day count through which S(k) >= 0 holds on every path.

    Returns ``floor(s0 / (i0 * delta_max))``, or infinity when
    delta_max = 0 (nobody ever leaves the susceptible pool).
    """
    if params.delta_max == 0:
        return math.inf
    return math.floor(params.s0 / (params.i0 * params.delta_max))


def expected_infected_general_bound(
    params: ModelParams,
    expected_controls: Sequence[float],
    horizon: int,
) -> np.ndarray:
    """Upper bound on E[I(k)] under any causal policy with known mean efforts.

    Compounds I0 at the mean growth factor 1 + delta_mean - d_mean while
    discounting each day's expected effort at the worst-case effectiveness
    v_min.
    """
    efforts = np.asarray(expected_controls, dtype=np.float64)
    if len(efforts) != horizon:
        raise ValueError(f"need {horizon} expected controls, got {len(efforts)}")
    if len(efforts) and efforts.min() < 0:
        raise ValueError("expected controls must be nonnegative")
    growth = 1.0 + params.delta_mean - params.d_mean
    out = np.empty(horizon + 1, dtype=np.float64)
    out[0] = params.i0
    for k in range(horizon):
        out[k + 1] = growth * out[k] - params.v_min * efforts[k]
    return out


__all__ = [
    "DISCRIMINANT_TOL",
    "CURVE_KINDS",
    "ExpectationCurve",
    "WindowExceededError",
    "OutOfBranchError",
    "infected_path_oracle",
    "susceptible_path_oracle",
    "recovered_path_oracle",
    "deceased_path_oracle",
    "no_control_profile",
    "expected_infected_linear",
    "expected_susceptible_linear",
    "expected_deceased_linear",
    "expected_deceased_limit",
    "expected_recovered_bounds_linear",
    "deceased_bound_pathwise",
    "susceptible_nonneg_horizon",
    "expected_infected_general_bound",
]
