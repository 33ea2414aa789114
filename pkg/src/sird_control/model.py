"""Discrete-time stochastic SIRD dynamics with bounded uncertainties.

The population is split into susceptible (S), infected (I), recovered (R)
and deceased (D) counts on a daily grid.  Three mutually independent i.i.d.
bounded processes drive the recursion: the rate of undetected or
asymptomatic infections ``delta``, the effectiveness rate of the control
effort ``v``, and the per-day death rate of infected cases ``d_i``.  With
control effort ``u(k) >= 0`` the model advances as

    S(k+1) = S(k) - delta(k) * I(k)
    I(k+1) = (1 + delta(k)) * I(k) - v(k) * u(k) - d_i(k) * I(k)
    R(k+1) = R(k) + v(k) * u(k)
    D(k+1) = D(k) + d_i(k) * I(k)

Compartments are real-valued (continuum approximation) and the recursion
conserves S+I+R+D exactly, up to floating round-off.  ``step`` never clamps
a compartment at zero: nonnegativity is a property of admissible feedback
gains, and the simulator flags violations instead of hiding them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True)
class ModelParams:
    """Bounds and means of the three uncertainty processes plus initial counts.

    ``s0``/``i0`` are the day-0 susceptible and infected counts.  The bound
    fields declare the known supports ``delta in [0, delta_max]``,
    ``v in [v_min, v_max] subset (0, 1]`` and ``d_i in [0, d_max]`` with
    ``d_max < 1``; the ``*_mean`` fields are the process expectations.
    """

    s0: float
    i0: float
    delta_max: float
    d_max: float
    v_min: float
    v_max: float
    delta_mean: float
    d_mean: float
    v_mean: float

    def __post_init__(self) -> None:
        if not (self.s0 > 0 and self.i0 > 0):
            raise ValueError("initial counts s0 and i0 must be positive")
        if not 0 < self.v_min <= self.v_mean <= self.v_max <= 1:
            raise ValueError(
                f"need 0 < v_min <= v_mean <= v_max <= 1, got "
                f"({self.v_min}, {self.v_mean}, {self.v_max})"
            )
        if not 0 <= self.delta_mean <= self.delta_max:
            raise ValueError(
                f"need 0 <= delta_mean <= delta_max, got "
                f"({self.delta_mean}, {self.delta_max})"
            )
        if not 0 <= self.d_mean <= self.d_max < 1:
            raise ValueError(
                f"need 0 <= d_mean <= d_max < 1, got ({self.d_mean}, {self.d_max})"
            )
        if not self.i0 * self.delta_max < self.s0:
            raise ValueError(
                "i0 * delta_max must stay below s0; the one-day inflow of new "
                "infections cannot exceed the susceptible pool"
            )

    @property
    def total0(self) -> float:
        """Conserved population total S+I+R+D along any trajectory."""
        return self.s0 + self.i0


@dataclass(frozen=True)
class SirdState:
    """Compartment values on one day.

    Values are not constrained to be nonnegative here: inadmissible control
    gains can legitimately drive ``i`` negative and the simulator records
    that as a policy violation rather than refusing to represent it.
    """

    s: float
    i: float
    r: float
    d: float
    day: int = 0

    def __post_init__(self) -> None:
        if self.day < 0:
            raise ValueError("day index must be nonnegative")

    @property
    def total(self) -> float:
        return self.s + self.i + self.r + self.d


@dataclass(frozen=True)
class UncertaintyDraw:
    """One day's realized (delta, v, d_i) triple.

    Construction enforces the universal bounds ``delta >= 0``,
    ``0 < v <= 1`` and ``0 <= d_i < 1``; scenario-specific bounds are the
    sampling layer's responsibility.
    """

    delta: float
    v: float
    d_i: float

    def __post_init__(self) -> None:
        if self.delta < 0:
            raise ValueError(f"delta must be nonnegative, got {self.delta}")
        if not 0 < self.v <= 1:
            raise ValueError(f"v must lie in (0, 1], got {self.v}")
        if not 0 <= self.d_i < 1:
            raise ValueError(f"d_i must lie in [0, 1), got {self.d_i}")


def advance(s, i, r, d, delta, v, d_i, u):
    """One unchecked recursion step on scalars or aligned arrays.

    Shared by ``step`` and the vectorized ensemble engine so both evaluate
    the identical floating-point expressions.
    """
    new_infections = delta * i
    removed = v * u
    died = d_i * i
    return (
        s - new_infections,
        i + new_infections - removed - died,
        r + removed,
        d + died,
    )


def step(state: SirdState, draw: UncertaintyDraw, u: float) -> SirdState:
    """Advance the state by one day under control effort ``u``.

    Rejects negative ``u``; out-of-bound draws are rejected when the
    ``UncertaintyDraw`` is constructed.  No clamping is applied, so an
    oversized ``u`` can produce a negative infected count.
    """
    if u < 0:
        raise ValueError(f"control effort must be nonnegative, got {u}")
    s, i, r, d = advance(state.s, state.i, state.r, state.d, draw.delta, draw.v, draw.d_i, u)
    return SirdState(s=s, i=i, r=r, d=d, day=state.day + 1)


def transition_product(draws: Iterable[UncertaintyDraw]) -> float:
    """Product of per-day infected-growth factors (1 + delta - d_i).

    This is the state transition function propagating infected counts
    across the supplied days; an empty collection gives the empty
    product 1.
    """
    out = 1.0
    for draw in draws:
        out *= 1.0 + draw.delta - draw.d_i
    return out


def transition_product_bounds(params: ModelParams, k: int, k0: int = 0) -> tuple[float, float]:
    """Almost-sure envelope of the transition product between days k0 and k.

    Returns ``((1 - d_max)**(k - k0), (1 + delta_max)**(k - k0))``.
    """
    if not 0 <= k0 <= k:
        raise ValueError(f"need k >= k0 >= 0, got k={k}, k0={k0}")
    n = k - k0
    return (1.0 - params.d_max) ** n, (1.0 + params.delta_max) ** n


def transition_product_expectation(params: ModelParams, k: int, k0: int = 0) -> float:
    """Expected transition product ``(1 + delta_mean - d_mean)**(k - k0)``."""
    if not 0 <= k0 <= k:
        raise ValueError(f"need k >= k0 >= 0, got k={k}, k0={k0}")
    return (1.0 + params.delta_mean - params.d_mean) ** (k - k0)


def reproduction_ratio(state: SirdState, draw: UncertaintyDraw, gain: float) -> float:
    """Per-day basic reproduction ratio under the linear policy u = gain * I.

    Infection pressure ``delta * (S + I) / S`` divided by the removal rate
    ``v * gain + d_i``.  A value above 1 signals that the infected count is
    expected to grow on that day, below 1 that it declines.
    """
    if gain < 0:
        raise ValueError(f"gain must be nonnegative, got {gain}")
    if state.s <= 0:
        raise ZeroDivisionError("reproduction ratio undefined for s <= 0")
    removal = draw.v * gain + draw.d_i
    if removal <= 0:
        raise ZeroDivisionError("reproduction ratio undefined for zero removal rate")
    infection_pressure = draw.delta * (state.s + state.i) / state.s
    return infection_pressure / removal


def conservation_error(state: SirdState, params: ModelParams) -> float:
    """Relative drift of S+I+R+D from the conserved initial total."""
    return abs(state.total - params.total0) / params.total0


__all__ = [
    "ModelParams",
    "SirdState",
    "UncertaintyDraw",
    "advance",
    "step",
    "transition_product",
    "transition_product_bounds",
    "transition_product_expectation",
    "reproduction_ratio",
    "conservation_error",
]
