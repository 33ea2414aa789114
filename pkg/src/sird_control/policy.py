"""Linear feedback policy and feasibility analysis of its gain.

The policy is ``u(k) = gain * I(k)`` with a constant gain capped by the
available resources (``0 <= gain <= resource_cap``).  Two sufficient-gain
analyses are provided:

* ``feasibility_almost_sure`` works off the worst-case bounds and yields
  gains for which every trajectory keeps ``I(k) <= I0`` and drives
  ``I(k)/I0`` to zero with probability one.
* ``feasibility_average`` works off the process means and controls the
  expected trajectory instead.

Both return the open feasible interval, its intersection with the resource
range ``[0, cap]``, an uncontrollable/controllable verdict (empty vs
non-empty intersection), and a selected sub-optimal gain: the cheapest gain
that still pins the infected count at or below its initial value, or the
full cap when even that is out of reach.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .model import ModelParams, SirdState

CONTROLLABLE = "controllable"
UNCONTROLLABLE = "uncontrollable"


@dataclass(frozen=True)
class PolicyConfig:
    """Feedback gain and the resource cap it must respect."""

    gain: float
    resource_cap: float = 1.0

    def __post_init__(self) -> None:
        if self.resource_cap < 1:
            raise ValueError(f"resource_cap must be at least 1, got {self.resource_cap}")
        if not 0 <= self.gain <= self.resource_cap:
            raise ValueError(
                f"gain must lie in [0, resource_cap], got {self.gain} with cap {self.resource_cap}"
            )


def control(config: PolicyConfig, state: SirdState) -> float:
    """Control effort ``gain * I`` for the current state."""
    if state.i < 0:
        raise ValueError(f"infected count must be nonnegative, got {state.i}")
    return config.gain * state.i


@dataclass(frozen=True)
class GainFeasibility:
    """Feasible gain interval, resource-capped set, verdict and selected gain.

    ``interval`` is an open interval stored as its (lo, hi) endpoints; it is
    empty as a set when lo >= hi.  ``capped`` is the intersection with
    [0, cap], or None when that intersection is empty.  ``threshold`` is the
    level the infection-rate statistic (the bound ``delta_max`` in
    almost-sure mode, the mean in average mode) must stay below for the
    cheap selected gain to apply; past it the selector falls back to the
    full cap.
    """

    mode: str
    interval: tuple[float, float]
    capped: tuple[float, float] | None
    verdict: str
    selected_gain: float
    threshold: float
    cap: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "mode": self.mode,
            "interval": [self.interval[0], self.interval[1]],
            "capped": None if self.capped is None else [self.capped[0], self.capped[1]],
            "verdict": self.verdict,
            "selected_gain": self.selected_gain,
            "threshold": self.threshold,
            "cap": self.cap,
        }


def _cap_interval(lo: float, hi: float, cap: float) -> tuple[float, float] | None:
    # Open interval (lo, hi) intersected with closed [0, cap]; emptiness is
    # decided by exact endpoint comparison, no epsilon.
    if not (lo < hi and hi > 0 and lo < cap):
        return None
    return max(lo, 0.0), min(hi, cap)


def _build(mode: str, lo: float, hi: float, cap: float,
           rate: float, threshold: float, cheap_gain: float) -> GainFeasibility:
    if cap < 1:
        raise ValueError(f"cap must be at least 1, got {cap}")
    capped = _cap_interval(lo, hi, cap)
    verdict = CONTROLLABLE if capped is not None else UNCONTROLLABLE
    selected = cheap_gain if rate < threshold else cap
    return GainFeasibility(
        mode=mode,
        interval=(lo, hi),
        capped=capped,
        verdict=verdict,
        selected_gain=selected,
        threshold=threshold,
        cap=cap,
    )


def feasibility_almost_sure(params: ModelParams, cap: float) -> GainFeasibility:
    """Worst-case gain feasibility: interval (delta_max/v_min, (1-d_max)/v_max).

    The selected gain is ``delta_max / v_min`` whenever the resources allow
    it (``delta_max <= cap * v_min``) and the applicability threshold
    ``v_min * (1 - d_max) / v_max`` exceeds ``delta_max``; otherwise the full
    cap is committed.
    """
    lo = params.delta_max / params.v_min
    hi = (1.0 - params.d_max) / params.v_max
    threshold = params.v_min * (1.0 - params.d_max) / params.v_max
    cheap = lo if params.delta_max <= cap * params.v_min else cap
    return _build("almost_sure", lo, hi, cap, params.delta_max, threshold, cheap)


def feasibility_average(params: ModelParams, cap: float) -> GainFeasibility:
    """Mean-value gain feasibility: interval ((delta_mean-d_mean)/v_mean, (1-d_max)/v_max).

    The selected gain is ``delta_mean / v_mean`` when affordable
    (``delta_mean <= cap * v_mean``), which keeps the expected one-day
    growth factor at ``1 - d_mean`` and therefore strictly above the
    interval's lower endpoint whenever ``d_mean > 0``.  Applicability
    requires ``delta_mean < 1 - d_mean``; otherwise the full cap is
    committed.
    """
    lo = (params.delta_mean - params.d_mean) / params.v_mean
    hi = (1.0 - params.d_max) / params.v_max
    threshold = 1.0 - params.d_mean
    cheap = params.delta_mean / params.v_mean if params.delta_mean <= cap * params.v_mean else cap
    return _build("average", lo, hi, cap, params.delta_mean, threshold, cheap)


def admissible_gain_range(params: ModelParams) -> tuple[float, float]:
    """Closed gain range [0, (1-d_max)/v_max] guaranteeing I(k) >= 0 on every path."""
    return 0.0, (1.0 - params.d_max) / params.v_max


__all__ = [
    "PolicyConfig",
    "GainFeasibility",
    "control",
    "feasibility_almost_sure",
    "feasibility_average",
    "admissible_gain_range",
    "CONTROLLABLE",
    "UNCONTROLLABLE",
]
