"""Monte Carlo engine: seeded paths, ensemble statistics, validation.

Paths are embarrassingly parallel: every path owns substreams derived from
``(master_seed, path_index)``, so results are bit-identical however the
work is split.  ``SIRD_THREADS`` (or the ``workers`` argument) caps the
number of chunk workers without affecting results; chunks are merged in a
fixed order.

Negative compartments are recorded as policy violations and the path keeps
running: demonstrating why an inadmissible gain fails is part of the job,
so nothing is clipped or aborted.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import closed_form
from .model import ModelParams, SirdState, advance
from .policy import PolicyConfig, admissible_gain_range
from .sampling import (
    STREAM_PRICE,
    DistributionSpec,
    SeedSpec,
    draw_arrays,
    draw_sequence,
    substream,
)

_CHUNK_PATHS = 4096
_MAX_LOGGED_VIOLATIONS = 100
_REL_TOL = 1e-9
_MEAN_SIGMAS = 4.0
_MIN_PATHS_FOR_MEAN_CHECKS = 30

_COMPARTMENTS = ("s", "i", "r", "d", "b")


@dataclass(frozen=True)
class Scenario:
    """Everything needed to reproduce an ensemble run."""

    params: ModelParams
    delta_spec: DistributionSpec
    v_spec: DistributionSpec
    d_i_spec: DistributionSpec
    policy: PolicyConfig
    horizon: int = 365
    paths: int = 1
    master_seed: int = 0
    price_spec: DistributionSpec | None = None
    initial_budget: float = 0.0
    allow_long_horizon: bool = False

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError(f"horizon must be at least 1, got {self.horizon}")
        if self.paths < 1:
            raise ValueError(f"paths must be at least 1, got {self.paths}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.initial_budget < 0:
            raise ValueError("initial_budget must be nonnegative")
        p = self.params
        self.delta_spec.validate_bounds(0.0, p.delta_max, p.delta_mean, "delta")
        self.v_spec.validate_bounds(p.v_min, p.v_max, p.v_mean, "v")
        self.d_i_spec.validate_bounds(0.0, p.d_max, p.d_mean, "d_i")
        if self.price_spec is not None and self.price_spec.support()[0] < 0:
            raise ValueError("price distribution must be nonnegative")
        window = closed_form.susceptible_nonneg_horizon(p)
        if not self.allow_long_horizon and self.horizon > window:
            raise ValueError(
                f"horizon {self.horizon} exceeds the susceptible validity window "
                f"{window}; set allow_long_horizon to override"
            )

    @property
    def specs(self) -> tuple[DistributionSpec, DistributionSpec, DistributionSpec]:
        return self.delta_spec, self.v_spec, self.d_i_spec

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "params": {
                "s0": self.params.s0,
                "i0": self.params.i0,
                "delta_max": self.params.delta_max,
                "d_max": self.params.d_max,
                "v_min": self.params.v_min,
                "v_max": self.params.v_max,
                "delta_mean": self.params.delta_mean,
                "d_mean": self.params.d_mean,
                "v_mean": self.params.v_mean,
            },
            "delta": self.delta_spec.to_dict(),
            "v": self.v_spec.to_dict(),
            "d_i": self.d_i_spec.to_dict(),
            "policy": {"gain": self.policy.gain, "resource_cap": self.policy.resource_cap},
            "horizon": self.horizon,
            "paths": self.paths,
            "master_seed": self.master_seed,
            "initial_budget": self.initial_budget,
            "allow_long_horizon": self.allow_long_horizon,
        }
        if self.price_spec is not None:
            out["price"] = self.price_spec.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Scenario":
        params = ModelParams(**{k: float(v) for k, v in data["params"].items()})
        price = data.get("price")
        return cls(
            params=params,
            delta_spec=DistributionSpec.from_dict(data["delta"]),
            v_spec=DistributionSpec.from_dict(data["v"]),
            d_i_spec=DistributionSpec.from_dict(data["d_i"]),
            policy=PolicyConfig(
                gain=float(data["policy"]["gain"]),
                resource_cap=float(data["policy"].get("resource_cap", 1.0)),
            ),
            horizon=int(data.get("horizon", 365)),
            paths=int(data.get("paths", 1)),
            master_seed=int(data.get("master_seed", 0)),
            price_spec=None if price is None else DistributionSpec.from_dict(price),
            initial_budget=float(data.get("initial_budget", 0.0)),
            allow_long_horizon=bool(data.get("allow_long_horizon", False)),
        )


@dataclass(frozen=True)
class Violation:
    """One negative-compartment event."""

    path: int
    day: int
    compartment: str
    value: float

    def to_dict(self) -> dict[str, Any]:
        return {"path": self.path, "day": self.day,
                "compartment": self.compartment, "value": self.value}


@dataclass(frozen=True)
class ViolationLog:
    """Counts of negative-compartment events plus the first few examples."""

    count: int = 0
    by_compartment: tuple[tuple[str, int], ...] = ()
    events: tuple[Violation, ...] = ()

    def count_for(self, compartment: str) -> int:
        return dict(self.by_compartment).get(compartment, 0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "count": self.count,
            "by_compartment": dict(self.by_compartment),
            "events": [e.to_dict() for e in self.events],
        }


@dataclass(frozen=True)
class Trajectory:
    """One path: daily states, the budget series, and any violations."""

    states: tuple[SirdState, ...]
    budget: np.ndarray
    violations: ViolationLog

    def compartment(self, name: str) -> np.ndarray:
        if name == "b":
            return self.budget
        return np.array([getattr(s, name) for s in self.states], dtype=np.float64)


@dataclass(frozen=True)
class CompartmentStats:
    """Per-day ensemble statistics for one compartment."""

    mean: np.ndarray
    stderr: np.ndarray
    minimum: np.ndarray
    p05: np.ndarray
    p95: np.ndarray
    maximum: np.ndarray


@dataclass(frozen=True)
class EnsembleSummary:
    """Aggregated ensemble: per-day stats per compartment plus integrity scalars."""

    horizon: int
    paths: int
    total0: float
    stats: dict[str, CompartmentStats]
    violations: ViolationLog
    max_conservation_error: float
    min_r_increment: float
    min_d_increment: float


def _block_matrices(scenario: Scenario, path_indices: Sequence[int]):
    """Simulate a block of paths; returns (S, I, R, D, B) of shape (n, horizon+1)."""
    n = len(path_indices)
    h = scenario.horizon
    delta = np.empty((n, h))
    v = np.empty((n, h))
    d_i = np.empty((n, h))
    price = np.zeros((n, h))
    for row, idx in enumerate(path_indices):
        seed = SeedSpec(scenario.master_seed, idx)
        delta[row], v[row], d_i[row] = draw_arrays(scenario.specs, seed, h)
        if scenario.price_spec is not None:
            price[row] = scenario.price_spec.sample(substream(seed, STREAM_PRICE), h)

    S = np.empty((n, h + 1))
    I = np.empty((n, h + 1))
    R = np.empty((n, h + 1))
    D = np.empty((n, h + 1))
    B = np.empty((n, h + 1))
    S[:, 0] = scenario.params.s0
    I[:, 0] = scenario.params.i0
    R[:, 0] = 0.0
    D[:, 0] = 0.0
    B[:, 0] = scenario.initial_budget
    gain = scenario.policy.gain
    for k in range(h):
        u = gain * I[:, k]
        S[:, k + 1], I[:, k + 1], R[:, k + 1], D[:, k + 1] = advance(
            S[:, k], I[:, k], R[:, k], D[:, k], delta[:, k], v[:, k], d_i[:, k], u
        )
        B[:, k + 1] = B[:, k] + price[:, k] * u
    return S, I, R, D, B


def _scan_violations(matrices, path_indices: Sequence[int], total0: float) -> ViolationLog:
    # Strictly negative beyond float round-off counts; tiny negative noise does not.
    tol = -_REL_TOL * total0
    count = 0
    by_compartment: list[tuple[str, int]] = []
    events: list[Violation] = []
    for name, arr in zip(("s", "i", "r", "d"), matrices):
        rows, cols = np.nonzero(arr < tol)
        count += len(rows)
        if len(rows):
            by_compartment.append((name, len(rows)))
        for r, c in zip(rows, cols):
            if len(events) >= _MAX_LOGGED_VIOLATIONS:
                break
            events.append(Violation(path=int(path_indices[r]), day=int(c),
                                    compartment=name, value=float(arr[r, c])))
    return ViolationLog(count=count, by_compartment=tuple(by_compartment), events=tuple(events))


def run_path(scenario: Scenario, path_index: int) -> Trajectory:
    """Simulate one path, deterministically for (master_seed, path_index)."""
    if not 0 <= path_index < scenario.paths:
        raise ValueError(f"path_index {path_index} outside [0, {scenario.paths})")
    S, I, R, D, B = _block_matrices(scenario, [path_index])
    states = tuple(
        SirdState(s=float(S[0, k]), i=float(I[0, k]), r=float(R[0, k]),
                  d=float(D[0, k]), day=k)
        for k in range(scenario.horizon + 1)
    )
    log = _scan_violations((S, I, R, D), [path_index], scenario.params.total0)
    return Trajectory(states=states, budget=B[0].copy(), violations=log)


def _nearest_rank_index(q: float, n: int) -> int:
    return max(math.ceil(q * n) - 1, 0)


def _compartment_stats(arr: np.ndarray) -> CompartmentStats:
    n = arr.shape[0]
    mean = arr.mean(axis=0)
    if n > 1:
        stderr = arr.std(axis=0, ddof=1) / math.sqrt(n)
    else:
        stderr = np.zeros(arr.shape[1])
    ordered = np.sort(arr, axis=0)
    return CompartmentStats(
        mean=mean,
        stderr=stderr,
        minimum=ordered[0],
        p05=ordered[_nearest_rank_index(0.05, n)],
        p95=ordered[_nearest_rank_index(0.95, n)],
        maximum=ordered[-1],
    )


def run_ensemble(scenario: Scenario, workers: int | None = None) -> EnsembleSummary:
    """Simulate all paths and aggregate per-day statistics.

    The result is independent of the worker count and of chunk evaluation
    order; workers only speed up the draw/recursion work.
    """
    if workers is None:
        workers = int(os.environ.get("SIRD_THREADS", "1") or 1)
    all_indices = list(range(scenario.paths))
    chunks = [all_indices[i:i + _CHUNK_PATHS] for i in range(0, len(all_indices), _CHUNK_PATHS)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(lambda c: _block_matrices(scenario, c), chunks))
    else:
        blocks = [_block_matrices(scenario, c) for c in chunks]
    S, I, R, D, B = (np.concatenate([b[j] for b in blocks], axis=0) for j in range(5))

    log = _scan_violations((S, I, R, D), all_indices, scenario.params.total0)
    conservation = np.abs((S + I + R + D) - scenario.params.total0).max()
    stats = {
        "s": _compartment_stats(S),
        "i": _compartment_stats(I),
        "r": _compartment_stats(R),
        "d": _compartment_stats(D),
        "b": _compartment_stats(B),
    }
    return EnsembleSummary(
        horizon=scenario.horizon,
        paths=scenario.paths,
        total0=scenario.params.total0,
        stats=stats,
        violations=log,
        max_conservation_error=float(conservation),
        min_r_increment=float(np.diff(R, axis=1).min()),
        min_d_increment=float(np.diff(D, axis=1).min()),
    )


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one validation check; ``passed`` is None when not applicable."""

    name: str
    passed: bool | None
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        status = "skipped" if self.passed is None else ("pass" if self.passed else "fail")
        return {"name": self.name, "status": status, "detail": self.detail}


@dataclass(frozen=True)
class ValidationReport:
    """Pass/fail listing for the bound, expectation and integrity checks."""

    checks: tuple[CheckResult, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return all(c.passed is not False for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if c.passed is False]

    def to_dict(self) -> dict[str, Any]:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def _mean_check(name: str, stats: CompartmentStats, target: np.ndarray,
                days: np.ndarray) -> CheckResult:
    # Ensemble mean must sit within 4 standard errors of the closed form;
    # the absolute slack covers zero-variance (point-distribution) runs.
    slack = _MEAN_SIGMAS * stats.stderr[days] + _REL_TOL * np.maximum(1.0, np.abs(target[days]))
    gap = np.abs(stats.mean[days] - target[days])
    worst = int(days[np.argmax(gap - slack)])
    ok = bool((gap <= slack).all())
    return CheckResult(
        name=name,
        passed=ok,
        detail=f"worst day {worst}: |mean-closed| = {gap.max():.6g}",
    )


def validate_ensemble(summary: EnsembleSummary, params: ModelParams,
                      gain: float) -> ValidationReport:
    """Check an ensemble against the closed forms and almost-sure envelopes.

    Checks that do not apply to the supplied gain (envelopes that need the
    gain inside a specific range, expectation branches with no formula) are
    reported as skipped, not failed.
    """
    checks: list[CheckResult] = []
    total0 = summary.total0
    days_all = np.arange(summary.horizon + 1)
    k = days_all.astype(np.float64)
    lo_adm, hi_adm = admissible_gain_range(params)

    checks.append(CheckResult(
        name="conservation",
        passed=bool(summary.max_conservation_error <= _REL_TOL * total0),
        detail=f"max |S+I+R+D - total| = {summary.max_conservation_error:.3e}",
    ))
    checks.append(CheckResult(
        name="nonnegative_compartments",
        passed=summary.violations.count == 0,
        detail=f"{summary.violations.count} negative-compartment events",
    ))
    checks.append(CheckResult(
        name="recovered_monotone",
        passed=bool(summary.min_r_increment >= -_REL_TOL * total0),
        detail=f"min increment {summary.min_r_increment:.3e}",
    ))
    checks.append(CheckResult(
        name="deceased_monotone",
        passed=bool(summary.min_d_increment >= -_REL_TOL * total0),
        detail=f"min increment {summary.min_d_increment:.3e}",
    ))

    # Pathwise infected envelope (worst-case compounding at the bound rates).
    if 0 <= gain <= hi_adm:
        envelope = (1.0 + params.delta_max - gain * params.v_min) ** k * params.i0
        slack = _REL_TOL * np.maximum(1.0, envelope)
        exceed = summary.stats["i"].maximum - envelope
        checks.append(CheckResult(
            name="infected_pathwise_bound",
            passed=bool((exceed <= slack).all()),
            detail=f"max exceedance {exceed.max():.3e}",
        ))
    else:
        checks.append(CheckResult("infected_pathwise_bound", None,
                                  "gain outside admissible range"))

    # Pathwise deceased envelope; needs gain*v_min to dominate delta_max.
    if params.delta_max / params.v_min <= gain <= hi_adm:
        bound = closed_form.deceased_bound_pathwise(params, gain, summary.horizon)
        slack = _REL_TOL * np.maximum(1.0, bound)
        exceed = summary.stats["d"].maximum - bound
        checks.append(CheckResult(
            name="deceased_pathwise_bound",
            passed=bool((exceed <= slack).all()),
            detail=f"max exceedance {exceed.max():.3e}",
        ))
    else:
        checks.append(CheckResult("deceased_pathwise_bound", None,
                                  "gain below delta_max/v_min or above admissible range"))

    if not 0 <= gain <= hi_adm:
        checks.append(CheckResult("mean_infected_matches_closed_form", None,
                                  "gain outside admissible range"))
    elif summary.paths < _MIN_PATHS_FOR_MEAN_CHECKS:
        # A standard-error window is meaningless for a handful of paths.
        checks.append(CheckResult(
            "mean_infected_matches_closed_form", None,
            f"fewer than {_MIN_PATHS_FOR_MEAN_CHECKS} paths",
        ))
    else:
        expected_i = closed_form.expected_infected_linear(params, gain, summary.horizon)
        checks.append(_mean_check("mean_infected_matches_closed_form",
                                  summary.stats["i"], expected_i.values, days_all))

        window = closed_form.susceptible_nonneg_horizon(params)
        s_days = days_all[days_all <= window]
        try:
            expected_s = closed_form.expected_susceptible_linear(
                params, gain, int(s_days[-1]))
            checks.append(_mean_check("mean_susceptible_matches_closed_form",
                                      summary.stats["s"], expected_s.values, s_days))
        except closed_form.OutOfBranchError:
            checks.append(CheckResult("mean_susceptible_matches_closed_form", None,
                                      "negative discriminant: no closed form"))
        try:
            expected_d = closed_form.expected_deceased_linear(params, gain, summary.horizon)
            checks.append(_mean_check("mean_deceased_matches_closed_form",
                                      summary.stats["d"], expected_d.values, days_all))
        except closed_form.OutOfBranchError:
            checks.append(CheckResult("mean_deceased_matches_closed_form", None,
                                      "negative discriminant: no closed form"))

        lower, upper = closed_form.expected_recovered_bounds_linear(
            params, gain, summary.horizon)
        r_stats = summary.stats["r"]
        slack = _MEAN_SIGMAS * r_stats.stderr + _REL_TOL * np.maximum(1.0, upper.values)
        ok = bool(((r_stats.mean >= lower.values - slack)
                   & (r_stats.mean <= upper.values + slack)).all())
        checks.append(CheckResult(
            name="mean_recovered_within_bracket",
            passed=ok,
            detail="mean R inside [v_min, v_max] effort bracket" if ok
            else "mean R escaped the effort bracket",
        ))

    return ValidationReport(checks=tuple(checks))


def check_oracle_equivalence(
    scenario: Scenario,
    sample_paths: int = 3,
    horizon_cap: int = 50,
) -> CheckResult:
    """Cross-check the step recursion against all four closed-form path oracles.

    Runs a few sample paths under the scenario's policy, feeds the realized
    draw and effort sequences to the analytic path formulas, and requires
    agreement to 1e-9 (relative, with an absolute floor at the population
    scale).  Skipped when the policy drives the infected count negative:
    the path formulas reject negative efforts by contract.
    """
    params = scenario.params
    h = min(scenario.horizon, horizon_cap)
    scale = _REL_TOL * params.total0
    worst = 0.0
    for idx in range(min(sample_paths, scenario.paths)):
        draws = draw_sequence(scenario.specs, SeedSpec(scenario.master_seed, idx), h)
        s, i, r, d = params.s0, params.i0, 0.0, 0.0
        rec = {"s": [s], "i": [i], "r": [r], "d": [d]}
        controls = []
        for draw in draws:
            u = scenario.policy.gain * i
            if u < 0:
                return CheckResult(
                    name="oracle_equivalence",
                    passed=None,
                    detail="policy produced negative efforts (inadmissible gain); "
                           "path oracles not applicable",
                )
            controls.append(u)
            s, i, r, d = advance(s, i, r, d, draw.delta, draw.v, draw.d_i, u)
            for name, value in zip("sird", (s, i, r, d)):
                rec[name].append(value)
        oracle = {
            "s": closed_form.susceptible_path_oracle(params, draws, controls),
            "i": closed_form.infected_path_oracle(params, draws, controls),
            "r": closed_form.recovered_path_oracle(params, draws, controls),
            "d": closed_form.deceased_path_oracle(params, draws, controls),
        }
        for name in "sird":
            a = np.asarray(rec[name])
            b = oracle[name]
            gap = np.abs(a - b) - _REL_TOL * np.abs(b)
            worst = max(worst, float(gap.max()))
    return CheckResult(
        name="oracle_equivalence",
        passed=bool(worst <= scale),
        detail=f"worst residual beyond relative tolerance: {worst:.3e}",
    )


__all__ = [
    "Scenario",
    "Violation",
    "ViolationLog",
    "Trajectory",
    "CompartmentStats",
    "EnsembleSummary",
    "CheckResult",
    "ValidationReport",
    "run_path",
    "run_ensemble",
    "validate_ensemble",
    "check_oracle_equivalence",
]
