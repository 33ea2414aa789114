"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines as they execute.  Statistical criteria use fixed seeds, so the suite
is fully deterministic.
"""

from __future__ import annotations

import datetime as dt
import json
import time
from pathlib import Path

import numpy as np
import pytest

from sird_control import (
    ModelParams,
    deceased_bound_pathwise,
    estimate_all,
    expected_deceased_limit,
    expected_deceased_linear,
    expected_infected_linear,
    expected_susceptible_linear,
)
from sird_control.cli import main
from sird_control.estimate import CaseSeries
from sird_control.simulate import run_ensemble

from conftest import (
    assert_paths_close,
    make_average_scenario,
    make_worst_case_scenario,
    random_draws,
    random_params,
)
from sird_control.model import advance
from test_closed_form import recursion_paths
from sird_control.closed_form import (
    deceased_path_oracle,
    infected_path_oracle,
    recovered_path_oracle,
    susceptible_path_oracle,
)

DATA = Path(__file__).resolve().parent.parent / "data"
US_SERIES = DATA / "us_covid_2020.csv"

CHECK_DAYS = (1, 10, 50, 100)


def report(name: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f" :: {detail}"
    print(line)
    assert ok, line


def run_estimate(capsys, pipeline: str) -> tuple[dict, float]:
    start = time.perf_counter()
    code = main([
        "estimate", "--data", str(US_SERIES), "--v-mean", "0.15",
        "--pipeline", pipeline,
    ])
    elapsed = time.perf_counter() - start
    assert code == 0
    return json.loads(capsys.readouterr().out), elapsed


@pytest.fixture(scope="module")
def theorem_suite_summary():
    # Bounds satisfy delta_max < v_min (1 - d_max) / v_max and the gain 1.0
    # sits strictly inside (delta_max/v_min, (1-d_max)/v_max) = (0.4, 1.5).
    return run_ensemble(make_worst_case_scenario(paths=1000, horizon=200, gain=1.0))


@pytest.fixture(scope="module")
def calibration_summary():
    return run_ensemble(make_average_scenario(paths=10_000, horizon=100))


def test_estimates_reproduce_published_rates(capsys):
    bounds, t_bounds = run_estimate(capsys, "almost-sure")
    means, t_means = run_estimate(capsys, "mean")
    ok = (
        abs(bounds["d_i_hat"] - 0.0449) <= 0.01
        and abs(bounds["delta_hat"] - 0.5135) <= 0.01
        and abs(means["d_i_hat"] - 0.002) <= 0.01
        and abs(means["delta_hat"] - 0.215) <= 0.01
        and t_bounds < 1.0
        and t_means < 1.0
    )
    report(
        "estimate reproduces published rates (±0.01, <1s)",
        ok,
        f"bounds=({bounds['d_i_hat']:.4f}, {bounds['delta_hat']:.4f}) "
        f"means=({means['d_i_hat']:.4f}, {means['delta_hat']:.4f}) "
        f"runtime=({t_bounds:.2f}s, {t_means:.2f}s)",
    )


def test_gain_selection_reproduces_published_values(capsys):
    code = main([
        "select-gain", "--mode", "almost-sure", "--cap", "2",
        "--delta-max", "0.5135", "--d-max", "0.0449",
        "--v-min", "0.1", "--v-max", "0.2",
    ])
    assert code == 0
    worst = json.loads(capsys.readouterr().out)

    code = main([
        "select-gain", "--mode", "average", "--cap", "2",
        "--delta-max", "0.5135", "--d-max", "0.0449",
        "--v-min", "0.1", "--v-max", "0.2",
        "--delta-mean", "0.215", "--d-mean", "0.002", "--v-mean", "0.15",
    ])
    assert code == 0
    average = json.loads(capsys.readouterr().out)

    code = main([
        "select-gain", "--mode", "almost-sure", "--cap", "1",
        "--delta-max", "0.1", "--d-max", "0.01", "--v-min", "0.01",
        "--v-max", "0.01", "--s0", "1000", "--i0", "10",
    ])
    assert code == 0
    empty = json.loads(capsys.readouterr().out)

    ok = (
        abs(worst["threshold"] - 0.4775) <= 0.001
        and worst["selected_gain"] == 2.0
        and abs(average["threshold"] - 0.998) <= 0.001
        and 1.41 <= average["selected_gain"] <= 1.44
        and empty["interval"] == [10.0, 99.0]
        and empty["capped"] is None
        and empty["verdict"] == "uncontrollable"
    )
    report(
        "select-gain reproduces published thresholds and gains",
        ok,
        f"worst(thr={worst['threshold']:.4f}, K*={worst['selected_gain']}) "
        f"avg(thr={average['threshold']:.4f}, K*={average['selected_gain']:.4f}) "
        f"empty(interval={empty['interval']}, verdict={empty['verdict']})",
    )


def test_oracle_equivalence_100_instances():
    start = time.perf_counter()
    horizon = 50
    for instance in range(100):
        rng = np.random.default_rng(5000 + instance)
        params = random_params(rng)
        draws = random_draws(rng, params, horizon)
        if instance % 2 == 0:
            controls = list(rng.uniform(0.0, params.i0, horizon))
        else:
            gain = rng.uniform(0.0, (1 - params.d_max) / params.v_max)
            controls = []
            s, i, r, d = params.s0, params.i0, 0.0, 0.0
            for draw in draws:
                controls.append(gain * i)
                s, i, r, d = advance(s, i, r, d, draw.delta, draw.v, draw.d_i,
                                     controls[-1])
        reference = recursion_paths(params, draws, controls)
        assert_paths_close(infected_path_oracle(params, draws, controls), reference["i"])
        assert_paths_close(susceptible_path_oracle(params, draws, controls), reference["s"])
        assert_paths_close(recovered_path_oracle(params, draws, controls), reference["r"])
        assert_paths_close(deceased_path_oracle(params, draws, controls), reference["d"])
    elapsed = time.perf_counter() - start
    report(
        "oracle equivalence on 100 randomized instances (1e-9, <10s)",
        elapsed < 10.0,
        f"runtime={elapsed:.2f}s",
    )


def test_conservation_default_suite(theorem_suite_summary, calibration_summary):
    worst = theorem_suite_summary.max_conservation_error / theorem_suite_summary.total0
    calib = calibration_summary.max_conservation_error / calibration_summary.total0
    ok = worst <= 1e-9 and calib <= 1e-9
    report(
        "conservation: S+I+R+D = S0+I0 on every path to 1e-9 relative",
        ok,
        f"max relative drift {max(worst, calib):.3e}",
    )


def test_worst_case_gain_keeps_and_kills_infections(theorem_suite_summary):
    summary = theorem_suite_summary
    i0 = 100.0
    peak = summary.stats["i"].maximum.max()
    final_ratio = summary.stats["i"].maximum[-1] / i0
    ok = (
        summary.violations.count_for("i") == 0
        and peak <= i0
        and final_ratio < 1e-3
    )
    report(
        "worst-case feasible gain: I(k) <= I0 pathwise and I(200)/I0 < 1e-3",
        ok,
        f"pathwise peak {peak:.4f}, final ratio {final_ratio:.3e}",
    )


def test_deceased_envelope_dominates(theorem_suite_summary):
    scenario = make_worst_case_scenario(paths=1000, horizon=200, gain=1.0)
    bound = deceased_bound_pathwise(scenario.params, 1.0, scenario.horizon)
    exceed = theorem_suite_summary.stats["d"].maximum - bound
    violations = int((exceed > 1e-9 * np.maximum(1.0, bound)).sum())
    report(
        "deceased envelope dominates every path",
        violations == 0,
        f"violating days {violations}, max slack "
        f"{float((bound - theorem_suite_summary.stats['d'].maximum).min()):.3e}",
    )


def test_expectation_calibration(calibration_summary):
    scenario = make_average_scenario(paths=10_000, horizon=100)
    params, gain = scenario.params, scenario.policy.gain
    days = np.array(CHECK_DAYS)
    curves = {
        "i": expected_infected_linear(params, gain, 100).values,
        "s": expected_susceptible_linear(params, gain, 100).values,
        "d": expected_deceased_linear(params, gain, 100).values,
    }
    worst_z = 0.0
    ok = True
    for key, curve in curves.items():
        stats = calibration_summary.stats[key]
        gap = np.abs(stats.mean[days] - curve[days])
        z = gap / np.maximum(stats.stderr[days], 1e-300)
        worst_z = max(worst_z, float(z.max()))
        ok = ok and bool((gap <= 4 * stats.stderr[days]).all())
    report(
        "expectation curves calibrated at days 1/10/50/100 (4 SE)",
        ok,
        f"worst |z| = {worst_z:.2f}",
    )


def test_boundary_gain_pins_expected_infections():
    params_gain = (0.2 - 0.002) / 0.15
    scenario = make_average_scenario(paths=10_000, horizon=100, gain=params_gain)
    summary = run_ensemble(scenario)
    days = np.array(CHECK_DAYS)
    stats = summary.stats["i"]
    gap = np.abs(stats.mean[days] - scenario.params.i0)
    ok = bool((gap <= 4 * stats.stderr[days]).all())
    worst_z = float((gap / stats.stderr[days]).max())
    report(
        "balancing gain holds E[I(k)] at I0 (4 SE at checked days)",
        ok,
        f"worst |z| = {worst_z:.2f}",
    )


def test_deceased_limit_reached_by_day_500():
    base = dict(s0=1e7, i0=100.0, delta_max=0.3, d_max=0.004,
                v_min=0.1, v_max=0.2, delta_mean=0.2, d_mean=0.002, v_mean=0.15)
    ok = True
    details = []
    for disc in (0.01, 0.05, 0.2):
        params = ModelParams(**base)
        gain = (params.delta_mean - params.d_mean + disc) / params.v_mean
        curve = expected_deceased_linear(params, gain, 500)
        limit = expected_deceased_limit(params, gain)
        rel = abs(curve.values[-1] - limit) / limit
        details.append(f"disc={disc}: rel gap {rel:.4f}")
        ok = ok and rel < 0.01
    report("expected deaths reach the long-run limit by day 500 (1%)",
           ok, "; ".join(details))


def test_estimator_round_trip():
    # Point distributions: exact recovery to 1e-9.
    delta, d_i, v = 0.3, 0.02, 0.15
    confirmed, deaths = [1000.0], [0.0]
    for _ in range(60):
        deaths.append(deaths[-1] + d_i * confirmed[-1])
        confirmed.append((1 + delta - d_i - v) * confirmed[-1])
    first = dt.date(2020, 3, 1)
    series = CaseSeries(
        dates=tuple(first + dt.timedelta(days=k) for k in range(len(confirmed))),
        confirmed=np.asarray(confirmed),
        deaths=np.asarray(deaths),
    )
    exact = estimate_all(series, v_mean=v)
    exact_ok = (abs(exact.d_i_hat - d_i) <= 1e-9
                and abs(exact.delta_hat - delta) <= 1e-9)

    # Stochastic series over 10^4 days: recovery within 3 standard errors.
    rng = np.random.default_rng(777)
    n = 10_000
    delta_seq = rng.uniform(0.132, 0.172, n)  # mean 0.152 = d_mean + v_mean
    d_seq = rng.uniform(0.0, 0.004, n)
    v_seq = rng.uniform(0.1, 0.2, n)
    c = np.empty(n + 1)
    d = np.empty(n + 1)
    c[0], d[0] = 1e8, 0.0
    for k in range(n):
        d[k + 1] = d[k] + d_seq[k] * c[k]
        c[k + 1] = (1 + delta_seq[k] - d_seq[k] - v_seq[k]) * c[k]
    series = CaseSeries(
        dates=tuple(first + dt.timedelta(days=k) for k in range(n + 1)),
        confirmed=c,
        deaths=d,
    )
    result = estimate_all(series, v_mean=0.15)
    death_terms = np.diff(d) / c[:-1]
    se_death = death_terms.std(ddof=1) / np.sqrt(n)
    delta_terms = c[1:] / c[:-1] - 1 + result.d_i_hat + 0.15
    se_delta = delta_terms.std(ddof=1) / np.sqrt(n)
    stochastic_ok = (abs(result.d_i_hat - 0.002) <= 3 * se_death
                     and abs(result.delta_hat - 0.152) <= 3 * se_delta)

    report(
        "estimator round-trip: exact for point rates, 3 SE for stochastic",
        exact_ok and stochastic_ok,
        f"point=({exact.d_i_hat:.12f}, {exact.delta_hat:.12f}) "
        f"stochastic=({result.d_i_hat:.6f}, {result.delta_hat:.6f})",
    )
