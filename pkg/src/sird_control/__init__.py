"""Stochastic discrete-time SIRD epidemic control toolkit.

Simulation of an uncertain SIRD recursion, closed-form path and
expectation oracles, linear feedback-gain feasibility and selection,
seeded Monte Carlo ensembles with validation, and mean-replacing rate
estimation from historical case series.
"""

from .closed_form import (
    ExpectationCurve,
    OutOfBranchError,
    WindowExceededError,
    deceased_bound_pathwise,
    deceased_path_oracle,
    expected_deceased_limit,
    expected_deceased_linear,
    expected_infected_general_bound,
    expected_infected_linear,
    expected_recovered_bounds_linear,
    expected_susceptible_linear,
    infected_path_oracle,
    no_control_profile,
    recovered_path_oracle,
    susceptible_nonneg_horizon,
    susceptible_path_oracle,
)
from .estimate import (
    CaseSeries,
    CaseSeriesError,
    EstimateResult,
    EstimationError,
    estimate_all,
    estimate_death_rate,
    estimate_delta,
    load_series,
    write_series,
)
from .model import (
    ModelParams,
    SirdState,
    UncertaintyDraw,
    reproduction_ratio,
    step,
    transition_product,
    transition_product_bounds,
    transition_product_expectation,
)
from .policy import (
    GainFeasibility,
    PolicyConfig,
    admissible_gain_range,
    control,
    feasibility_almost_sure,
    feasibility_average,
)
from .sampling import DistributionSpec, SeedSpec, draw_sequence
from .simulate import (
    EnsembleSummary,
    Scenario,
    Trajectory,
    ValidationReport,
    check_oracle_equivalence,
    run_ensemble,
    run_path,
    validate_ensemble,
)

__version__ = "0.1.0"
