"""Risk-sensitive bandit simulation toolkit.

Python bindings over the C++ core: distortion riskmetrics evaluated as exact
Choquet integrals on finite supports, simplex mixture oracles, the RS-ETC-M /
RS-UCB-M / CE-UCB-M policies, and the Monte-Carlo regret harness.
"""

from ._core import (
    beta_estimate,
    choquet,
    confidence_radius,
    enumerate_grid,
    eval_h,
    min_gap,
    mixture_value,
    n_epsilon,
    oracle,
    oracle_discrete,
    render_csv,
    riskmetric_info,
    run_experiment,
    run_policy,
    wasserstein1,
)

__all__ = [
    "beta_estimate",
    "choquet",
    "confidence_radius",
    "enumerate_grid",
    "eval_h",
    "min_gap",
    "mixture_value",
    "n_epsilon",
    "oracle",
    "oracle_discrete",
    "render_csv",
    "riskmetric_info",
    "run_experiment",
    "run_policy",
    "wasserstein1",
]
