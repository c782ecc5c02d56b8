"""Robust learning from multiple untrusted sources."""

import json as _json

from ._core import (
    Dataset,
    DiscrepancyEstimate,
    InvalidData,
    LinearPredictor,
    NumericalError,
    SourcePool,
    componentwise_median,
    corrupt,
    corrupt_pool,
    empirical_discrepancy,
    exact_discrepancy_oracle,
    excess_risk_bound,
    geometric_median,
    huber_of_logistic,
    linear_rademacher_bound,
    load_csv,
    project_simplex,
    run_case1,
    run_case2,
    save_csv,
    solve_weights,
    train_weighted_erm,
    weight_objective,
)
from ._core import run_experiment as _run_experiment

__version__ = "0.1.0"


def run_experiment(config):
    """Run a sweep. `config` is a dict or a JSON string in the CLI's config format."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _run_experiment(config)
