"""Shared fixtures. The heavy tau sweep is computed once per session and
reused by the montecarlo property tests and the acceptance suite."""

import pytest

from spikedwide import ModelConfig, run_experiment

# One experiment seed for every stochastic check in the suite, fixed up front.
SUITE_SEED = 20260808

SWEEP_N = 200
SWEEP_BETA = 0.005
SWEEP_TAUS = (0.6, 0.8, 1.0, 1.2, 1.6, 2.0)
SWEEP_TRIALS = 50


@pytest.fixture(scope="session")
def tau_sweep_reports():
    """{tau: ExperimentReport} for the phase-transition sweep at n=200, beta=0.005."""
    m = round(SWEEP_N / SWEEP_BETA)
    reports = {}
    for tau in SWEEP_TAUS:
        config = ModelConfig(n=SWEEP_N, m=m, r=1, taus=(tau,), seed=SUITE_SEED)
        reports[tau] = run_experiment(config, trials=SWEEP_TRIALS)
    return reports
