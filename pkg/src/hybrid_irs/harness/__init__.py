"""Experiment runners and the ``sim`` command-line front-end."""
from .experiments import (
    ALGORITHMS,
    KINDS,
    ExperimentSpec,
    load_states,
    read_csv,
    run,
    run_complexity_vs_m,
    run_convergence,
    run_rate_vs_m,
    run_single,
)
