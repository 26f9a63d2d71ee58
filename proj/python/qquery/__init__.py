"""Quantum query simulation and bound checks."""

from ._core import (
    ContractError,
    ResourceError,
    NumericError,
    OracleFunction,
    SimulationError,
    bit_encode,
    bit_decode,
    roundtrip_error,
    phase_query,
    bit_query,
    simulation_error,
    effective_query,
    amplitude_estimation_queries,
    amplitude_estimation_bound,
    evaluation_distribution,
    mean_distribution,
    perturbation_closed_form,
    query_difference_norm,
    degree_lower_bound,
    bernstein_margin,
    fit_univariate,
    validate,
    run_experiment,
)

__all__ = [name for name in dir() if not name.startswith("_")]
