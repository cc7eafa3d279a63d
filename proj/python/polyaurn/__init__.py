"""Measure-valued Polya urn processes over finite state spaces.

Exact rational arithmetic throughout: probabilities come back as
fractions.Fraction, and Fraction or int arguments are accepted wherever a
scalar is expected. Floats are rejected on exact entry points so nothing
silently rounds.
"""

from polyaurn._core import (
    Error,
    GeneralModel,
    Kernel,
    Measure,
    OutOfRangeError,
    ParseError,
    Partition,
    PredictiveFamily,
    ValidationError,
    bell_number,
    block_predictive_mass,
    characterize,
    check_detailed_balance,
    check_exchangeable,
    check_hill_sufficientness,
    check_iid_degenerate,
    check_johnson_sufficientness,
    check_kernel_identity,
    coefficient_defect,
    coefficient_solution,
    condition,
    conditional_kernel,
    enumerate_partitions,
    fit_model,
    fit_theta,
    kernel_apply,
    log_likelihood,
    mix,
    mvps_coefficient,
    normalize,
    rebalance,
    recover_partition,
    total_variation,
)

__all__ = [
    "Error",
    "GeneralModel",
    "Kernel",
    "Measure",
    "OutOfRangeError",
    "ParseError",
    "Partition",
    "PredictiveFamily",
    "ValidationError",
    "bell_number",
    "block_predictive_mass",
    "characterize",
    "check_detailed_balance",
    "check_exchangeable",
    "check_hill_sufficientness",
    "check_iid_degenerate",
    "check_johnson_sufficientness",
    "check_kernel_identity",
    "coefficient_defect",
    "coefficient_solution",
    "condition",
    "conditional_kernel",
    "enumerate_partitions",
    "fit_model",
    "fit_theta",
    "kernel_apply",
    "log_likelihood",
    "mix",
    "mvps_coefficient",
    "normalize",
    "rebalance",
    "recover_partition",
    "total_variation",
]

__version__ = "0.1.0"
