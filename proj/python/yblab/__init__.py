"""Python access to the yblab core."""

from ._yblab import (
    ConfigError,
    DomainError,
    Error,
    Model,
    edge_weight,
    elliptic_gamma,
    inversion_pointwise,
    lattice_exact,
    lattice_mc,
    log_gamma,
    ncqdl,
    random_star,
    run_str_campaign,
    single_spin_weight,
    str_residual,
    theta1,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "Error",
    "Model",
    "edge_weight",
    "elliptic_gamma",
    "inversion_pointwise",
    "lattice_exact",
    "lattice_mc",
    "log_gamma",
    "ncqdl",
    "random_star",
    "run_str_campaign",
    "single_spin_weight",
    "str_residual",
    "theta1",
]
