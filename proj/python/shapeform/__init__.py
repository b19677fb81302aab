from ._core import (
    ConfigError,
    DimensionError,
    Error,
    Graph,
    PreconditionError,
    TopologyError,
    constant_cost,
    control_varying,
    delta_inverse,
    determinant_gap,
    fisher_determinant,
    incidence,
    is_minimally_rigid,
    monotonicity_check,
    optimal_angles,
    optimal_constant_scale,
    reproduce,
    scale_function,
    simulate,
    subtended_angles,
    triangular_complement,
)

__all__ = [
    "ConfigError",
    "DimensionError",
    "Error",
    "Graph",
    "PreconditionError",
    "TopologyError",
    "constant_cost",
    "control_varying",
    "delta_inverse",
    "determinant_gap",
    "fisher_determinant",
    "incidence",
    "is_minimally_rigid",
    "monotonicity_check",
    "optimal_angles",
    "optimal_constant_scale",
    "reproduce",
    "scale_function",
    "simulate",
    "subtended_angles",
    "triangular_complement",
]
