"""Preference-aware inverse optimization over polyhedral feasible sets.

Thin wrapper over the compiled core: cluster observed decisions, recover a
linear utility per cluster and return representatives that are provably
optimal for it.
"""

from mlio._core import (
    ClusterModel,
    FeasibleSet,
    InstanceTooLargeError,
    MalformedInputError,
    Observations,
    PartialOptimalityReport,
    Solution,
    certify,
    demo2d_polytope,
    fit,
    gen2d_observations,
    gen_diet,
    io_solve,
    load_constraints,
    load_observations,
    optimality_gap,
    save_constraints,
    save_observations,
    solution_json,
    solve_lp,
    verify_partial_optimal,
)

__all__ = [
    "ClusterModel",
    "FeasibleSet",
    "InstanceTooLargeError",
    "MalformedInputError",
    "Observations",
    "PartialOptimalityReport",
    "Solution",
    "certify",
    "demo2d_polytope",
    "fit",
    "gen2d_observations",
    "gen_diet",
    "io_solve",
    "load_constraints",
    "load_observations",
    "optimality_gap",
    "save_constraints",
    "save_observations",
    "solution_json",
    "solve_lp",
    "verify_partial_optimal",
]
