"""Solvers for the nonnegative-orthogonal indicator model."""

from .base import (InfeasibleResultError, ProblemInstance, SolverResult, assert_feasible,
                   feasibility_violations, labels_to_indicator, objective,
                   row_argmax_postprocess)
from .kmeans import solve_kmeans
from .penalty import shift_nonnegative, solve_exact_penalty
from .psnmf import KernelSplit, kernel_split, solve_psnmf

SOLVER_NAMES = ("kmeans", "psnmf", "penalty")

_KEYS = {
    "kmeans": ("restarts", "max_iter", "seed", "refine"),
    "psnmf": ("max_iter", "tol", "seed", "restarts"),
    "penalty": ("rho_schedule", "max_outer", "max_inner", "tol", "seed", "restarts"),
}


def solve(inst, config: dict | str) -> SolverResult:
    """Dispatch on a solver config such as ``{"solver": "psnmf", "tol": 1e-8}``.

    Keys that do not apply to the chosen solver are ignored.
    """
    if isinstance(config, str):
        config = {"solver": config}
    name = config.get("solver")
    if name not in SOLVER_NAMES:
        raise ValueError(f"unknown solver {name!r}; expected one of {SOLVER_NAMES}")
    kwargs = {k: config[k] for k in _KEYS[name] if k in config and config[k] is not None}
    if name == "penalty" and "rho_schedule" in kwargs:
        kwargs["rho_schedule"] = tuple(float(x) for x in kwargs["rho_schedule"])
    fn = {"kmeans": solve_kmeans, "psnmf": solve_psnmf, "penalty": solve_exact_penalty}[name]
    return fn(inst, **kwargs)


__all__ = [
    "InfeasibleResultError", "KernelSplit", "ProblemInstance", "SOLVER_NAMES", "SolverResult",
    "assert_feasible", "feasibility_violations", "kernel_split", "labels_to_indicator",
    "objective", "row_argmax_postprocess", "shift_nonnegative", "solve", "solve_exact_penalty",
    "solve_kmeans", "solve_psnmf",
]
