from .branch_bound import solve_milp
from .formulation import MODES, build_milp, objective_vectors, solution_from_x
from .problem import (INFEASIBLE, ITERATION_LIMIT, OPTIMAL, UNBOUNDED, LinearProgram, LpSolution,
                      SolverConfig)
from .simplex import solve_lp

__all__ = [
    "LinearProgram", "LpSolution", "SolverConfig", "solve_lp", "solve_milp", "build_milp",
    "objective_vectors", "solution_from_x", "MODES", "OPTIMAL", "INFEASIBLE", "UNBOUNDED",
    "ITERATION_LIMIT",
]
