"""Bi-objective (cost, CO2) design of a closed-loop supply network.

Exact fronts come from an epsilon-constraint sweep over a from-scratch
simplex / branch-and-bound MILP solver; approximate fronts come from an
NSGA-II style genetic algorithm. Brute-force enumeration serves as an
independent oracle on small instances.
"""
from .eps_constraint import EpsConfig, PayoffTable, payoff_table, sweep
from .errors import (ComparisonError, DimensionError, EnumerationBoundError, FrontFormatError,
                     GenerationError, GreenloopError, InstanceValidationError, InvalidParameterError,
                     InvalidReferenceError, ModelInfeasibleError, SchemaVersionError,
                     SolverLimitError)
from .instance_io import (GeneratorSpec, generate, instance_hash, load_bundled, load_front, read_instance,
                          save_front, save_instance)
from .lp_mip import LinearProgram, LpSolution, SolverConfig, build_milp, solve_lp, solve_milp
from .model import (CostBreakdown, EmissionBreakdown, FeasibilityReport, FlowSolution, NetworkInstance,
                    check_feasibility, evaluate_cost, evaluate_emissions, reliability_factor)
from .moga import Chromosome, GaConfig, crowding_distance, evolve, nondominated_sort, repair
from .oracle import OracleResult, brute_force_front, brute_force_milp
from .pareto import FrontEntry, FrontMetrics, ParetoFront, compare, coverage, filter_dominated, hypervolume

__version__ = "0.1.0"

__all__ = [
    "NetworkInstance", "FlowSolution", "CostBreakdown", "EmissionBreakdown", "FeasibilityReport",
    "evaluate_cost", "evaluate_emissions", "check_feasibility", "reliability_factor",
    "LinearProgram", "LpSolution", "SolverConfig", "solve_lp", "solve_milp", "build_milp",
    "EpsConfig", "PayoffTable", "payoff_table", "sweep",
    "GaConfig", "Chromosome", "evolve", "repair", "nondominated_sort", "crowding_distance",
    "ParetoFront", "FrontEntry", "FrontMetrics", "filter_dominated", "hypervolume", "coverage", "compare",
    "GeneratorSpec", "generate", "instance_hash", "load_bundled", "read_instance", "save_instance",
    "load_front", "save_front",
    "OracleResult", "brute_force_milp", "brute_force_front",
    "GreenloopError", "InvalidParameterError", "DimensionError", "InstanceValidationError",
    "SchemaVersionError", "FrontFormatError", "ModelInfeasibleError", "InvalidReferenceError",
    "ComparisonError", "GenerationError", "EnumerationBoundError", "SolverLimitError",
]
